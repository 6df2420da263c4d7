// REST client for the prediction service, with a request log so round
// trips can be verified, and a token that drops stale responses.

import { ModelInfo, ScenarioRequestBody, encodeRequest } from "./sketch.js";

export interface AgentPrediction {
  group: "ball" | "home" | "away";
  role: number;
  trajectory: number[][];
  controls: { offset: number; position: number[] }[] | null;
}

export interface PredictionResponse {
  model_id: string;
  units: string;
  frame_rate_hz: number;
  horizon: number;
  agents: AgentPrediction[];
}

export interface LoggedRequest {
  url: string;
  body: string; // exact bytes sent
  token: number;
}

export class ServiceError extends Error {
  constructor(
    message: string,
    public status: number | null,
    public details: { field?: string; message: string }[] = [],
    public retryable = false,
  ) {
    super(message);
  }
}

export class PredictionClient {
  private token = 0;
  readonly requestLog: LoggedRequest[] = [];

  constructor(private baseUrl: string) {}

  async listModels(): Promise<ModelInfo[]> {
    const resp = await fetch(`${this.baseUrl}/v1/models`);
    if (!resp.ok) {
      throw new ServiceError(`model listing failed (${resp.status})`, resp.status, [], true);
    }
    const body = (await resp.json()) as { models: ModelInfo[] };
    return body.models;
  }

  nextToken(): number {
    return ++this.token;
  }

  isCurrent(token: number): boolean {
    return token === this.token;
  }

  async predictConditioned(
    body: ScenarioRequestBody,
    token: number,
  ): Promise<PredictionResponse> {
    return this.post("/v1/predict_conditioned", body, token);
  }

  private async post(
    path: string,
    body: ScenarioRequestBody,
    token: number,
  ): Promise<PredictionResponse> {
    const url = `${this.baseUrl}${path}`;
    const bytes = encodeRequest(body);
    this.requestLog.push({ url, body: bytes, token });
    let resp: Response;
    try {
      resp = await fetch(url, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: bytes,
      });
    } catch (err) {
      throw new ServiceError(`service unreachable: ${String(err)}`, null, [], true);
    }
    if (!resp.ok) {
      let details: { field?: string; message: string }[] = [];
      try {
        const parsed = (await resp.json()) as { error?: string; details?: typeof details };
        details = parsed.details ?? [];
      } catch {
        // non-JSON error body; surface the status alone
      }
      throw new ServiceError(
        `prediction failed (${resp.status})`,
        resp.status,
        details,
        resp.status >= 500,
      );
    }
    return (await resp.json()) as PredictionResponse;
  }
}
