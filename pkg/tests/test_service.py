
import numpy as np
import pytest
from fastapi.testclient import TestClient

from playcast.models import ModelSpec, SceneInput, build_model, predict, save_model
from playcast.service import create_app, load_models


@pytest.fixture(scope="module")
def served():
    std_spec = ModelSpec(kind="granma", horizon=8, input_len=4, embedding_width=8,
                         heads=2, output_stride=4)
    cond_spec = ModelSpec(kind="granma", horizon=8, input_len=4, embedding_width=8,
                          heads=2, output_stride=4, conditioned=True)
    models = {"std": build_model(std_spec, seed=1), "cond": build_model(cond_spec, seed=2)}
    app = create_app(models)
    return TestClient(app, raise_server_exceptions=False), models


def _tracks(rng, count, steps, scale=20.0):
    return (rng.uniform(-scale, scale, size=(count, 1, 2))
            + rng.normal(scale=0.05, size=(count, steps, 2)).cumsum(axis=1))


def std_request(rng, model_id="std", steps=4):
    return {
        "model_id": model_id,
        "frame_rate_hz": 10.0,
        "units": "m",
        "ball": _tracks(rng, 1, steps)[0].tolist(),
        "attackers": _tracks(rng, 11, steps).tolist(),
        "defenders_past": _tracks(rng, 11, 4).tolist(),
    }


def cond_request(rng, model_id="cond"):
    return std_request(rng, model_id=model_id, steps=12)  # 4 past + 8 horizon


def test_models_endpoint_lists_specs(served):
    client, models = served
    body = client.get("/v1/models").json()
    ids = [m["id"] for m in body["models"]]
    assert ids == ["cond", "std"]
    assert body["models"][1]["spec"]["kind"] == "granma"


def test_standard_prediction_contract(served):
    client, _ = served
    resp = client.post("/v1/predict", json=std_request(np.random.default_rng(0)))
    assert resp.status_code == 200
    body = resp.json()
    assert body["horizon"] == 8 and body["units"] == "m"
    assert len(body["agents"]) == 23
    assert all(len(a["trajectory"]) == 8 for a in body["agents"])
    assert all(a["controls"] is not None for a in body["agents"])


def test_conditioned_returns_eleven_defender_futures(served):
    client, _ = served
    resp = client.post("/v1/predict_conditioned", json=cond_request(np.random.default_rng(1)))
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["agents"]) == 11
    assert all(a["group"] == "away" for a in body["agents"])
    assert all(len(a["trajectory"]) == 8 for a in body["agents"])
    assert [c["offset"] for c in body["agents"][0]["controls"]] == [4, 8]


def test_service_matches_library_predict_bit_for_bit(served):
    client, models = served
    req = std_request(np.random.default_rng(2))
    resp = client.post("/v1/predict", json=req).json()
    scene = SceneInput(ball=np.array(req["ball"]), attackers=np.array(req["attackers"]),
                       defenders=np.array(req["defenders_past"]))
    direct = predict(scene, models["std"])
    served_traj = np.array([a["trajectory"] for a in resp["agents"]])
    # json round trip of Python floats is exact, so equality is bitwise
    assert (served_traj == direct.dense).all()


def test_identical_requests_get_identical_bodies(served):
    client, _ = served
    req = cond_request(np.random.default_rng(3))
    first = client.post("/v1/predict_conditioned", json=req)
    second = client.post("/v1/predict_conditioned", json=req)
    assert first.content == second.content


def test_wrong_attacker_count_is_400_with_field(served):
    client, _ = served
    req = std_request(np.random.default_rng(4))
    req["attackers"] = req["attackers"][:10]
    resp = client.post("/v1/predict", json=req)
    assert resp.status_code == 400
    detail = resp.json()["details"][0]
    assert "attackers" in detail["field"]


def test_non_finite_coordinates_are_400(served):
    client, _ = served
    req = std_request(np.random.default_rng(5))
    req["ball"][0][0] = 1e9
    assert client.post("/v1/predict", json=req).status_code == 400


def test_wrong_length_for_model_is_422(served):
    client, _ = served
    req = std_request(np.random.default_rng(6), steps=9)
    resp = client.post("/v1/predict", json=req)
    assert resp.status_code == 422


def test_horizon_truncates_but_never_extends(served):
    client, _ = served
    req = std_request(np.random.default_rng(7))
    req["horizon"] = 5
    body = client.post("/v1/predict", json=req).json()
    assert body["horizon"] == 5
    assert all(len(a["trajectory"]) == 5 for a in body["agents"])
    assert all(c["offset"] <= 5 for a in body["agents"] for c in a["controls"])
    req["horizon"] = 9
    assert client.post("/v1/predict", json=req).status_code == 422


def test_conditioned_model_rejected_on_standard_endpoint(served):
    client, _ = served
    req = std_request(np.random.default_rng(8), model_id="cond")
    assert client.post("/v1/predict", json=req).status_code == 422


def test_load_models_from_checkpoints(tmp_path):
    spec = ModelSpec(kind="granma", horizon=8, input_len=4, embedding_width=8,
                     heads=2, output_stride=4)
    model = build_model(spec, seed=5)
    path = tmp_path / "m.ckpt"
    save_model(path, model, meta={"seed": 5})
    models = load_models([(None, path), ("alias", path)])
    assert set(models) == {"m", "alias"}
    client = TestClient(create_app(models), raise_server_exceptions=False)
    req = std_request(np.random.default_rng(9), model_id="m")
    assert client.post("/v1/predict", json=req).status_code == 200
