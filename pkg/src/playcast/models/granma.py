"""Graph-network + multi-head-attention predictor (GraN-MA).

Each agent's trajectory is flattened and MLP-encoded. Within each team a
graph layer with full adjacency computes edge features over all ordered
pairs, ``e_ij = phi_e([v_i, v_j])``, and aggregates them per node,
``o_i = phi_v(sum_j e_ij)``; the ball keeps its plain encoding. One
residual multi-head attention layer mixes all 23 embeddings, and shared
per-team MLP decoders emit the control points for each agent
independently. Sharing the decoder within a team is what keeps the model
equivariant to the player order inside a team.

In conditioned mode the ball/attacker encoders consume full-length
trajectories and only the defender decoder exists.
"""

from __future__ import annotations

import numpy as np

from ..data.tracking import AWAY_SLICE, BALL_INDEX, HOME_SLICE, N_PER_TEAM
from ..diff import (
    MLP,
    Parameter,
    Tensor,
    concat,
    dense_affine,
    scaled_dot_attention,
    sum_over_set,
    uniform_fan_in,
)
from .scene import SceneBatch
from .spec import ModelSpec


def graph_layer(v: Tensor, phi_e: MLP, phi_v: MLP, training: bool) -> Tensor:
    """Full-adjacency relational layer over one team's embeddings (B, S, E)."""
    b, s, e = v.shape
    vi = v.reshape(b, s, 1, e).broadcast_to((b, s, s, e))
    vj = v.reshape(b, 1, s, e).broadcast_to((b, s, s, e))
    pairs = concat([vi, vj], axis=-1).reshape(b * s * s, 2 * e)
    edges = phi_e(pairs, training).reshape(b, s, s, -1)
    agg = sum_over_set(edges, axis=2)  # sum over j for each i
    return phi_v(agg.reshape(b * s, -1), training).reshape(b, s, -1)


class GraNMA:
    emits_dense = False

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        self.spec = spec
        emb = spec.embedding_width
        n = spec.input_len
        cond_len = spec.window_len if spec.conditioned else n
        k_out = 2 * spec.n_controls

        self.ball_enc = MLP.init(rng, cond_len * 2, emb, emb, 3, "ball_enc")
        self.home_enc = MLP.init(rng, cond_len * 2, emb, emb, 3, "home_enc")
        self.away_enc = MLP.init(rng, n * 2, emb, emb, 3, "away_enc")
        self.home_phi_e = MLP.init(rng, 2 * emb, emb, emb, 3, "home_phi_e")
        self.home_phi_v = MLP.init(rng, emb, emb, emb, 3, "home_phi_v")
        self.away_phi_e = MLP.init(rng, 2 * emb, emb, emb, 3, "away_phi_e")
        self.away_phi_v = MLP.init(rng, emb, emb, emb, 3, "away_phi_v")

        def lin(name):
            return (Parameter(uniform_fan_in(rng, (emb, emb), emb), f"attn.{name}.w"),
                    Parameter(uniform_fan_in(rng, (emb,), emb), f"attn.{name}.b"))

        self.wq, self.bq = lin("q")
        self.wk, self.bk = lin("k")
        self.wv, self.bv = lin("v")
        self.wo, self.bo = lin("o")

        width = spec.hidden_width
        if spec.conditioned:
            self.ball_dec = self.home_dec = None
        else:
            self.ball_dec = MLP.init(rng, emb, width, k_out, 5, "ball_dec")
            self.home_dec = MLP.init(rng, emb, width, k_out, 5, "home_dec")
        self.away_dec = MLP.init(rng, emb, width, k_out, 5, "away_dec")

    # -- plumbing ---------------------------------------------------------

    def _mlps(self) -> list[MLP]:
        mlps = [self.ball_enc, self.home_enc, self.away_enc,
                self.home_phi_e, self.home_phi_v, self.away_phi_e, self.away_phi_v]
        if self.ball_dec is not None:
            mlps += [self.ball_dec, self.home_dec]
        return mlps + [self.away_dec]

    def parameters(self) -> list[Parameter]:
        out = []
        for m in self._mlps():
            out += m.parameters()
        out += [self.wq, self.bq, self.wk, self.bk, self.wv, self.bv, self.wo, self.bo]
        return out

    def buffers(self) -> dict[str, np.ndarray]:
        out = {}
        for m in self._mlps():
            out.update(m.buffers())
        return out

    def load_buffers(self, bufs: dict[str, np.ndarray]) -> None:
        for m in self._mlps():
            m.load_buffers(bufs)

    # -- forward ------------------------------------------------------------

    def forward(self, batch: SceneBatch, training: bool) -> Tensor:
        spec = self.spec
        b = batch.batch_size
        n = spec.input_len
        if spec.conditioned:
            if batch.cond_full is None:
                raise ValueError("conditioned GraN-MA needs full ball/attacker trajectories")
            ball_seq = batch.cond_full[:, 0]
            home_seq = batch.cond_full[:, 1:]
        else:
            ball_seq = batch.past[:, BALL_INDEX]
            home_seq = batch.past[:, HOME_SLICE]
        away_seq = batch.past[:, AWAY_SLICE]

        ball = self.ball_enc(Tensor(ball_seq.reshape(b, -1)), training)
        emb = ball.shape[-1]
        home_v = self.home_enc(Tensor(home_seq.reshape(b * N_PER_TEAM, -1)), training)
        away_v = self.away_enc(Tensor(away_seq.reshape(b * N_PER_TEAM, -1)), training)
        home_o = graph_layer(home_v.reshape(b, N_PER_TEAM, emb),
                             self.home_phi_e, self.home_phi_v, training)
        away_o = graph_layer(away_v.reshape(b, N_PER_TEAM, emb),
                             self.away_phi_e, self.away_phi_v, training)

        tokens = concat([ball.reshape(b, 1, emb), home_o, away_o], axis=1)
        q = dense_affine(tokens, self.wq, self.bq)
        k = dense_affine(tokens, self.wk, self.bk)
        v = dense_affine(tokens, self.wv, self.bv)
        mixed = scaled_dot_attention(q, k, v, self.spec.heads)
        z = tokens + dense_affine(mixed, self.wo, self.bo)

        kk = spec.n_controls
        away_out = self.away_dec(
            z[:, 1 + N_PER_TEAM:].reshape(b * N_PER_TEAM, emb), training
        ).reshape(b, N_PER_TEAM, kk, 2)
        if spec.conditioned:
            return away_out
        ball_out = self.ball_dec(z[:, 0], training).reshape(b, 1, kk, 2)
        home_out = self.home_dec(
            z[:, 1:1 + N_PER_TEAM].reshape(b * N_PER_TEAM, emb), training
        ).reshape(b, N_PER_TEAM, kk, 2)
        return concat([ball_out, home_out, away_out], axis=1)
