"""Randomized gradient-contract cases for every diffcore primitive.

Each case builds a small graph ending in a scalar and runs grad_check
against central finite differences. ReLU and Huber inputs are sampled away
from their C^1 boundary points (0 and +-1) where central differences are
not a valid oracle.
"""

from __future__ import annotations

import numpy as np

from playcast.diff import (
    BatchNormState,
    GRUCellParams,
    Parameter,
    Tensor,
    batch_norm,
    causal_conv1d,
    concat,
    dense_affine,
    grad_check,
    gru_cell,
    huber_elementwise,
    mean_reduce,
    relu,
    scaled_dot_attention,
    softmax,
    sum_over_set,
)


def _away_from(rng, shape, points, margin=0.05, scale=1.5):
    """Sample values keeping |x - p| > margin for every boundary point p."""
    x = rng.normal(scale=scale, size=shape)
    for p in points:
        mask = np.abs(x - p) < margin
        while mask.any():
            x[mask] = rng.normal(scale=scale, size=mask.sum())
            mask = np.abs(x - p) < margin
    return x


def _scalarize(out: Tensor, rng) -> Tensor:
    w = Tensor(rng.normal(size=out.shape))
    return mean_reduce(out * w)


def case_dense_affine(rng):
    b, f, o = rng.integers(1, 4), rng.integers(1, 5), rng.integers(1, 5)
    x = Parameter(rng.normal(size=(b, f)), "x")
    w = Parameter(rng.normal(size=(f, o)), "w")
    bias = Parameter(rng.normal(size=o), "b")
    return lambda: _scalarize(dense_affine(x, w, bias), np.random.default_rng(0)), [x, w, bias]


def case_dense_affine_grouped(rng):
    b, g, f, o = rng.integers(1, 3), rng.integers(1, 4), rng.integers(1, 4), rng.integers(1, 4)
    x = Parameter(rng.normal(size=(b, g, f)), "x")
    w = Parameter(rng.normal(size=(g, f, o)), "w")
    bias = Parameter(rng.normal(size=(g, o)), "b")
    return lambda: _scalarize(dense_affine(x, w, bias), np.random.default_rng(0)), [x, w, bias]


def case_relu(rng):
    shape = tuple(rng.integers(1, 5, size=rng.integers(1, 3)))
    x = Parameter(_away_from(rng, shape, [0.0]), "x")
    return lambda: _scalarize(relu(x), np.random.default_rng(1)), [x]


def case_batch_norm(rng):
    b, f = int(rng.integers(2, 6)), int(rng.integers(1, 4))
    x = Parameter(rng.normal(size=(b, f)), "x")
    gamma = Parameter(rng.normal(size=f) + 1.0, "g")
    beta = Parameter(rng.normal(size=f), "be")
    training = bool(rng.integers(0, 2))
    state = BatchNormState.for_features(f)
    state.mean = rng.normal(size=f)
    state.var = np.abs(rng.normal(size=f)) + 0.5

    def fn():
        return _scalarize(batch_norm(x, gamma, beta, state, training=training),
                          np.random.default_rng(2))

    return fn, [x, gamma, beta]


def case_softmax(rng):
    shape = (int(rng.integers(1, 4)), int(rng.integers(2, 6)))
    x = Parameter(rng.normal(size=shape), "x")
    return lambda: _scalarize(softmax(x, axis=-1), np.random.default_rng(3)), [x]


def case_attention(rng):
    heads = int(rng.choice([1, 2]))
    b, s, d = int(rng.integers(1, 3)), int(rng.integers(2, 5)), heads * int(rng.integers(1, 3))
    q = Parameter(rng.normal(size=(b, s, d)), "q")
    k = Parameter(rng.normal(size=(b, s, d)), "k")
    v = Parameter(rng.normal(size=(b, s, d)), "v")
    return lambda: _scalarize(scaled_dot_attention(q, k, v, heads), np.random.default_rng(4)), [q, k, v]


def case_gru_cell(rng):
    b, i, h = int(rng.integers(1, 3)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
    params = GRUCellParams.init(rng, i, h, "gru")
    x = Parameter(rng.normal(size=(b, i)), "x")
    hidden = Parameter(rng.normal(size=(b, h)), "h")
    return (lambda: _scalarize(gru_cell(x, hidden, params), np.random.default_rng(5)),
            [x, hidden, *params.parameters()])


def case_causal_conv1d(rng):
    b, t, c, o = int(rng.integers(1, 3)), int(rng.integers(2, 6)), int(rng.integers(1, 3)), int(rng.integers(1, 3))
    kernel = int(rng.integers(1, 4))
    dilation = int(rng.integers(1, 3))
    x = Parameter(rng.normal(size=(b, t, c)), "x")
    w = Parameter(rng.normal(size=(kernel, c, o)), "w")
    bias = Parameter(rng.normal(size=o), "b")
    return (lambda: _scalarize(causal_conv1d(x, w, bias, dilation=dilation),
                               np.random.default_rng(6)), [x, w, bias])


def case_concat(rng):
    f = int(rng.integers(1, 4))
    a = Parameter(rng.normal(size=(int(rng.integers(1, 3)), f)), "a")
    b = Parameter(rng.normal(size=(int(rng.integers(1, 3)), f)), "b")
    return lambda: _scalarize(concat([a, b], axis=0), np.random.default_rng(7)), [a, b]


def case_sum_over_set(rng):
    shape = (int(rng.integers(1, 3)), int(rng.integers(2, 5)), int(rng.integers(1, 4)))
    x = Parameter(rng.normal(size=shape), "x")
    return lambda: _scalarize(sum_over_set(x, axis=1), np.random.default_rng(8)), [x]


def case_huber(rng):
    shape = tuple(rng.integers(1, 5, size=2))
    target = rng.normal(size=shape)
    # keep |pred - target| away from the +-1 joins of the Huber branches
    pred = Parameter(target + _away_from(rng, shape, [-1.0, 1.0]), "pred")
    return lambda: _scalarize(huber_elementwise(pred, target), np.random.default_rng(9)), [pred]


def case_mean_reduce(rng):
    shape = tuple(rng.integers(1, 5, size=rng.integers(1, 4)))
    x = Parameter(rng.normal(size=shape), "x")
    return lambda: mean_reduce(x * x), [x]


ALL_PRIMITIVE_CASES = {
    "dense_affine": case_dense_affine,
    "dense_affine_grouped": case_dense_affine_grouped,
    "relu": case_relu,
    "batch_norm": case_batch_norm,
    "softmax": case_softmax,
    "scaled_dot_attention": case_attention,
    "gru_cell": case_gru_cell,
    "causal_conv1d": case_causal_conv1d,
    "concat": case_concat,
    "sum_over_set": case_sum_over_set,
    "huber_elementwise": case_huber,
    "mean_reduce": case_mean_reduce,
}


def run_primitive_contract(name, n_cases=100, tolerance=1e-4, seed=1234):
    """Run grad_check on ``n_cases`` random instances of one primitive."""
    maker = ALL_PRIMITIVE_CASES[name]
    worst = 0.0
    for i in range(n_cases):
        rng = np.random.default_rng(seed + i * 7919)
        fn, inputs = maker(rng)
        report = grad_check(fn, inputs, eps=1e-5, tolerance=tolerance)
        worst = max(worst, report.max_discrepancy)
        if not report.passed:
            raise AssertionError(
                f"{name} case {i}: discrepancy {report.max_discrepancy:.3e} "
                f"at {report.worst_input} exceeds {tolerance:g}")
    return worst
