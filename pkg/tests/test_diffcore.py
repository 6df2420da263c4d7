import hashlib

import numpy as np
import pytest

from playcast.diff import (
    Adam,
    BatchNormState,
    GradientNaNError,
    Parameter,
    ShapeError,
    Tensor,
    batch_norm,
    dense_affine,
    grad_check,
    huber_elementwise,
    load_checkpoint,
    mean_reduce,
    relu,
    save_checkpoint,
    softmax,
)

from _gradcases import ALL_PRIMITIVE_CASES, run_primitive_contract


def test_relu_backward_gates_on_sign():
    x = Parameter(np.array([-1.0, 2.0]), "x")
    relu(x).sum().backward()
    np.testing.assert_allclose(x.grad, [0.0, 1.0])


def test_dense_affine_identity():
    x = Tensor(np.random.default_rng(0).normal(size=(3, 4)))
    w = Tensor(np.eye(4))
    b = Tensor(np.zeros(4))
    np.testing.assert_allclose(dense_affine(x, w, b).data, x.data)


def test_dense_affine_shape_error_names_primitive():
    with pytest.raises(ShapeError, match="dense_affine"):
        dense_affine(Tensor(np.zeros((2, 3))), Tensor(np.zeros((4, 5))))


def test_random_five_parameter_graph_matches_finite_differences():
    rng = np.random.default_rng(42)
    params = [Parameter(rng.normal(size=()), f"p{i}") for i in range(5)]

    def fn():
        a = params[0] * params[1] + params[2].tanh()
        b = (a * a + params[3]).sigmoid()
        return mean_reduce(b * params[4] + a.exp() * 0.1)

    report = grad_check(fn, params, eps=1e-3, tolerance=1e-4)
    assert report.passed, report


def test_grad_check_quadratic_on_linear_layer():
    rng = np.random.default_rng(1)
    w = Parameter(rng.normal(size=(3, 2)), "w")
    b = Parameter(rng.normal(size=2), "b")
    x = Tensor(rng.normal(size=(4, 3)))
    y = Tensor(rng.normal(size=(4, 2)))

    def fn():
        d = dense_affine(x, w, b) - y
        return mean_reduce(d * d)

    report = grad_check(fn, [w, b], eps=1e-4, tolerance=1e-6)
    assert report.passed, report


def test_grad_check_flags_corrupted_backward():
    p = Parameter(np.array(1.5), "p")

    def bad_square(t):
        # deliberately wrong backward (factor 3 instead of 2)
        return Tensor._node(t.data * t.data, (t,), lambda g: (g * 3.0 * t.data,))

    report = grad_check(lambda: mean_reduce(bad_square(p)), [p], eps=1e-4, tolerance=1e-4)
    assert not report.passed


@pytest.mark.parametrize("name", sorted(ALL_PRIMITIVE_CASES))
def test_primitive_gradient_contract(name):
    worst = run_primitive_contract(name, n_cases=100, tolerance=1e-4)
    assert worst <= 1e-4


def test_softmax_rows_sum_to_one():
    x = Tensor(np.random.default_rng(2).normal(size=(5, 7)) * 30)
    s = softmax(x, axis=-1)
    np.testing.assert_allclose(s.data.sum(axis=-1), np.ones(5), rtol=1e-12)


def test_batch_norm_train_eval_consistency_after_freezing():
    rng = np.random.default_rng(3)
    x = Tensor(rng.normal(size=(16, 4)))
    gamma = Parameter(rng.normal(size=4) + 1.0, "g")
    beta = Parameter(rng.normal(size=4), "b")
    state = BatchNormState.for_features(4, momentum=1.0)  # running <- batch stats
    train_out = batch_norm(x, gamma, beta, state, training=True)
    eval_out = batch_norm(x, gamma, beta, state, training=False)
    np.testing.assert_allclose(eval_out.data, train_out.data, atol=1e-4)


def test_batch_norm_rejects_single_row_training():
    state = BatchNormState.for_features(3)
    with pytest.raises(ShapeError, match="batch_norm"):
        batch_norm(Tensor(np.zeros((1, 3))), Parameter(np.ones(3), "g"),
                   Parameter(np.zeros(3), "b"), state, training=True)


def test_huber_values_and_shape_check():
    pred = Tensor(np.array([0.5, 3.0]))
    out = huber_elementwise(pred, np.zeros(2))
    np.testing.assert_allclose(out.data, [0.125, 2.5])
    with pytest.raises(ShapeError):
        huber_elementwise(pred, np.zeros(3))


def test_forward_determinism_same_inputs():
    def run():
        rng = np.random.default_rng(11)
        x = Tensor(rng.normal(size=(6, 8)))
        w = Tensor(rng.normal(size=(8, 8)))
        out = softmax(relu(dense_affine(x, w)), axis=-1)
        return hashlib.sha256(out.data.tobytes()).hexdigest()

    assert run() == run()


# -- Adam -------------------------------------------------------------------


def test_adam_zero_gradients_leave_parameters_unchanged():
    p = Parameter(np.array([1.0, -2.0]), "p")
    opt = Adam([p], lr=0.1)
    p.grad = np.zeros(2)
    opt.step()
    np.testing.assert_allclose(p.data, [1.0, -2.0])


def test_adam_learning_rate_after_200_epoch_decays():
    p = Parameter(np.array(0.0), "p")
    opt = Adam([p], lr=0.0005, lr_decay=0.999)
    for _ in range(200):
        opt.decay_epoch()
    assert opt.lr == pytest.approx(0.0005 * 0.999 ** 200, rel=1e-12)
    assert opt.lr == pytest.approx(4.093e-4, rel=1e-3)


def test_adam_first_step_moves_by_learning_rate():
    p = Parameter(np.array(1.0), "p")
    opt = Adam([p], lr=0.01)
    p.grad = np.array(1.0)
    opt.step()
    # bias-corrected first step: m_hat = v_hat = 1 -> delta = lr/(1+eps)
    assert p.data == pytest.approx(1.0 - 0.01, rel=1e-6)


def test_adam_aborts_on_nan_gradient():
    p = Parameter(np.array(1.0), "badparam")
    opt = Adam([p])
    p.grad = np.array(np.nan)
    with pytest.raises(GradientNaNError, match="badparam"):
        opt.step()


# -- checkpoint --------------------------------------------------------------


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    params = {"layer.w": rng.normal(size=(3, 4)), "layer.b": rng.normal(size=4)}
    buffers = {"bn.mean": rng.normal(size=4)}
    p = Parameter(params["layer.w"].copy(), "layer.w")
    opt = Adam([p], lr=0.0005)
    p.grad = rng.normal(size=(3, 4))
    opt.step()
    meta = {"seed": 7, "epoch": 3, "config_hash": "abc"}
    path = tmp_path / "model.ckpt"
    save_checkpoint(path, params, buffers, opt.state_dict(), meta)
    loaded = load_checkpoint(path)
    for k, v in params.items():
        np.testing.assert_array_equal(loaded["params"][k], v)
    np.testing.assert_array_equal(loaded["buffers"]["bn.mean"], buffers["bn.mean"])
    assert loaded["meta"] == meta
    assert loaded["optimizer"]["step_count"] == 1
    np.testing.assert_array_equal(loaded["optimizer"]["m"]["layer.w"], opt.m[0])


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "junk.ckpt"
    path.write_bytes(b"not a checkpoint at all")
    from playcast.diff import CheckpointError
    with pytest.raises(CheckpointError):
        load_checkpoint(path)
