import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from playcast.motion import (
    Anchor,
    InterpSegment,
    InvalidSegmentError,
    SparseTrack,
    control_offsets,
    densify,
    estimate_anchor_derivatives,
    interpolate_segment,
    segment_terminal_derivatives,
    solve_constant_term,
    sparsify_dense,
)


def test_constant_velocity_identity_case():
    seg = InterpSegment(s0=0.0, sT=4.0, duration=4, order=1)
    assert solve_constant_term(seg) == pytest.approx(1.0)


def test_constant_acceleration_zero_initial_velocity():
    seg = InterpSegment(s0=0.0, sT=8.0, duration=4, order=2, v0=0.0)
    assert solve_constant_term(seg) == pytest.approx(1.0)  # 2*8/16


def test_constant_jerk_against_numerical_triple_integration():
    seg = InterpSegment(s0=0.0, sT=6.0, duration=3, order=3, v0=0.0, a0=0.0)
    j = float(solve_constant_term(seg))
    assert j == pytest.approx(4.0 / 3.0)
    # oracle: integrate constant jerk j three times on a fine grid and land on sT
    dt = 1e-4
    n = int(round(3 / dt))
    a = np.cumsum(np.full(n, j) * dt)          # a(t) = j t
    v = np.cumsum(a * dt)                      # v(t) = j t^2/2
    s = np.cumsum(v * dt)                      # s(t) = j t^3/6
    assert s[-1] == pytest.approx(6.0, rel=1e-3)


def test_zero_duration_is_invalid():
    with pytest.raises(InvalidSegmentError):
        InterpSegment(s0=0.0, sT=1.0, duration=0, order=2, v0=0.0)


def test_missing_required_derivative_is_invalid():
    with pytest.raises(InvalidSegmentError):
        InterpSegment(s0=0.0, sT=1.0, duration=3, order=3, v0=0.0)  # a0 missing


def test_interpolate_quadratic_from_rest():
    seg = InterpSegment(s0=0.0, sT=8.0, duration=4, order=2, v0=0.0)
    np.testing.assert_allclose(interpolate_segment(seg), [0.5, 2.0, 4.5, 8.0])


def test_interpolate_decelerating_segment():
    # a = 2(0 - 2*2)/4 = -2, s(t) = 2t - t^2
    seg = InterpSegment(s0=0.0, sT=0.0, duration=2, order=2, v0=2.0)
    np.testing.assert_allclose(interpolate_segment(seg), [1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("order,derivs", [(1, {}), (2, {"v0": 0.0}),
                                          (3, {"v0": 0.0, "a0": 0.0}),
                                          (4, {"v0": 0.0, "a0": 0.0, "j0": 0.0})])
def test_all_zero_segment_stays_at_rest(order, derivs):
    seg = InterpSegment(s0=0.0, sT=0.0, duration=5, order=order, **derivs)
    np.testing.assert_allclose(interpolate_segment(seg), np.zeros(5))


def test_interpolation_is_per_coordinate():
    seg = InterpSegment(s0=np.array([0.0, 1.0]), sT=np.array([8.0, 1.0]),
                        duration=4, order=2, v0=np.array([0.0, 0.0]))
    out = interpolate_segment(seg)
    assert out.shape == (4, 2)
    np.testing.assert_allclose(out[:, 0], [0.5, 2.0, 4.5, 8.0])
    np.testing.assert_allclose(out[:, 1], np.ones(4))


def test_anchor_derivatives_constant_velocity():
    v0, a0 = estimate_anchor_derivatives(np.array([0.0, 1.0, 2.0]), order=3)
    assert v0 == pytest.approx(1.0)
    assert a0 == pytest.approx(0.0)


def test_anchor_derivatives_at_rest():
    v0, a0 = estimate_anchor_derivatives(np.array([0.0, 0.0, 0.0]), order=3)
    assert v0 == 0.0 and a0 == 0.0


def test_anchor_derivatives_accelerating():
    v0, a0 = estimate_anchor_derivatives(np.array([0.0, 1.0, 4.0]), order=3)
    assert v0 == pytest.approx(3.0)
    assert a0 == pytest.approx(2.0)


def test_anchor_derivatives_need_enough_history():
    with pytest.raises(InvalidSegmentError):
        estimate_anchor_derivatives(np.array([0.0, 1.0]), order=3)


def _track(anchor_pos, derivs, controls, stride=1):
    return SparseTrack(anchor=Anchor(position=anchor_pos, derivatives=derivs),
                       controls=tuple(controls), stride=stride)


def test_densify_single_control_equals_interpolate_segment():
    seg = InterpSegment(s0=1.0, sT=5.0, duration=6, order=2, v0=0.5)
    track = _track(1.0, (0.5,), [(6, 5.0)], stride=6)
    np.testing.assert_allclose(densify(track, order=2), interpolate_segment(seg))


def test_densify_two_constant_velocity_segments():
    track = _track(0.0, (1.0,), [(2, 2.0), (4, 4.0)], stride=2)
    np.testing.assert_allclose(densify(track, order=2), [1.0, 2.0, 3.0, 4.0], atol=1e-12)
    # both segments solve to zero acceleration
    seg1 = InterpSegment(s0=0.0, sT=2.0, duration=2, order=2, v0=1.0)
    assert solve_constant_term(seg1) == pytest.approx(0.0)


def test_densify_reproduces_quadratic_with_exact_derivatives():
    truth = lambda t: 0.1 * t ** 2
    # exact continuous derivatives at t=0 in per-step units (step = 1)
    track = _track(truth(0.0), (0.0,), [(5, truth(5.0)), (10, truth(10.0))], stride=5)
    dense = densify(track, order=2)
    expected = truth(np.arange(1.0, 11.0))
    np.testing.assert_allclose(dense, expected, rtol=1e-9, atol=1e-12)


def test_densify_empty_controls_error():
    with pytest.raises(InvalidSegmentError):
        _track(0.0, (0.0,), [])


def test_sparsify_counts_and_offsets():
    anchor = Anchor(position=0.0, derivatives=(0.0,))
    dense = np.arange(1.0, 41.0)
    track = sparsify_dense(dense, stride=10, anchor=anchor)
    assert track.offsets() == [10, 20, 30, 40]
    single = sparsify_dense(dense, stride=40, anchor=anchor)
    assert single.offsets() == [40]
    ident = sparsify_dense(dense, stride=1, anchor=anchor)
    assert ident.offsets() == list(range(1, 41))


def test_sparsify_keeps_final_output_for_non_dividing_stride():
    anchor = Anchor(position=0.0, derivatives=(0.0,))
    track = sparsify_dense(np.arange(1.0, 41.0), stride=12, anchor=anchor)
    assert track.offsets() == [12, 24, 36, 40]
    assert len(track.offsets()) == int(np.ceil(40 / 12))


def test_stride_one_round_trip():
    rng = np.random.default_rng(0)
    dense = rng.normal(size=(17, 2))
    anchor = Anchor(position=rng.normal(size=2), derivatives=(rng.normal(size=2),))
    track = sparsify_dense(dense, stride=1, anchor=anchor)
    np.testing.assert_allclose(densify(track, order=2), dense, rtol=1e-12, atol=1e-12)


# -- properties --------------------------------------------------------------


@st.composite
def random_segment(draw):
    order = draw(st.integers(1, 4))
    dur = draw(st.integers(1, 30))
    vals = st.floats(-50, 50)
    kwargs = {}
    for name in ("v0", "a0", "j0")[: order - 1]:
        kwargs[name] = draw(vals)
    return InterpSegment(s0=draw(vals), sT=draw(vals), duration=dur, order=order, **kwargs)


@given(random_segment())
@settings(max_examples=200, deadline=None)
def test_endpoint_pass_through(seg):
    out = interpolate_segment(seg)
    sT = float(np.asarray(seg.sT))
    assert abs(out[-1] - sT) <= 1e-9 * max(1.0, abs(sT))


@given(st.integers(1, 4), st.data())
@settings(max_examples=100, deadline=None)
def test_exactness_class_polynomials(order, data):
    # degree-`order` polynomial with exact derivatives at t=0 is reproduced
    coeffs = [data.draw(st.floats(-3, 3)) for _ in range(order + 1)]
    poly = np.polynomial.Polynomial(coeffs)
    horizon = 12
    offs = control_offsets(horizon, data.draw(st.integers(1, horizon)))
    derivs = tuple(poly.deriv(m)(0.0) for m in range(1, order))
    track = _track(poly(0.0), derivs, [(o, poly(float(o))) for o in offs],
                   stride=offs[0])
    dense = densify(track, order=order)
    np.testing.assert_allclose(dense, poly(np.arange(1.0, horizon + 1.0)),
                               rtol=1e-9, atol=1e-9)


@given(st.lists(st.floats(-20, 20), min_size=2, max_size=6), st.integers(1, 8))
@settings(max_examples=100, deadline=None)
def test_order_one_is_linear_interpolation(points, gap):
    offs = [(i + 1) * gap for i in range(len(points))]
    track = _track(0.0, (), list(zip(offs, points)), stride=gap)
    dense = densify(track, order=1)
    knots_t = np.array([0] + offs, dtype=float)
    knots_p = np.array([0.0] + points)
    expected = np.interp(np.arange(1.0, offs[-1] + 1.0), knots_t, knots_p)
    np.testing.assert_allclose(dense, expected, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("order", [2, 3, 4])
def test_chaining_continuity_of_derivatives(order):
    rng = np.random.default_rng(3)
    derivs = tuple(rng.normal() for _ in range(order - 1))
    pos = float(rng.normal())
    controls = [(5, float(rng.normal(scale=5))), (9, float(rng.normal(scale=5))),
                (15, float(rng.normal(scale=5)))]
    track = _track(pos, derivs, controls, stride=5)
    densify(track, order=order)  # must not raise
    # terminal derivatives of segment k must equal the initial state of k+1
    state_pos, state_derivs = pos, derivs
    prev_off = 0
    for off, target in controls:
        seg = InterpSegment(s0=state_pos, sT=target, duration=off - prev_off, order=order,
                            **dict(zip(("v0", "a0", "j0"), state_derivs)))
        terminal = segment_terminal_derivatives(seg)
        # derivative continuity is by construction; recompute independently
        c = float(solve_constant_term(seg))
        T = float(off - prev_off)
        fact = [1.0, 1.0, 2.0, 6.0, 24.0]
        coeffs = list(state_derivs) + [c]
        for m in range(1, order):
            expect = sum(coeffs[k - 1] * T ** (k - m) / fact[k - m] for k in range(m, order + 1))
            assert terminal[m - 1] == pytest.approx(expect, abs=1e-9)
        state_pos, state_derivs = target, terminal
        prev_off = off


def test_densify_jacobian_is_linear_in_controls():
    # every dense output is affine in the control positions, so central
    # differences at two step sizes must agree to rounding
    rng = np.random.default_rng(7)
    derivs = (rng.normal(), rng.normal())
    controls = [(4, rng.normal()), (8, rng.normal()), (12, rng.normal())]
    base = _track(rng.normal(), derivs, controls, stride=4)

    def dense_for(shift_idx, eps):
        shifted = [(o, p + (eps if i == shift_idx else 0.0))
                   for i, (o, p) in enumerate(controls)]
        return densify(_track(base.anchor.position, derivs, shifted, stride=4), order=3)

    for i in range(len(controls)):
        j1 = (dense_for(i, 1e-3) - dense_for(i, -1e-3)) / 2e-3
        j2 = (dense_for(i, 1e-1) - dense_for(i, -1e-1)) / 2e-1
        np.testing.assert_allclose(j1, j2, rtol=1e-6, atol=1e-8)
        assert np.any(np.abs(j1) > 0)  # gradients reach every control
