"""Map steps, frames, potential landscape, fixed points and noise streams."""

import numpy as np
import pytest

import mapescape as me
from mapescape.model import _step_transformed_xy

from conftest import params_for


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------

def test_params_reject_bad_coefficients():
    with pytest.raises(ValueError):
        me.MapParams(tau1=0.05, tau2=0.05, a=1.5, b=0.5)
    with pytest.raises(ValueError):
        me.MapParams(tau1=0.05, tau2=0.05, a=0.25, b=0.0)
    with pytest.raises(ValueError):
        me.MapParams(tau1=0.0, tau2=0.05, a=0.25, b=0.5)
    with pytest.raises(ValueError):
        me.MapParams(tau1=0.05, tau2=1.2, a=0.25, b=0.5)
    with pytest.raises(ValueError):
        me.MapParams(tau1=0.05, tau2=0.05, a=0.25, b=0.5, epsilon=-1e-3)


def test_params_warn_outside_weak_regime():
    with pytest.warns(UserWarning, match="weak-nonlinearity"):
        me.MapParams(tau1=0.3, tau2=0.05, a=0.25, b=0.5)


def test_tau12_ratio_convention():
    p = me.MapParams.from_ratio(0.8, tau=0.05)
    assert p.tau2 == 0.05
    assert p.tau1 == pytest.approx(0.04, abs=1e-15)
    assert p.tau12 == pytest.approx(0.8, abs=1e-15)


# ---------------------------------------------------------------------------
# raw map and rescaling
# ---------------------------------------------------------------------------

def test_origin_is_raw_fixed_point():
    p = params_for(1.0)
    s = me.step_raw(me.State2D(0.0, 0.0, me.RAW), p)
    assert (s.x, s.y) == (0.0, 0.0)


def test_raw_axis_fixed_point_from_analytic_solve():
    # solving 1 = (1 + tau1)(1 - a x^2) gives a x^2 = tau1 / (1 + tau1)
    p = params_for(1.0)
    x_star = np.sqrt(p.tau1 / (p.a * (1.0 + p.tau1)))
    s = me.step_raw(me.State2D(x_star, 0.0, me.RAW), p)
    assert s.x == pytest.approx(x_star, abs=1e-15)
    assert s.y == 0.0


def test_raw_map_converges_to_axis_attractor():
    # parameters of the published phase portrait
    p = me.MapParams(tau1=0.02, tau2=0.025, a=0.2, b=0.4)
    rng = np.random.default_rng(7)
    x0, y0 = rng.uniform(0.05, 0.6, size=2)
    final = me.iterate_raw(me.State2D(x0, y0, me.RAW), p, 100_000)
    stepped = me.step_raw(final, p)
    assert abs(stepped.x - final.x) < 1e-12 and abs(stepped.y - final.y) < 1e-12
    assert min(abs(final.x), abs(final.y)) < 1e-8  # landed on one of the axes
    assert max(abs(final.x), abs(final.y)) > 0.1


def test_raw_iteration_rejects_initial_conditions_outside_unit_box():
    p = params_for(1.0)
    with pytest.raises(ValueError, match="initial conditions"):
        me.iterate_raw(me.State2D(1.2, 0.0, me.RAW), p, 10)


def test_frame_mismatch_rejected():
    p = params_for(1.0)
    with pytest.raises(ValueError, match="raw"):
        me.step_raw(me.State2D(0.1, 0.1, me.RESCALED), p)
    with pytest.raises(ValueError, match="rescaled"):
        me.step_transformed(me.State2D(0.1, 0.1, me.RAW), p)
    with pytest.raises(ValueError):
        me.potential(me.State2D(0.1, 0.1, me.RAW), p)


def test_rescale_origin_and_uniform_case():
    p = params_for(1.0)
    s = me.rescale(me.State2D(0.0, 0.0, me.RAW), p)
    assert (s.x, s.y) == (0.0, 0.0)
    # tau1 == tau2: both axes scale by the same 1/sqrt(tau)
    s = me.rescale(me.State2D(0.3, -0.2, me.RAW), p)
    factor = 1.0 / np.sqrt(0.05)
    assert s.x == pytest.approx(0.3 * factor, rel=1e-15)
    assert s.y == pytest.approx(-0.2 * factor, rel=1e-15)


def test_rescale_round_trip():
    p = me.MapParams(tau1=0.05, tau2=0.04, a=0.25, b=0.5)
    start = me.State2D(0.3, -0.2, me.RAW)
    back = me.unrescale(me.rescale(start, p), p)
    assert back.x == pytest.approx(0.3, abs=1e-14)
    assert back.y == pytest.approx(-0.2, abs=1e-14)
    assert back.frame == me.RAW


# ---------------------------------------------------------------------------
# potential and gradient
# ---------------------------------------------------------------------------

def test_potential_reference_values(symmetric_params):
    p = symmetric_params
    assert me.potential(me.State2D(0.0, 0.0), p) == 0.0
    # closed form at the critical points: U = -(x^2 + y^2)/4 there
    fp, sp_plus, _ = me.escape_anchors(p)
    assert me.potential(fp.location, p) == pytest.approx(-1.0, abs=1e-12)
    assert me.potential(sp_plus.location, p) == pytest.approx(-2.0 / 3.0, abs=1e-12)


def test_gradient_hand_value(symmetric_params):
    # dU/dx = -x + a (tau2/tau1) x^3 + b x y^2 at (1, 1): -1 + a + b
    gx, gy = me.potential_grad(me.State2D(1.0, 1.0), symmetric_params)
    assert gx == pytest.approx(-0.25, abs=1e-15)
    assert gy == pytest.approx(-0.25, abs=1e-15)


def test_gradient_vanishes_at_critical_points(symmetric_params):
    for pt in me.fixed_points(symmetric_params):
        gx, gy = me.potential_grad(pt.location, symmetric_params)
        assert np.hypot(gx, gy) <= 1e-10


def test_gradient_matches_finite_differences(rng):
    p = me.MapParams(tau1=0.04, tau2=0.05, a=0.25, b=0.5)
    h = 1e-5
    pts = rng.uniform(-3.0, 3.0, size=(1000, 2))
    gx, gy = me.potential_grad_xy(pts[:, 0], pts[:, 1], p)
    fx = (potential_col(pts[:, 0] + h, pts[:, 1], p) - potential_col(pts[:, 0] - h, pts[:, 1], p)) / (2 * h)
    fy = (potential_col(pts[:, 0], pts[:, 1] + h, p) - potential_col(pts[:, 0], pts[:, 1] - h, p)) / (2 * h)
    denom = np.maximum(np.hypot(gx, gy), 1e-12)
    rel = np.hypot(gx - fx, gy - fy) / denom
    assert rel.max() <= 1e-6


def potential_col(x, y, p):
    return me.potential_xy(x, y, p)


def test_potential_exchange_symmetry(rng):
    p = me.MapParams(tau1=0.03, tau2=0.05, a=0.25, b=0.5)
    q = me.MapParams(tau1=0.05, tau2=0.03, a=0.25, b=0.5)
    pts = rng.uniform(-3.0, 3.0, size=(200, 2))
    u_p = me.potential_xy(pts[:, 0], pts[:, 1], p)
    u_q = me.potential_xy(pts[:, 1], pts[:, 0], q)
    np.testing.assert_allclose(u_p, u_q, rtol=1e-13, atol=1e-13)


# ---------------------------------------------------------------------------
# transformed map
# ---------------------------------------------------------------------------

def test_transformed_step_fixes_stable_fp(symmetric_params):
    fp, _, _ = me.escape_anchors(symmetric_params)
    stepped = me.step_transformed(fp.location, symmetric_params)
    assert abs(stepped.x - fp.location.x) < 1e-12
    assert abs(stepped.y - fp.location.y) < 1e-12


def test_transformed_step_equals_gradient_descent(rng):
    p = me.MapParams(tau1=0.04, tau2=0.05, a=0.25, b=0.5)
    pts = rng.uniform(-2.5, 2.5, size=(100, 2))
    for x, y in pts:
        xn, yn = _step_transformed_xy(x, y, p)
        gx, gy = me.potential_grad_xy(x, y, p)
        assert abs(xn - (x - p.tau1 * gx)) <= 1e-14
        assert abs(yn - (y - p.tau2 * gy)) <= 1e-14


def test_noisy_trajectories_deterministic(symmetric_params):
    p = symmetric_params.with_epsilon(0.01)
    runs = []
    for _ in range(2):
        stream = me.NoiseStream(42, 0, p.epsilon)
        s = me.State2D(2.0, 0.0)
        runs.append([(s := me.step_transformed(s, p, stream.pair())).x for _ in range(200)])
    assert runs[0] == runs[1]


def test_noiseless_interior_starts_reach_stable_axis_fp(symmetric_params):
    rng = np.random.default_rng(3)
    attractors = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0]])
    for _ in range(10):
        x, y = rng.uniform(-2.5, 2.5, size=2)
        if min(abs(x), abs(y)) < 0.05 or abs(abs(x) - abs(y)) < 0.05:
            continue  # skip axes and the separatrix diagonal
        final = me.iterate_transformed(me.State2D(x, y), symmetric_params, 20_000)
        dist = np.hypot(attractors[:, 0] - final.x, attractors[:, 1] - final.y)
        assert dist.min() < 1e-6


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

def test_fixed_points_symmetric_catalog(symmetric_params):
    pts = me.fixed_points(symmetric_params)
    assert len(pts) == 9
    kinds = [p.kind for p in pts]
    assert kinds.count(me.STABLE_FP) == 4
    assert kinds.count(me.SADDLE) == 4
    assert kinds.count(me.UNSTABLE_ORIGIN) == 1
    axis = sorted(abs(p.location.x) + abs(p.location.y) for p in pts if p.kind == me.STABLE_FP)
    np.testing.assert_allclose(axis, 2.0, atol=1e-12)
    root = np.sqrt(4.0 / 3.0)  # 1.1547005383792515
    for p in pts:
        if p.kind == me.SADDLE:
            assert abs(p.location.x) == pytest.approx(root, abs=1e-10)
            assert abs(p.location.y) == pytest.approx(root, abs=1e-10)


def test_fixed_point_residuals_below_tolerance():
    for tau12 in (0.8, 1.0, 1.2):
        p = params_for(tau12)
        for pt in me.fixed_points(p):
            stepped = me.step_transformed(pt.location, p)
            res = max(abs(stepped.x - pt.location.x), abs(stepped.y - pt.location.y))
            assert res <= 1e-10


def test_origin_unstable(symmetric_params):
    origin = me.fixed_points(symmetric_params)[0]
    assert origin.kind == me.UNSTABLE_ORIGIN
    assert all(abs(e) > 1.0 for e in origin.eigenvalues)


def test_x_axis_fp_destabilizes_below_window():
    # transverse eigenvalue 1 + tau2 (1 - (b/a) tau12) crosses 1 at tau12 = a/b
    p = params_for(0.4)
    with pytest.warns(UserWarning, match="no coexistence"):
        pts = me.fixed_points(p)
    x_axis = next(q for q in pts if abs(q.location.y) < 1e-12 and q.location.x > 0)
    assert x_axis.kind != me.STABLE_FP
    expected = 1.0 + p.tau2 * (1.0 - (p.b / p.a) * p.tau12)
    assert max(x_axis.eigenvalues) == pytest.approx(expected, abs=1e-9)


def test_coexistence_window_boundary_scan():
    # b > a: saddles exist exactly for a/b < tau12 < b/a
    lo, hi = 0.5, 2.0
    for tau12 in (0.45, 0.5, 2.0, 2.2):
        assert not me.coexistence_window(params_for(tau12, tau=0.02))
    for tau12 in (0.55, 1.0, 1.9):
        assert me.coexistence_window(params_for(tau12, tau=0.02))
    assert not me.coexistence_window(
        me.MapParams(tau1=0.05, tau2=0.05, a=0.25, b=0.25)
    )
    # counts follow the window
    with pytest.warns(UserWarning, match="no coexistence"):
        assert len(me.fixed_points(params_for(lo - 0.05, tau=0.02))) == 5
    assert len(me.fixed_points(params_for((lo + hi) / 2, tau=0.02))) == 9


# ---------------------------------------------------------------------------
# noise streams
# ---------------------------------------------------------------------------

def test_noise_stream_zero_variance_draws_zero():
    ns = me.NoiseStream(1, 0, 0.0)
    assert all(ns.sample() == 0.0 for _ in range(5))


def test_noise_stream_rejects_negative_variance():
    with pytest.raises(ValueError):
        me.NoiseStream(1, 0, -0.1)


def test_noise_stream_deterministic_and_call_granularity_free():
    a = me.NoiseStream(7, 3, 0.04)
    b = me.NoiseStream(7, 3, 0.04)
    first = [a.sample() for _ in range(1000)]
    second = list(np.sqrt(0.04) * b.standard_block(1000, dim=1)[:, 0])
    assert first == second


def test_noise_streams_independent_across_ids():
    a = me.NoiseStream(7, 0, 1.0).standard_block(2000, dim=1)[:, 0]
    b = me.NoiseStream(7, 1, 1.0).standard_block(2000, dim=1)[:, 0]
    assert not np.array_equal(a, b)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.08


def test_noise_sample_moments():
    eps = 0.04
    ns = me.NoiseStream(2024, 0, eps)
    draws = np.sqrt(eps) * ns.standard_block(10 ** 6, dim=1)[:, 0]
    assert abs(draws.mean()) <= 4.0 * np.sqrt(eps / 10 ** 6)
    assert abs(draws.var() - eps) <= 0.02 * eps
    assert me.noise_sample(me.NoiseStream(5, 1, eps)) == me.NoiseStream(5, 1, eps).sample()
