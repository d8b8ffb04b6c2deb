import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from twomatrix.errors import AxisError, RegimeError
from twomatrix.spectral_curve import (
    ModelParams,
    branch_points,
    classify_phase,
    classify_subregion,
    doubled_coefficients,
    doubled_factored,
    endpoints,
    limit_coefficients,
    sheet_roots,
    symbol_doubled,
    symbol_onecut,
    xi_critical,
    xi_star,
)

ts = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False)
taus = st.floats(min_value=0.3, max_value=2.5)
xis = st.floats(min_value=0.02, max_value=5.0)


def onecut_reference(t, tau, xi):
    """a, b, c and the branch points alpha, gamma from the critical points of s1."""
    with mp.workdps(30):
        t, tau, xi = mp.mpf(t), mp.mpf(tau), mp.mpf(xi)
        g = tau**2 - t
        a = (g + mp.sqrt(g * g + 12 * xi)) / 6
        b, c = tau**2 * a + xi, tau**2 * a**3
        s1 = lambda w: w + b / w + c / w**3  # noqa: E731
        u = mp.sqrt((b + mp.sqrt(b * b + 12 * c)) / 2)
        v = mp.sqrt((mp.sqrt(b * b + 12 * c) - b) / 2)
        return float(a), float(b), float(c), float(s1(u)), float(abs(s1(1j * v)))


def doubled_critical_values(t, tau, xi):
    """Real critical values of the factored two-cut symbol, by high-precision roots."""
    with mp.workdps(30):
        t, tau, xi = mp.mpf(t), mp.mpf(tau), mp.mpf(xi)
        k = tau**2 * (tau**2 - t)
        # w s'(w) - 3 s(w) numerator for s = (w+xi)^2 (w^2 + k w + tau^4 xi) / w^3
        num = [1, 2 * xi + k, xi**2 + 2 * k * xi + tau**4 * xi, k * xi**2 + 2 * tau**4 * xi**2, tau**4 * xi**3]
        deriv = [(4 - i) * c for i, c in enumerate(num[:-1])]
        # critical points solve w N'(w) - 3 N(w) = 0
        poly = [0] * 5
        for i, c in enumerate(deriv):
            poly[i] += c
        poly = [poly[i] - 3 * num[i] for i in range(5)]
        roots = mp.polyroots(poly, maxsteps=200, extraprec=60)
        vals = []
        for r in roots:
            if abs(mp.im(r)) < mp.mpf(10) ** -20:
                w = mp.re(r)
                vals.append(float((w + xi) ** 2 * (w * w + k * w + tau**4 * xi) / w**3))
        return sorted(vals)


# -- parameters and critical values ------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0.0, 0.0)
    with pytest.raises(ValueError):
        ModelParams(np.inf, 1.0)


@pytest.mark.parametrize("t, tau, expected", [(0, 1, 0.25), (-2, 1, 2.25), (1, 1, 0.0), (3, 1, 0.0)])
def test_xi_critical(t, tau, expected):
    assert xi_critical(ModelParams(t, tau)) == pytest.approx(expected, abs=1e-15)


def test_x_star_and_y_star():
    assert ModelParams(3.0, 1.0).y_star == pytest.approx(2.0, rel=1e-14)
    assert ModelParams(-3.0, 1.0).x_star == pytest.approx(2.0, rel=1e-14)
    assert ModelParams(0.0, 1.0).x_star == 0.0 == ModelParams(0.0, 1.0).y_star


# -- limit coefficients -----------------------------------------------------

def test_one_cut_limits_at_unit_ratio():
    lc = limit_coefficients(ModelParams(0.0, 1.0), 1.0)
    a, b, c, _, _ = onecut_reference(0.0, 1.0, 1.0)
    assert lc.regime == "one-cut"
    assert lc.a == pytest.approx(0.7675919, abs=1e-7)
    assert (lc.a, lc.b, lc.c) == pytest.approx((a, b, c), rel=1e-14)
    # frozen: c = a^3 with a = (1 + sqrt 13)/6
    assert lc.c == pytest.approx(0.4522630574417770, abs=1e-15)


def test_two_cut_limits_exact():
    lc = limit_coefficients(ModelParams(0.0, 1.0), 0.16)
    assert lc.regime == "two-cut"
    got = (lc.a0, lc.a1, lc.b0, lc.b1, lc.c0, lc.c1)
    assert got == pytest.approx((0.2, 0.8, 0.36, 0.96, 0.032, 0.128), abs=1e-14)


def test_limits_meet_at_critical_value():
    p = ModelParams(0.0, 1.0)
    lc = limit_coefficients(p, 0.25)
    assert lc.a == pytest.approx(0.5, abs=1e-15)
    below = limit_coefficients(p, 0.25 * (1 - 1e-12))
    assert below.a0 == pytest.approx(0.5, abs=1e-5) and below.a1 == pytest.approx(0.5, abs=1e-5)


def test_limit_coefficients_reject_nonpositive_xi():
    with pytest.raises(ValueError):
        limit_coefficients(ModelParams(0.0, 1.0), 0.0)


@given(ts, taus, st.floats(min_value=0.01, max_value=0.99))
def test_two_cut_identities(t, tau, frac):
    p = ModelParams(t, tau)
    assume(p.xi_cr > 1e-3)
    xi = frac * p.xi_cr
    lc = limit_coefficients(p, xi)
    assert 0 < lc.a0 <= lc.a1
    assert lc.a0 + lc.a1 == pytest.approx(tau**2 - t, rel=1e-12)
    assert lc.a0 * lc.a1 == pytest.approx(xi, rel=1e-10)
    assert lc.b0 == pytest.approx(tau**2 * lc.a0 + xi, rel=1e-10, abs=1e-12)
    assert lc.b1 == pytest.approx(tau**2 * lc.a1 + xi, rel=1e-10, abs=1e-12)


@given(ts, taus, xis)
def test_one_cut_identities(t, tau, xi):
    p = ModelParams(t, tau)
    assume(xi >= p.xi_cr)
    lc = limit_coefficients(p, xi)
    assert lc.a > 0
    assert lc.b == pytest.approx(tau**2 * lc.a + xi, rel=1e-12)
    assert lc.c == pytest.approx(tau**2 * lc.a**3, rel=1e-12)
    # a solves the cubic relation a (3a + t - tau^2) = xi of the constant recurrence
    assert lc.a * (3 * lc.a + t - tau**2) == pytest.approx(xi, rel=1e-10)


# -- symbols ------------------------------------------------------------------

def test_symbol_onecut_coefficients():
    s = symbol_onecut(ModelParams(0.0, 1.0), 1.0)
    assert (s.d0, s.d2) == (0.0, 0.0)
    assert s.d1 == pytest.approx(1.7675919, abs=1e-7)


def test_symbol_onecut_regime_error():
    with pytest.raises(RegimeError):
        symbol_onecut(ModelParams(0.0, 1.0), 0.1)


def test_symbol_onecut_is_odd_with_imaginary_zeros():
    s = symbol_onecut(ModelParams(0.0, 1.0), 1.0)
    w = np.array([0.3 + 0.4j, 1.2, -2.0j])
    np.testing.assert_allclose(s(-w), -s(w), rtol=1e-14)
    zeros = np.roots([1, 0, s.d1, 0, s.d3])
    np.testing.assert_allclose(zeros.real, 0.0, atol=1e-12)


def test_symbol_doubled_two_cut_exact():
    s = symbol_doubled(ModelParams(0.0, 1.0), 0.16)
    np.testing.assert_allclose(s.coefficients, [1.32, 0.5056, 0.0768, 0.004096], atol=1e-12)


def test_symbol_doubled_one_cut():
    p = ModelParams(0.0, 1.0)
    s = symbol_doubled(p, 1.0)
    s1 = symbol_onecut(p, 1.0)
    w = np.exp(1j * np.linspace(0.1, 3.0, 20)) * 1.3
    np.testing.assert_allclose(s(w**2), s1(w) ** 2, rtol=1e-12)
    # frozen from a = (1 + sqrt 13)/6, b = a + 1, c = a^3
    np.testing.assert_allclose(
        s.coefficients, [3.535183758487996, 4.028907166452883, 1.598833015232294, 0.2045418731265841], rtol=1e-14
    )


@given(ts, taus, st.floats(min_value=0.02, max_value=0.98))
def test_two_cut_factorization(t, tau, frac):
    p = ModelParams(t, tau)
    assume(p.xi_cr > 1e-2)
    xi = frac * p.xi_cr
    s = symbol_doubled(p, xi)
    w = np.exp(1j * np.linspace(0.2, 6.0, 30)) * np.linspace(0.3, 3.0, 30)
    ref = doubled_factored(p, xi, w)
    assert np.max(np.abs(s(w) - ref) / (1 + np.abs(ref))) <= 1e-10


@pytest.mark.parametrize("t, tau", [(0.0, 1.0), (-2.0, 1.4), (-3.0, 1.0), (0.5, 2.0)])
def test_doubled_square_identity_at_critical_value(t, tau):
    p = ModelParams(t, tau)
    xc = p.xi_cr
    w = np.exp(1j * np.linspace(0.1, 6.0, 40)) * np.linspace(0.4, 2.5, 40)
    s1 = symbol_onecut(p, xc)
    lhs = doubled_factored(p, xc, w**2)
    assert np.max(np.abs(lhs - s1(w) ** 2) / (1 + np.abs(lhs))) <= 1e-10
    below = doubled_coefficients(p, xc * (1 - 1e-13))
    above = doubled_coefficients(p, xc)
    np.testing.assert_allclose(below, above, rtol=1e-9, atol=1e-12)


# -- classification ---------------------------------------------------------------

@pytest.mark.parametrize(
    "t, tau, xi, expected",
    [(0, 1, 0.16, "C2c"), (-3, 1, 1, "C2b"), (-3, 1, 3.5, "C2a"), (0, 1, 0.5, "C1"),
     (0, 1, 0.25, "boundary"), (-3, 1, 3.0, "boundary")],
)
def test_classify_subregion(t, tau, xi, expected):
    assert classify_subregion(ModelParams(t, tau), xi) == expected


@pytest.mark.parametrize(
    "t, tau, case",
    [(0, 1, "I"), (3, 1, "I"), (-1, 1, "multicritical"), (-2, 1.4, "III"), (-2, 0.5, "II"),
     (0, 2, "IV"), (0.5, 2.0, "IV"), (-3, 0.4, "II"), (-0.5, 2.0, "III")],
)
def test_classify_phase_sample_points(t, tau, case):
    assert classify_phase(ModelParams(t, tau)).case == case


def test_critical_curves_are_labelled():
    # tau = sqrt(t + 2) has xi_cr = 1; tau = sqrt(-1/t) puts the ray at 1
    assert classify_phase(ModelParams(0.0, math.sqrt(2.0))).case == "critical-curve"
    assert classify_phase(ModelParams(-4.0, 0.5)).case == "critical-curve"


@given(ts, taus)
def test_case_agrees_with_region_inequalities(t, tau):
    p = ModelParams(t, tau)
    xc, ray = p.xi_cr, -t * tau**2
    assume(abs(xc - 1) > 1e-6 and abs(ray - 1) > 1e-6)
    case = classify_phase(p).case
    if xc < 1:
        assert case == "I"
    elif t < 0 and ray > 1:
        assert case == "III"
    elif t < -tau**2:
        assert case == "II"
    else:
        assert case == "IV"


# -- branch points ------------------------------------------------------------------

def test_one_cut_branch_points():
    bd = branch_points(ModelParams(0.0, 1.0), 1.0)
    _, _, _, alpha, gamma = onecut_reference(0.0, 1.0, 1.0)
    assert bd.regime == "one-cut" and bd.beta == 0 and bd.delta == 0
    assert bd.alpha == pytest.approx(alpha, rel=1e-12)
    assert bd.gamma == pytest.approx(gamma, rel=1e-12)
    assert bd.alpha == pytest.approx(2.81156, abs=1e-5) and bd.gamma == pytest.approx(0.53551, abs=1e-5)
    assert bd.gamma1.intervals == ((-bd.alpha, bd.alpha),)
    assert bd.gamma3.intervals == ((-math.inf, math.inf),)


@pytest.mark.parametrize("t, tau, xi", [(0, 1, 0.16), (-2, 1, 0.3), (0, 2, 1.0), (-3, 1, 3.5), (-3, 1, 1.0)])
def test_two_cut_branch_points_are_critical_values(t, tau, xi):
    bd = branch_points(ModelParams(t, tau), xi)
    assert bd.regime == "two-cut"
    ref = doubled_critical_values(t, tau, xi)
    assert bd.hat_alpha == pytest.approx(max(ref), rel=1e-10)
    for name in ("hat_beta", "hat_gamma", "hat_delta"):
        v = getattr(bd, name)
        if v != 0.0:
            assert min(abs(v - r) for r in ref) <= 1e-10 * (1 + abs(v)), name
    assert bd.alpha == pytest.approx(math.sqrt(bd.hat_alpha), rel=1e-14)
    assert bd.gamma == pytest.approx(math.sqrt(-bd.hat_gamma), rel=1e-14)
    assert bd.alpha > bd.beta >= 0


def test_two_cut_c2c_has_full_third_support():
    bd = branch_points(ModelParams(0.0, 1.0), 0.16)
    assert bd.delta == 0.0 and bd.beta > 0 and bd.gamma > 0


def test_small_xi_limits_for_large_t():
    p = ModelParams(3.0, 1.0)
    bd = branch_points(p, 1e-8)
    assert bd.alpha < 1e-2
    assert bd.gamma == pytest.approx(p.y_star, abs=1e-3)


@given(ts, taus, xis)
def test_supports_are_disjoint(t, tau, xi):
    p = ModelParams(t, tau)
    assume(abs(xi - p.xi_cr) > 1e-6 and abs(xi - p.ray) > 1e-6)
    assume(abs(t + 1) > 1e-3 or abs(tau - 1) > 1e-3)
    bd = branch_points(p, xi)
    # Gamma_1 and Gamma_3 live on R, Gamma_2 on iR: they can only touch at the origin
    assert not (bd.beta == 0 and bd.gamma == 0)
    assert not (bd.gamma == 0 and bd.delta == 0)
    assert bd.alpha > bd.beta >= 0
    assert bd.gamma >= 0 and bd.delta >= 0


@pytest.mark.parametrize("t, tau", [(0.0, 1.0), (-2.0, 1.4), (-3.0, 1.0)])
def test_branch_points_continuous_across_critical_value(t, tau):
    p = ModelParams(t, tau)
    h = 1e-10
    lo, hi = endpoints(p, p.xi_cr * (1 - h)), endpoints(p, p.xi_cr * (1 + h))
    for key in ("alpha", "gamma"):
        assert abs(lo[key][0] - hi[key][0]) <= 1e-8


@given(ts, taus)
def test_alpha_increasing(t, tau):
    p = ModelParams(t, tau)
    xi = np.geomspace(1e-3, 6.0, 80)
    xi = xi[np.abs(xi - p.xi_cr) > 1e-9]
    a = endpoints(p, xi)["alpha"]
    assert np.all(np.diff(a) > 0)


# -- roots on the sheets ------------------------------------------------------------

@pytest.mark.parametrize("t, tau, xi", [(0, 1, 0.16), (0, 1, 1.0), (-2, 1, 0.3), (3, 1, 0.5)])
def test_sheet_roots_solve_the_curve(t, tau, xi):
    p = ModelParams(t, tau)
    # off both axes, where conjugate roots can swap labels under a real step
    z = np.array([0.3 + 0.2j, 1.7 - 0.4j, 0.5 + 0.8j, -0.6 + 2.5j, 0.4 + 0.9j])
    w, dw = sheet_roots(p, xi, z)
    if xi >= p.xi_cr:
        s = symbol_onecut(p, xi)
        np.testing.assert_allclose(s(w), np.broadcast_to(z[:, None], w.shape), atol=1e-10)
    else:
        np.testing.assert_allclose(doubled_factored(p, xi, w), np.broadcast_to((z * z)[:, None], w.shape),
                                   atol=1e-9)
    h = 1e-6
    wp, _ = sheet_roots(p, xi, z + h)
    wm, _ = sheet_roots(p, xi, z - h)
    np.testing.assert_allclose((wp - wm) / (2 * h), dw, rtol=1e-5, atol=1e-7)


# -- xi* ----------------------------------------------------------------------------

def test_xi_star_origin_at_t0_is_critical_value():
    assert xi_star(ModelParams(0.0, 1.0), 0.0, 1) == pytest.approx(0.25, abs=1e-9)


def test_xi_star_inverts_alpha():
    p = ModelParams(0.0, 1.0)
    a1 = endpoints(p, 1.0)["alpha"][0]
    assert xi_star(p, a1, 1) == pytest.approx(1.0, abs=1e-9)


def test_xi_star_for_gamma_solves_gamma_equation():
    p = ModelParams(0.0, 1.0)
    y = 0.3
    xs = xi_star(p, 1j * y, 2)
    assert endpoints(p, xs)["gamma"][0] == pytest.approx(y, abs=1e-8)


def test_xi_star_axis_check():
    with pytest.raises(AxisError):
        xi_star(ModelParams(0.0, 1.0), 1j, 1)
