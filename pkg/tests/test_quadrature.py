import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twomatrix.quadrature import Piece, cos_rule, gauss_legendre01, half_axis_pieces


def test_gauss_legendre_on_unit_interval():
    v, w = gauss_legendre01(10)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.dot(w, v**7) == pytest.approx(1 / 8, abs=1e-15)


def test_cos_rule_absorbs_inverse_square_root_ends():
    s, w = cos_rule(0.0, 1.0, 30)
    # int_0^1 ds / sqrt(s (1 - s)) = pi
    assert np.dot(w, 1 / np.sqrt(s * (1 - s))) == pytest.approx(math.pi, rel=1e-12)


def test_tail_piece_integrates_power_decay():
    pc = Piece("tail", 2.0, np.inf, 40)
    pc.set_density(pc.s ** (-5.0 / 3.0))
    # int_2^inf s^(-5/3) ds = (3/2) 2^(-2/3)
    assert pc.integral() == pytest.approx(1.5 * 2 ** (-2 / 3), rel=1e-12)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_partial_integral_of_constant(a, b):
    lo, hi = sorted((a, b))
    pc = Piece("cos", 0.0, 1.0, 20)
    pc.set_density(np.ones_like(pc.s))
    assert pc.integral(lo, hi) == pytest.approx(hi - lo, abs=1e-12)


@given(st.floats(0.01, 0.99))
def test_separation_matches_direct_distance(v):
    pc = Piece("cos", 1.0, 3.0, 10)
    vs = 0.37
    zeta = complex(float(pc.map(np.array([vs]))[0][0]), 0.25)
    direct = abs(zeta - pc.map(np.array([v]))[0][0])
    assert pc.separation(zeta, np.array([v]), vs)[0] == pytest.approx(direct, rel=1e-12)


def test_log_integral_on_panel_with_log_singularity():
    pc = Piece("cos", -1.0, 1.0, 40)
    pc.set_density(np.full_like(pc.s, 0.5))
    # int_{-1}^{1} log|x - s| ds / 2 at x = 0 is -1
    assert pc.log_integral(0.0 + 0j) == pytest.approx(-1.0, abs=1e-8)


def test_half_axis_pieces_merge_duplicate_breaks():
    pieces = half_axis_pieces([0.0, 1.0, 1.0, 2.0], 8, tail_from=2.0)
    assert [(p.kind, p.a) for p in pieces] == [("cos", 0.0), ("cos", 1.0), ("tail", 2.0)]
