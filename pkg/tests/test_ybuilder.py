import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarsuper import jets as J
from polarsuper.errors import ConfigurationError
from polarsuper.phasecore import AngularProfile, PhasePoint, PotentialModel, UFunc, ZeroRadial
from polarsuper.ybuilder import (AijkCoeffs, YCoeffs, coeffs_from_Aijk, eval_F, eval_G1,
                                 eval_Y_classical, f_parts, g_to_G, G_to_g, rotate_frame,
                                 rotate_point)

coef = st.floats(-3, 3)
ycoeffs = st.builds(YCoeffs, *[coef] * 10)
angle = st.floats(-7, 7)


def point_strategy():
    c = st.floats(-3, 3)
    return st.builds(PhasePoint, c, c, c, c)


def test_aijk_conversion_examples():
    assert coeffs_from_Aijk(AijkCoeffs(A030=1)) == YCoeffs(A1=0.25, A3=0.75)
    assert coeffs_from_Aijk(AijkCoeffs()) == YCoeffs()
    assert coeffs_from_Aijk(AijkCoeffs(A111=2)) == YCoeffs(B2=1)


def test_aijk_conversion_preserves_the_cubic_polynomial(rng):
    # sum A_ijk L^i p1^j p2^k must equal the YCoeffs leading polynomial
    from polarsuper.ybuilder import leading_value
    names = ["A300", "A210", "A201", "A120", "A111", "A102", "A030", "A021", "A012", "A003"]
    powers = [(3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1), (1, 0, 2), (0, 3, 0),
              (0, 2, 1), (0, 1, 2), (0, 0, 3)]
    for _ in range(20):
        vals = rng.normal(size=10)
        a = AijkCoeffs(**dict(zip(names, vals)))
        x, y, px, py = rng.normal(size=4)
        L = x * py - y * px
        direct = sum(v * L ** i * px ** j * py ** k for v, (i, j, k) in zip(vals, powers))
        assert leading_value(coeffs_from_Aijk(a), x, y, px, py) == pytest.approx(direct, rel=1e-12)


def test_eval_F_examples():
    assert eval_F(YCoeffs(A1=1), 1.0, 0.0) == pytest.approx((1, 0, -3, 0))
    assert eval_F(YCoeffs(B0=1), 2.0, 0.37) == pytest.approx((0, 1, 0, 0.25))
    assert eval_F(YCoeffs(), 1.5, 0.2) == pytest.approx((0, 0, 0, 0))


@given(ycoeffs, st.floats(-3, 3))
def test_F_radial_decomposition(c, th):
    F_a = eval_F(c, 1.0, th)
    F_b = eval_F(c, 2.0, th)
    p = f_parts(c, th)
    # F2 r - F21 is independent of r (it equals F20 r), i.e. F2 - F21/r is constant
    assert F_a[1] - p.F21 / 1.0 == pytest.approx(F_b[1] - p.F21 / 2.0, abs=1e-12)
    assert F_a[2] - p.F32 - p.F31 == pytest.approx(F_b[2] - p.F32 / 4 - p.F31 / 2, abs=1e-12)


def test_eval_G1_examples():
    zero = PotentialModel(ZeroRadial(), AngularProfile(UFunc(lambda t: 0 * t), beta=lambda t: 0 * t))
    assert eval_G1(YCoeffs(), zero, 1.0, 0.3) == 0.0
    m = PotentialModel(ZeroRadial(), AngularProfile(UFunc(lambda t: J.cos(2 * t)),
                                                    beta=UFunc(lambda t: 0.0 * t)))
    assert eval_G1(YCoeffs(B0=1), m, 1.0, math.pi / 4) == pytest.approx(2.0)


def test_eval_G1_needs_beta():
    m = PotentialModel(ZeroRadial(), AngularProfile(UFunc(lambda t: 0 * t)))
    with pytest.raises(ConfigurationError):
        eval_G1(YCoeffs(B0=1), m, 1.0, 0.2)


def test_eval_G1_against_independent_expansion(rng):
    S = UFunc(lambda t: 0.3 + 0.2 * J.sin(t) + 0.1 * J.cos(3 * t))
    beta = UFunc(lambda t: J.cos(t) - 0.5 * J.sin(2 * t))
    from polarsuper.phasecore import Coulomb
    m = PotentialModel(Coulomb(-0.7), AngularProfile(S, beta=beta))
    for _ in range(100):
        c = YCoeffs.from_array(rng.normal(size=10))
        r, t = rng.uniform(0.3, 3), rng.uniform(-3, 3)
        # recompute from the explicit F formulas
        F1 = c.A1 * math.cos(3 * t) + c.A2 * math.sin(3 * t) + c.A3 * math.cos(t) + c.A4 * math.sin(t)
        F21 = -3 * c.A1 * math.sin(3 * t) + 3 * c.A2 * math.cos(3 * t) - c.A3 * math.sin(t) + c.A4 * math.cos(t)
        F20 = c.B1 * math.cos(2 * t) + c.B2 * math.sin(2 * t) + c.B0
        Sv = 0.3 + 0.2 * math.sin(t) + 0.1 * math.cos(3 * t)
        dS = 0.2 * math.cos(t) - 0.3 * math.sin(3 * t)
        bv = math.cos(t) - 0.5 * math.sin(2 * t)
        expect = 3 * F1 * (-0.7 / r + Sv / r ** 2) - (F21 / (2 * r * r) + F20 / r) * dS + bv
        assert float(eval_G1(c, m, r, t)) == pytest.approx(expect, rel=1e-12, abs=1e-12)


def test_eval_Y_classical_examples():
    assert eval_Y_classical(YCoeffs(D0=1), None, None, PhasePoint(1, 0, 0, 2)) == 8.0
    assert eval_Y_classical(YCoeffs(A1=1), None, None, PhasePoint(0.3, -1.2, 1, 0)) == 1.0
    assert eval_Y_classical(YCoeffs(), None, None, PhasePoint(0.3, -1.2, 1, 0)) == 0.0


def test_g_terms_enter_linearly_in_momenta():
    p = PhasePoint(0.5, 0.2, 1.5, -0.5)
    val = eval_Y_classical(YCoeffs(), lambda x, y: x, lambda x, y: y * y, p)
    assert val == pytest.approx(0.5 * 1.5 + 0.04 * -0.5)


@given(ycoeffs, point_strategy(), st.floats(0.1, 3))
def test_momentum_scaling_is_cubic(c, p, lam):
    q = PhasePoint(p.x, p.y, lam * p.px, lam * p.py)
    base = eval_Y_classical(c, None, None, p)
    assert eval_Y_classical(c, None, None, q) == pytest.approx(lam ** 3 * base, rel=1e-10, abs=1e-9)


def test_rotate_frame_identities():
    c = YCoeffs.from_array(np.arange(1, 11, dtype=float))
    assert rotate_frame(c, 0.0) == c
    np.testing.assert_allclose(rotate_frame(c, 2 * math.pi).as_array(), c.as_array(), atol=1e-12)


def test_rotation_invariance_of_Y(rng):
    worst = 0.0
    for _ in range(100):
        c = YCoeffs.from_array(rng.normal(size=10))
        phi = rng.uniform(-math.pi, math.pi)
        p = PhasePoint(*rng.normal(size=4))
        a = eval_Y_classical(c, None, None, p)
        b = eval_Y_classical(rotate_frame(c, phi), None, None, rotate_point(p, phi))
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    assert worst < 1e-10


@given(ycoeffs, angle, angle)
def test_rotate_frame_composes(c, a, b):
    lhs = rotate_frame(rotate_frame(c, a), b).as_array()
    rhs = rotate_frame(c, a + b).as_array()
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * max(1, np.abs(c.as_array()).max()) * 10)


def test_singlets_unchanged_by_rotation():
    c = YCoeffs(B0=2.0, D0=-1.5, A1=1.0)
    d = rotate_frame(c, 0.7)
    assert (d.B0, d.D0) == (2.0, -1.5)


def test_zero_set_maps_to_itself(rng):
    c = YCoeffs(A1=1.0, B0=0.3)
    for _ in range(20):
        # points with Y = 0: take px = py = 0 line plus cubic root search along a ray
        p = PhasePoint(*rng.normal(size=2), 0.0, 0.0)
        phi = rng.uniform(0, 6)
        assert eval_Y_classical(rotate_frame(c, phi), None, None, rotate_point(p, phi)) == 0.0


def test_g_G_round_trip(rng):
    for _ in range(20):
        g1, g2, r, t = rng.normal(), rng.normal(), rng.uniform(0.2, 3), rng.uniform(-3, 3)
        G1, G2 = g_to_G(g1, g2, r, t)
        h1, h2 = G_to_g(G1, G2, r, t)
        assert (h1, h2) == (pytest.approx(g1, abs=1e-13), pytest.approx(g2, abs=1e-13))


def test_coefficients_must_be_finite():
    with pytest.raises(ValueError):
        YCoeffs(A1=float("inf"))
