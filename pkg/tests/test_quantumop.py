import math

import numpy as np
import pytest

from polarsuper import catalog, quantumop as Q
from polarsuper import jets as J
from polarsuper.errors import ClassicalModeError, ConfigurationError
from polarsuper.jets import Jet
from polarsuper.phasecore import AngularProfile, PhasePoint, PotentialModel, UFunc, ZeroRadial
from polarsuper.specfun import WeierstrassParams
from polarsuper.ybuilder import YCoeffs, eval_Y_classical

PTS = np.array([[0.7, 0.3], [1.1, -0.4], [-0.5, 0.9], [0.2, 1.3]])


def free(hbar=1.0):
    return PotentialModel(ZeroRadial(), AngularProfile(UFunc(lambda t: 0.0 * t)), hbar=hbar)


def _jets(pts, order):
    return Jet.variable(pts[:, 0], 0, order), Jet.variable(pts[:, 1], 1, order)


def test_free_hamiltonian_on_gaussian():
    H = Q.build_H_op(free(0.7))
    X, Y = _jets(PTS, 2)
    out = H(J.exp(-X * X - Y * Y), X, Y).value
    x, y = PTS.T
    lap = (4 * (x * x + y * y) - 4) * np.exp(-x * x - y * y)
    np.testing.assert_allclose(out, -0.5 * 0.49 * lap, rtol=1e-13)


def test_H_real_on_real_function():
    m = catalog.make_calogero(0.7, hbar=1.0)
    X, Y = _jets(PTS[:2], 2)
    out = Q.build_H_op(m)(J.exp(-X * X - 0.5 * Y * Y), X, Y).value
    assert np.all(np.isreal(out)) or np.max(np.abs(np.imag(out))) == 0


def test_H_hermitian_by_quadrature():
    m = catalog.make_smoro1(0.5, 0.0, 0.0, hbar=1.0)
    H = Q.build_H_op(m)
    phi = Q.TestFunction((0.3, -0.2), (0.8, 1.1), (((1, 0), 1.0), ((0, 2), 0.5)))
    psi = Q.TestFunction((-0.4, 0.1), (1.2, 0.7), (((0, 0), 1.0), ((1, 1), -0.3)))
    g = np.linspace(-7, 7, 140)  # even count keeps the origin off the grid
    xx, yy = np.meshgrid(g, g, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    X, Y = _jets(pts, 2)
    Hpsi = H(psi(X, Y), X, Y).value
    Hphi = H(phi(X, Y), X, Y).value
    w = (g[1] - g[0]) ** 2
    lhs = np.sum(phi(pts[:, 0], pts[:, 1]) * Hpsi) * w
    rhs = np.sum(Hphi * psi(pts[:, 0], pts[:, 1])) * w
    assert abs(lhs - rhs) < 1e-6 * max(1.0, abs(lhs))


def test_classical_models_rejected():
    with pytest.raises(ClassicalModeError):
        Q.build_H_op(free(0.0))
    with pytest.raises(ClassicalModeError):
        Q.build_Y_op(YCoeffs(A1=1), None, None, 0.0)


def test_Y_A1_on_cubic_monomial():
    h = 0.8
    Yop = Q.build_Y_op(YCoeffs(A1=1.0), None, None, h)
    X, Y = _jets(PTS, 3)
    out = Yop(X ** 3, X, Y).value
    # 2 (p1^3 - 3 p1 p2^2) x^3 = 2 (i hbar^3) * 6
    np.testing.assert_allclose(out, 2 * 1j * h ** 3 * 6, rtol=1e-14)


def test_canonical_anticommutator():
    h = 0.6
    Yop = Q.build_Y_op(YCoeffs(), lambda x, y: x, None, h)
    X, Y = _jets(PTS, 1)
    f = J.exp(-X * X - Y * Y)
    out = Yop(f, X, Y).value
    x, y = PTS.T
    fx = -2 * x * np.exp(-x * x - y * y)
    expect = -1j * h * (2 * x * fx + np.exp(-x * x - y * y))
    np.testing.assert_allclose(out, expect, rtol=1e-14)


def test_operator_order_check():
    Yop = Q.build_Y_op(YCoeffs(A1=1.0), None, None, 1.0)
    X, Y = _jets(PTS, 2)
    with pytest.raises(ConfigurationError):
        Yop(X * Y, X, Y)


@pytest.mark.parametrize("p", [(0.8, 0.3, 0.4, -0.7), (-0.5, 1.2, 1.1, 0.2)])
def test_symbol_matches_classical_Y(p):
    c = YCoeffs(A1=0.3, A4=-0.2, B0=0.5, B2=0.1, C1=1.0, C2=-0.4, D0=0.7)
    g1 = lambda x, y: x * y + 0.3 * y ** 2  # noqa: E731
    g2 = lambda x, y: J.sin(x) - y  # noqa: E731
    sym = Q.symbol_of(lambda h: Q.build_Y_op(c, g1, g2, h), *p)
    cl = eval_Y_classical(c, g1, g2, PhasePoint(*p))
    assert abs(sym - 2 * cl) < 1e-12 * max(1.0, abs(cl))


def test_free_commutator_vanishes(rng):
    m = free()
    tests = Q.random_test_functions(rng, PTS, 4)
    st = Q.commutator_residual(Q.build_H_op(m), Q.build_Y_op(YCoeffs(A1=1.0), None, None, 1.0),
                               tests, PTS)
    assert st.sup < 1e-13


@pytest.fixture(scope="module")
def calogero_setup():
    rng = np.random.default_rng(7)
    m = catalog.make_calogero(0.7, hbar=1.0)
    pts = Q.sample_domain_points(m, 40, rng)
    tests = Q.random_test_functions(rng, pts, 6)
    return m, pts, tests


def test_calogero_commutator(calogero_setup):
    m, pts, tests = calogero_setup
    st = Q.commutator_residual(Q.build_H_op(m), Q.build_integral_ops(m)[0], tests, pts)
    assert st.sup < 1e-7
    assert st.n_points == 240 and len(st.per_test) == 6


def test_calogero_wrong_g1_fails(calogero_setup):
    m, pts, tests = calogero_setup
    I = m.integral
    Yop = Q.build_Y_op(I.coeffs, lambda x, y: 1.01 * I.g1(x, y), I.g2, m.hbar)
    assert Q.commutator_residual(Q.build_H_op(m), Yop, tests, pts).sup > 1e-3


def test_commutator_scales_linearly(calogero_setup):
    m, pts, tests = calogero_setup
    I = m.integral
    # a non-commuting operator, so the values are well above roundoff
    H, Yop = Q.build_H_op(m), Q.build_Y_op(I.coeffs, lambda x, y: 1.01 * I.g1(x, y), I.g2, m.hbar)
    c1 = Q.commutator_values(H, Yop, tests[0], pts[:5])[0]
    c2 = Q.commutator_values(H, Yop, tests[0].scaled(3.0), pts[:5])[0]
    np.testing.assert_allclose(c2, 3.0 * c1, rtol=1e-12, atol=1e-13 * np.max(np.abs(c1)))


def test_X_commutes_for_separable_model(calogero_setup):
    m, pts, tests = calogero_setup
    st = Q.commutator_residual(Q.build_H_op(m), Q.build_X_op(m), tests, pts)
    assert st.sup < 1e-9


def test_weierstrass_general_commutator(rng):
    m = catalog.make_weierstrass_general(ZeroRadial(), WeierstrassParams(4.0, 1.0), 1.0)
    pts = Q.sample_domain_points(m, 20, rng)
    tests = Q.random_test_functions(rng, pts, 3)
    assert Q.commutator_residual(Q.build_H_op(m), Q.build_integral_ops(m)[0], tests, pts).sup < 1e-7


def test_weierstrass_c1_degenerate_commutators(rng):
    m = catalog.make_weierstrass_c1(None, 1.0, -2.0, 0.0, 0.0)
    pts = Q.sample_domain_points(m, 20, rng, theta_window=(0.3, 1.5))
    tests = Q.random_test_functions(rng, pts, 3)
    H = Q.build_H_op(m)
    for Yop in Q.build_integral_ops(m):
        assert Q.commutator_residual(H, Yop, tests, pts).sup < 1e-6


def test_p6_commutator(p6_solution, rng):
    p, sol = p6_solution
    m = catalog.make_p6_potential(p, sol, branch=1, hbar=1.0, beta2=0.1)
    lo, hi = m.meta["theta_window"]
    pad = 0.05 * (hi - lo)
    pts = Q.sample_domain_points(m, 20, rng, theta_window=(lo + pad, hi - pad))
    tests = Q.random_test_functions(rng, pts, 3)
    assert Q.commutator_residual(Q.build_H_op(m), Q.build_integral_ops(m)[0], tests, pts).sup < 1e-5


def test_sample_points_avoid_singular_rays(rng):
    m = catalog.make_calogero(0.7, hbar=1.0)
    pts = Q.sample_domain_points(m, 200, rng)
    th = np.arctan2(pts[:, 1], pts[:, 0])
    assert np.min(np.abs(np.sin(3 * th))) > math.sin(3 * 0.1) - 1e-12
