import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarsuper import jets as J
from polarsuper.jets import Jet

xs = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def uvar(x, order=6):
    return Jet.variable(np.asarray(x, float), 0, order, nvars=1)


def test_sin_derivatives_cycle():
    d = J.sin(uvar(0.3)).derivatives()
    expect = [math.sin(0.3), math.cos(0.3), -math.sin(0.3), -math.cos(0.3)] * 2
    np.testing.assert_allclose(d, expect[:7], rtol=0, atol=1e-14)


def test_product_rule_mixed_partial():
    x = Jet.variable(0.7, 0, 4)
    y = Jet.variable(-0.4, 1, 4)
    f = J.exp(x * y)
    # d^2/dx dy exp(xy) = (1 + xy) exp(xy)
    assert f.partial(1, 1) == pytest.approx((1 - 0.28) * math.exp(-0.28), rel=1e-14)
    # d^3/dx^2 dy exp(xy) = y (2 + xy) exp(xy)
    assert f.partial(2, 1) == pytest.approx(-0.4 * (2 - 0.28) * math.exp(-0.28), rel=1e-14)


@given(xs)
def test_pythagoras_on_jets(x):
    t = uvar(x)
    one = J.sin(t) ** 2 + J.cos(t) ** 2
    d = one.derivatives()
    assert abs(d[0] - 1) < 1e-14
    assert max(abs(v) for v in d[1:]) < 1e-11


@given(st.floats(min_value=0.1, max_value=5.0))
def test_exp_log_inverse(x):
    d = J.exp(J.log(uvar(x))).derivatives()
    assert d[0] == pytest.approx(x, rel=1e-14)
    assert d[1] == pytest.approx(1.0, rel=1e-13)
    # roundoff is relative to the size of the log derivatives, (k-1)!/x^k
    for k, v in enumerate(d[2:], start=2):
        assert abs(v) < 1e-13 * math.factorial(k - 1) / x ** k


@given(st.floats(min_value=0.2, max_value=4.0), st.floats(min_value=-2.5, max_value=2.5))
def test_power_matches_falling_factorial(x, p):
    d = J.power(uvar(x, 4), p).derivatives()
    for k in range(5):
        ff = math.prod(p - i for i in range(k))
        assert d[k] == pytest.approx(ff * x ** (p - k), rel=1e-11, abs=1e-12)


def test_cbrt_is_real_for_negative_arguments():
    d = J.cbrt(uvar(-8.0, 2)).derivatives()
    assert d[0] == pytest.approx(-2.0)
    assert d[1] == pytest.approx(1 / 12)


def test_atan2_and_hypot_agree_with_polar_derivatives():
    x = Jet.variable(0.6, 0, 2)
    y = Jet.variable(0.8, 1, 2)
    th = J.atan2(y, x)
    r = J.hypot(x, y)
    assert th.value == pytest.approx(math.atan2(0.8, 0.6))
    assert th.partial(1, 0) == pytest.approx(-0.8)
    assert th.partial(0, 1) == pytest.approx(0.6)
    assert r.partial(1, 0) == pytest.approx(0.6)
    assert r.partial(2, 0) == pytest.approx(0.8 ** 2)


def test_batched_jets_keep_shape():
    x = Jet.variable(np.linspace(0.1, 1.0, 7), 0, 3, nvars=1)
    f = J.sin(x) * J.exp(x)
    assert f.batch_shape == (7,)
    np.testing.assert_allclose(f.value, np.sin(x.value) * np.exp(x.value))


def test_partial_beyond_order_raises():
    with pytest.raises(ValueError):
        Jet.variable(0.1, 0, 2).partial(3, 0)


def test_taylor_ode2_reproduces_exponential():
    tj = J.taylor_ode2(lambda x, y, yp: y, 0.0, 1.0, 1.0, 10)
    np.testing.assert_allclose(tj.c, [1 / math.factorial(k) for k in range(11)], rtol=1e-14)
    assert J.eval_series(tj, 0.1) == pytest.approx(math.exp(0.1), rel=1e-14)


def test_taylor_ode2_nonautonomous():
    # y'' = x y with y = Airy-like series; check against direct recurrence
    tj = J.taylor_ode2(lambda x, y, yp: x * y, 0.5, 1.0, 0.0, 6)
    d = tj.derivatives()
    assert d[2] == pytest.approx(0.5)
    assert d[3] == pytest.approx(1.0)  # (xy)' = y + x y'
    assert d[4] == pytest.approx(2 * 0.0 + 0.5 * 0.5)  # 2y' + x y''


@pytest.mark.parametrize("k,tol", [(1, 1e-12), (2, 1e-10), (3, 1e-8), (4, 1e-6), (5, 1e-4)])
def test_fd_derivative_accuracy(k, tol):
    exact = [math.sin, math.cos, lambda t: -math.sin(t), lambda t: -math.cos(t)][k % 4](0.4)
    assert abs(J.fd_derivative(np.sin, 0.4, k) - exact) < tol
