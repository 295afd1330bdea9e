"""Special functions behind the new potentials.

* Weierstrass ``p`` with real invariants: Laurent series near the origin,
  extended by the duplication formula, after reduction modulo the real period.
* The sixth Painleve transcendent: adaptive DOP853 integration with
  pole-proximity truncation; exact higher derivatives from the ODE itself.
* The Backlund correspondence ``(x, P6, P6') -> (W, W')`` and the relations
  between the SD-I.a constants and the P6 parameters.

Every function of ``x``/``P6`` here is written with the jet-aware helpers so
that it can be differentiated exactly.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.optimize import least_squares

from . import jets as J
from .errors import DomainError
from .jets import Jet

# -- Weierstrass p -------------------------------------------------------------

# Coefficients c_2..c_16 (powers through theta^30).  Fewer terms force extra
# doublings near the origin, where the duplication step cancels badly.
_LAURENT_TERMS = 16


@dataclass(frozen=True)
class WeierstrassParams:
    t2: float
    t3: float
    pole_guard: float = 1e-4

    @property
    def discriminant(self) -> float:
        return self.t2 ** 3 - 27.0 * self.t3 ** 2

    @cached_property
    def laurent(self) -> np.ndarray:
        """``c[k]`` with ``p(z) = 1/z^2 + sum_k c[k] z^(2k-2)``, k = 2.._LAURENT_TERMS."""
        c = np.zeros(_LAURENT_TERMS + 1)
        c[2] = self.t2 / 20.0
        c[3] = self.t3 / 28.0
        for k in range(4, _LAURENT_TERMS + 1):
            c[k] = 3.0 / ((2 * k + 1) * (k - 3)) * sum(c[m] * c[k - m] for m in range(2, k - 1))
        return c

    @cached_property
    def _degenerate_roots(self):
        """``(double, simple)`` roots when the discriminant vanishes, else None."""
        if self.t2 == 0.0:
            return None
        sig = max(abs(self.t2) ** 0.5, abs(self.t3) ** (1.0 / 3.0))
        T2, T3 = self.t2 / sig / sig, self.t3 / sig / sig / sig  # scaled, max(|T2|, |T3|^(2/3)) = 1
        if abs(T2 ** 3 - 27.0 * T3 ** 2) > 1e-12:
            return None
        e = -1.5 * T3 / T2 * sig
        if e == 0.0:
            return None  # invariants underflow: the series handles p ~ 1/theta^2
        return e, -2.0 * e

    @cached_property
    def e_max(self) -> float:
        """Largest real root of ``4x^3 - t2 x - t3``."""
        deg = self._degenerate_roots
        if deg is not None:
            return max(deg)
        roots = np.roots([4.0, 0.0, -self.t2, -self.t3])
        real = roots[np.abs(roots.imag) <= 1e-9 * max(1.0, np.abs(roots).max())].real
        e = float(real.max())
        # one Newton step to polish the root
        return e - (4 * e ** 3 - self.t2 * e - self.t3) / (12 * e * e - self.t2)

    @cached_property
    def real_half_period(self) -> float:
        """``omega`` with poles of ``p`` on the real axis at ``2 k omega``; inf if none."""
        if self.t2 == 0.0 and self.t3 == 0.0:
            return math.inf
        deg = self._degenerate_roots
        if deg is not None and deg[0] >= deg[1]:
            return math.inf  # largest root is double: p = e + c/sinh^2, no real period
        # work in units of sig so that tiny or huge invariants stay well scaled
        sig = max(abs(self.t2) ** 0.5, abs(self.t3) ** (1.0 / 3.0))
        e = self.e_max / sig
        q = e * e - self.t2 / sig / sig / 4.0  # 4x^3 - t2 x - t3 = 4 (x - e)(x^2 + e x + q)

        def f(s):
            x = e + s * s
            return 1.0 / math.sqrt(x * x + e * x + q)
        # substitution x = e + s^2 removes the endpoint singularity
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(f, 0.0, np.inf, epsabs=0.0, epsrel=2e-14, limit=400)
        return val / math.sqrt(sig)

    @cached_property
    def series_radius(self) -> float:
        c = self.laurent
        scale = max((abs(c[k]) ** (1.0 / (2 * k)) for k in range(2, _LAURENT_TERMS + 1)),
                    default=0.0)
        rho = 0.45 / scale if scale > 0 else math.inf
        return min(rho, self.real_half_period)


def _wp_series(w: WeierstrassParams, z: np.ndarray):
    c = w.laurent
    z2 = z * z
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for k in range(_LAURENT_TERMS, 1, -1):
        p = p * z2 + c[k]
        dp = dp * z2 + (2 * k - 2) * c[k]
    # p currently holds sum c_k z^(2k-4); dp holds sum (2k-2) c_k z^(2k-4)
    return 1.0 / z2 + p * z2, -2.0 / (z2 * z) + dp * z


def _wp_degenerate(w: WeierstrassParams, th: np.ndarray):
    """Closed forms when the discriminant vanishes (``e`` is the double root)."""
    e = w._degenerate_roots[0]
    if e > 0:
        k = math.sqrt(3 * e)
        u = th
        sh = np.sinh(k * u)
        if np.any(np.abs(u) < w.pole_guard):
            raise DomainError(f"theta within {w.pole_guard:g} of the pole of p")
        return e + 3 * e / sh ** 2, -6 * e * k * np.cosh(k * u) / sh ** 3
    k = math.sqrt(-3 * e)
    om = math.pi / (2 * k)
    u = th - 2 * om * np.round(th / (2 * om))
    if np.any(np.abs(u) < w.pole_guard):
        raise DomainError(f"theta within {w.pole_guard:g} of a real pole of p")
    sn = np.sin(k * u)
    return e - 3 * e / sn ** 2, 6 * e * k * np.cos(k * u) / sn ** 3


def wp_eval(w: WeierstrassParams, theta):
    """``(p(theta), p'(theta))`` for real ``theta`` (scalar or array)."""
    th = np.asarray(theta, dtype=float)
    scalar = th.ndim == 0
    th = np.atleast_1d(th)
    if w._degenerate_roots is not None:
        p, dp = _wp_degenerate(w, th)
        return (float(p[0]), float(dp[0])) if scalar else (p, dp)
    om = w.real_half_period
    u = th - 2 * om * np.round(th / (2 * om)) if math.isfinite(om) else th.copy()
    if np.any(np.abs(u) < w.pole_guard):
        raise DomainError(f"theta within {w.pole_guard:g} of a real pole of p")
    sgn = np.sign(u)
    a = np.abs(u)
    rho = w.series_radius
    n = np.zeros(a.shape, dtype=int)
    if math.isfinite(rho):
        n = np.maximum(0, np.ceil(np.log2(a / rho))).astype(int)
    z = a / 2.0 ** n
    p, dp = _wp_series(w, z)
    for step in range(int(n.max(initial=0)), 0, -1):
        m = n >= step
        if not np.any(m):
            continue
        pm, dm = p[m], dp[m]
        d2 = 6 * pm * pm - w.t2 / 2
        d3 = 12 * pm * dm
        q = d2 / (2 * dm)
        p[m] = -2 * pm + q * q
        dp[m] = -dm + q * (d3 * dm - d2 * d2) / (2 * dm * dm)
    dp = dp * sgn
    if scalar:
        return float(p[0]), float(dp[0])
    return p, dp


def wp_ode_residual(w: WeierstrassParams, p, dp):
    return dp * dp - (4 * p ** 3 - w.t2 * p - w.t3)


def wp_taylor(w: WeierstrassParams, theta0, order: int) -> Jet:
    """Univariate Taylor jet of ``p`` at ``theta0`` via ``p'' = 6 p^2 - t2/2``."""
    p, dp = wp_eval(w, theta0)
    return J.taylor_ode2(lambda x, y, yp: 6 * y * y - w.t2 / 2, theta0, p, dp, order)


def wp_jet(w: WeierstrassParams, theta):
    """``p(theta)`` for floats, arrays or jets of any arity."""
    if not isinstance(theta, Jet):
        return wp_eval(w, theta)[0]
    tc = wp_taylor(w, theta.value, theta.order)
    return J.compose_taylor(theta, [tc.c[k] for k in range(theta.order + 1)])


# -- Painleve VI -----------------------------------------------------------------

@dataclass(frozen=True)
class P6Params:
    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float
    sqrt_sign: int = 1

    def __post_init__(self):
        if self.gamma1 < 0:
            raise ValueError("gamma1 must be non-negative for a real sqrt(2 gamma1)")
        if self.sqrt_sign not in (1, -1):
            raise ValueError("sqrt_sign must be +1 or -1")

    @property
    def s(self) -> float:
        """The chosen root ``sqrt(2 gamma1)``."""
        return self.sqrt_sign * math.sqrt(2.0 * self.gamma1)

    @property
    def constraint_residual(self) -> float:
        return (self.gamma2 + self.gamma3) * (self.gamma1 + self.gamma4 - self.s)

    def satisfies_constraint(self, tol: float = 1e-12) -> bool:
        return abs(self.constraint_residual) <= tol

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.gamma1, self.gamma2, self.gamma3, self.gamma4)


def p6_rhs(p: P6Params, x, y, yp):
    """Right-hand side of the P6 equation; all arguments may be jets."""
    g1, g2, g3, g4 = p.as_tuple()
    ym1, ymx = y - 1.0, y - x
    first = 0.5 * (1.0 / y + 1.0 / ym1 + 1.0 / ymx) * yp * yp
    second = (1.0 / x + 1.0 / (x - 1.0) + 1.0 / ymx) * yp
    bracket = g1 + g2 * x / (y * y) + g3 * (x - 1.0) / (ym1 * ym1) + g4 * x * (x - 1.0) / (ymx * ymx)
    return first - second + y * ym1 * ymx / (x * x * (x - 1.0) ** 2) * bracket


def p6_pole_distance(x, y):
    return np.minimum(np.minimum(np.abs(y), np.abs(y - 1.0)), np.abs(y - x))


def p6_derivatives(p: P6Params, x, y, yp, order: int = 4) -> list[np.ndarray]:
    """``[P6, P6', ..., P6^(order)]`` by total differentiation of the equation."""
    if np.any(p6_pole_distance(np.asarray(x), np.asarray(y)) == 0):
        raise DomainError("P6 at a fixed singular value (0, 1 or x)")
    return J.taylor_ode2(lambda xx, yy, yyp: p6_rhs(p, xx, yy, yyp), x, y, yp, order).derivatives()


@dataclass(frozen=True)
class P6Solution:
    params: P6Params
    xs: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    x0: float
    y0: float
    yp0: float
    truncated: bool = False
    pole_x: Optional[float] = None
    rtol: float = 1e-13
    dense: object = field(default=None, repr=False, compare=False)

    @property
    def window(self) -> tuple[float, float]:
        return float(self.xs.min()), float(self.xs.max())

    def contains(self, x) -> bool:
        lo, hi = self.window
        x = np.asarray(x)
        return bool(np.all((x >= lo) & (x <= hi)))

    def state(self, x):
        """``(P6, P6')`` anywhere inside the window, from the dense interpolant."""
        if not self.contains(x):
            lo, hi = self.window
            raise DomainError(f"x outside the P6 window [{lo:.6g}, {hi:.6g}]")
        x = np.asarray(x, dtype=float)
        out = np.empty((2,) + x.shape)
        flat = x.ravel()
        vals = np.empty((2, flat.size))
        for interp in self.dense:
            lo, hi = interp.t_min, interp.t_max
            m = (flat >= lo) & (flat <= hi)
            if np.any(m):
                vals[:, m] = interp(flat[m])
        out[...] = vals.reshape((2,) + x.shape)
        return out[0], out[1]

    def taylor(self, x0, order: int) -> Jet:
        """Exact-in-the-ODE Taylor jet of the solution through the interpolated state."""
        y, yp = self.state(x0)
        return J.taylor_ode2(lambda xx, yy, yyp: p6_rhs(self.params, xx, yy, yyp), x0, y, yp, order)

    def at(self, xj):
        """``P6(x)`` for a float/array or a jet ``x`` of any arity."""
        if not isinstance(xj, Jet):
            return self.state(xj)[0]
        tc = self.taylor(xj.value, xj.order)
        return J.compose_taylor(xj, [tc.c[k] for k in range(xj.order + 1)])

    def residual(self, h: float = 2e-4) -> np.ndarray:
        """ODE residual on the grid, P6'' from differentiating the interpolant.

        Normalized by ``max(1, |P6''|)`` so that growth near x = 0, 1 does not
        masquerade as error.
        """
        lo, hi = self.window
        x = np.clip(self.xs, lo + 2 * h, hi - 2 * h)
        ypl, ypr = self.state(x - h)[1], self.state(x + h)[1]
        ypm2, ypp2 = self.state(x - 2 * h)[1], self.state(x + 2 * h)[1]
        ypp = (8 * (ypr - ypl) - (ypp2 - ypm2)) / (12 * h)
        y, yp = self.state(x)
        rhs = p6_rhs(self.params, x, y, yp)
        return (ypp - rhs) / np.maximum(1.0, np.abs(rhs))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "P6", "P6prime"])
            for row in zip(self.xs, self.y, self.yp):
                wr.writerow([f"{v:.17g}" for v in row])


def _pole_events(p: P6Params, guard: float):
    def make(k):
        def ev(x, u):
            y = u[0]
            return (abs(y), abs(y - 1.0), abs(y - x))[k] - guard
        ev.terminal = True
        return ev
    return [make(k) for k in range(3)]


def p6_integrate(p: P6Params, x0: float, y0: float, yp0: float, xs: Sequence[float],
                 rtol: float = 1e-13, atol: float = 1e-13, pole_guard: float = 1e-5) -> P6Solution:
    """Integrate P6 from ``(x0, y0, yp0)`` to every point of ``xs`` (both sides of x0).

    Integration stops, and the grid is truncated, once the solution comes
    within ``pole_guard`` of 0, 1 or x.
    """
    if not 0.0 < x0 < 1.0:
        raise DomainError("x0 must lie in (0, 1)")
    if p6_pole_distance(x0, y0) <= pole_guard:
        raise DomainError("initial value at a fixed singular value of P6")
    xs = np.unique(np.asarray(xs, dtype=float))
    if xs.size == 0:
        raise ValueError("empty x-grid")
    if xs.min() <= 0.0 or xs.max() >= 1.0:
        raise DomainError("x-grid must lie inside (0, 1)")

    def f(x, u):
        return [u[1], p6_rhs(p, x, u[0], u[1])]

    keep_x, keep_y, keep_yp, dense = [], [], [], []
    truncated, pole_x = False, None
    for side in (-1, 1):
        pts = xs[xs < x0][::-1] if side < 0 else xs[xs >= x0]
        if pts.size == 0:
            continue
        end = pts[-1]
        if end == x0:
            keep_x.append(np.array([x0]))
            keep_y.append(np.array([y0]))
            keep_yp.append(np.array([yp0]))
            continue
        sol = solve_ivp(f, (x0, end), [y0, yp0], method="DOP853", rtol=rtol, atol=atol,
                        dense_output=True, events=_pole_events(p, pole_guard))
        reached = sol.t[-1]
        if sol.status == 1:
            truncated = True
            pole_x = float(reached) if pole_x is None else pole_x
        ok = pts[(pts - reached) * side <= 0]
        if ok.size:
            vals = sol.sol(ok)
            keep_x.append(ok)
            keep_y.append(vals[0])
            keep_yp.append(vals[1])
        dense.append(_Dense(sol.sol, min(x0, reached), max(x0, reached)))
    order = np.argsort(np.concatenate(keep_x))
    xs_out = np.concatenate(keep_x)[order]
    return P6Solution(p, xs_out, np.concatenate(keep_y)[order], np.concatenate(keep_yp)[order],
                      x0, y0, yp0, truncated, pole_x, rtol, tuple(dense))


class _Dense:
    def __init__(self, sol, t_min, t_max):
        self.sol, self.t_min, self.t_max = sol, t_min, t_max

    def __call__(self, x):
        return self.sol(x)


# -- Backlund correspondence -------------------------------------------------------

def _check_backlund_domain(x, y, guard: float = 1e-12):
    xv, yv = J.value_of(x), J.value_of(y)
    if np.any(p6_pole_distance(xv, yv) <= guard):
        raise DomainError("P6 (P6 - 1) (P6 - x) vanishes")
    if np.any((xv <= 0) | (xv >= 1)):
        raise DomainError("x must lie in (0, 1)")


def backlund_W(p: P6Params, x, y, yp):
    """SD-I.a solution ``W(x)`` from ``(x, P6, P6')``; arguments may be jets."""
    _check_backlund_domain(x, y)
    g1, g2, g3, g4 = p.as_tuple()
    s = p.s
    ym1, ymx = y - 1.0, y - x
    xx1 = x * (x - 1.0)
    br = yp - y * ym1 / xx1
    return (xx1 * xx1 / (4.0 * y * ym1 * ymx) * br * br
            + 0.125 * (1.0 - s) ** 2 * (1.0 - 2.0 * y)
            - 0.25 * g2 * (1.0 - 2.0 * x / y)
            - 0.25 * g3 * (1.0 - 2.0 * (x - 1.0) / ym1)
            + (0.125 - 0.25 * g4) * (1.0 - 2.0 * x * ym1 / ymx))


def backlund_Wprime(p: P6Params, x, y, yp):
    """``W'(x)`` from ``(x, P6, P6')`` as given by the correspondence."""
    _check_backlund_domain(x, y)
    g1, g2, g3, g4 = p.as_tuple()
    s = p.s
    ym1, ymx = y - 1.0, y - x
    xx1 = x * (x - 1.0)
    br = yp - s * y * ym1 / xx1
    return (-xx1 / (4.0 * y * ym1) * br * br
            - g2 * ymx / (2.0 * (x - 1.0) * y)
            - g3 * ymx / (2.0 * x * ym1))


# -- SD-I.a constants and the gamma relations ------------------------------------

def cosgrove_constants(beta1: float, beta2: float, K1: float, K2: float, hbar: float):
    if hbar <= 0:
        raise DomainError("the SD-I.a constants need hbar > 0")
    h2 = hbar * hbar
    c7 = (h2 + 8 * beta1) / (16 * h2)
    c9 = (h2 * h2 - 16 * beta1 ** 2 - 16 * beta2 ** 2 - 8 * K1) / (64 * h2 * h2)
    c10 = -(16 * h2 * K2 - 8 * (4 * beta1 + h2) * K1 + h2 * (4 * beta1 + h2) ** 2) / (256 * h2 ** 3)
    return c7, c9, c10


def integration_constants(c7: float, c9: float, c10: float, beta2: float, hbar: float):
    """Inverse of :func:`cosgrove_constants` for a chosen ``beta2``: ``(beta1, K1, K2)``."""
    if hbar <= 0:
        raise DomainError("the SD-I.a constants need hbar > 0")
    h2 = hbar * hbar
    beta1 = (16 * h2 * c7 - h2) / 8
    K1 = (h2 * h2 - 16 * beta1 ** 2 - 16 * beta2 ** 2 - 64 * h2 * h2 * c9) / 8
    K2 = (-256 * h2 ** 3 * c10 + 8 * (4 * beta1 + h2) * K1 - h2 * (4 * beta1 + h2) ** 2) / (16 * h2)
    return beta1, K1, K2


def gamma_sides(p: P6Params):
    """Right-hand sides of the -4 c7, -4 c9, -4 c10 relations."""
    g1, g2, g3, g4 = p.as_tuple()
    s = p.s
    r7 = g1 - g2 + g3 - g4 - s + 1.0
    r9 = (g3 - g2) * (g1 - g4 - s + 1.0) + 0.25 * (g1 - g2 - g3 + g4 - s) ** 2
    r10 = 0.25 * (g3 - g2) * (g1 + g4 - s) ** 2 + 0.25 * (g2 + g3) ** 2 * (g1 - g4 - s + 1.0)
    return r7, r9, r10


def c_from_gammas(p: P6Params):
    r7, r9, r10 = gamma_sides(p)
    return -r7 / 4, -r9 / 4, -r10 / 4


def gamma_relations_check(p: P6Params, c7: float, c9: float, c10: float):
    """Residuals of the three relations and of the c8 constraint."""
    r7, r9, r10 = gamma_sides(p)
    return (-4 * c7 - r7, -4 * c9 - r9, -4 * c10 - r10, p.constraint_residual)


def solve_gammas(c7: float, c9: float, c10: float, branch: str = "g2=-g3",
                 guess=(0.5, 0.1, -0.1, 0.2), sqrt_sign: int = 1) -> P6Params:
    """Find a parameter tuple on the given constraint branch matching ``(c7, c9, c10)``.

    ``branch`` is ``"g2=-g3"`` or ``"g4=-g1+s"``; three unknowns, three equations.
    """
    def build(u):
        s = math.sqrt(2 * u[0] ** 2) * sqrt_sign
        g1 = u[0] ** 2  # keeps gamma1 >= 0
        if branch == "g2=-g3":
            return P6Params(g1, -u[1], u[1], u[2], sqrt_sign)
        if branch == "g4=-g1+s":
            return P6Params(g1, u[1], u[2], -g1 + s, sqrt_sign)
        raise ValueError(f"unknown branch {branch!r}")

    def resid(u):
        return np.array(gamma_relations_check(build(u), c7, c9, c10)[:3])

    g1, g2, g3, g4 = guess
    u0 = [math.sqrt(max(g1, 0.0)), g3, g4] if branch == "g2=-g3" else [math.sqrt(max(g1, 0.0)), g2, g3]
    best = None
    rng = np.random.default_rng(12345)
    for attempt in range(40):
        start = np.asarray(u0, dtype=float) + (0 if attempt == 0 else rng.normal(scale=1.0, size=3))
        sol = least_squares(resid, start, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or sol.cost < best.cost:
            best = sol
        if best.cost < 1e-26:
            break
    return build(best.x)


def backlund_consistency(p: P6Params, sol: P6Solution, xs) -> np.ndarray:
    """``|d/dx W - W'| / max(1, |W'|)`` along the solution, d/dx taken exactly on jets."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty(xs.shape)
    for k, x0 in enumerate(xs.ravel()):
        tc = sol.taylor(x0, 2).c
        xj = Jet.variable(np.asarray(x0), 0, 1, nvars=1)
        dx = xj - x0
        y = dx * tc[1] + tc[0]
        yp = dx * (2 * tc[2]) + tc[1]
        dW = backlund_W(p, xj, y, yp).derivatives()[1]
        Wp = backlund_Wprime(p, x0, tc[0], tc[1])
        out.ravel()[k] = abs(dW - Wp) / max(1.0, abs(Wp))
    return out
