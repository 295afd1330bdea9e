"""Concrete potentials with their integrals, and the classical T-family algebra."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets as J
from .errors import ConfigurationError, DomainError
from .jets import Jet
from .phasecore import (AngularProfile, Coulomb, ExplicitIntegral, Oscillator, PhasePoint,
                        PotentialModel, RadialProfile, UFunc, ZeroRadial, angular_momentum)
from .specfun import (P6Params, P6Solution, WeierstrassParams, backlund_W, backlund_Wprime,
                      c_from_gammas, integration_constants, wp_jet)
from .detsys import ResidualReport, _report
from .ybuilder import YCoeffs

NAMES = ("smoro2", "smoro1", "calogero", "weierstrass", "weierstrass-c1", "p6",
         "classical-T1", "classical-T2", "custom")


# -- quadratically superintegrable cases --------------------------------------------

def make_smoro2(a: float, alpha1: float, alpha2: float, hbar: float = 0.0) -> PotentialModel:
    """``a/r + (alpha1 + alpha2 sin)/(r^2 cos^2)``; the third-order integral is left to a fit.

    ``meta["K"]`` is the classical second-order integral of parabolic type,
    ``L p1 + f(x, y)``, used by cross-checks.
    """
    if alpha1 or alpha2:
        S = UFunc(lambda t: (alpha1 + alpha2 * J.sin(t)) / J.cos(t) ** 2, name="smoro2")
    else:
        S = UFunc(lambda t: 0.0 * t, name="zero")
    singular = (math.pi / 2,) if (alpha1 or alpha2) else ()
    ang = AngularProfile(S, singular=singular, period=math.pi, name="smoro2")

    def K(p: PhasePoint) -> float:
        x, y = p.x, p.y
        r = math.hypot(x, y)
        L = angular_momentum(x, y, p.px, p.py)
        return (L * p.px - a * y / r - 2 * alpha1 * y / x ** 2 + alpha2 / r
                - 2 * alpha2 * r / x ** 2)

    return PotentialModel(Coulomb(a), ang, hbar=hbar, name="smoro2",
                          meta={"a": a, "alpha1": alpha1, "alpha2": alpha2, "K": K})


def make_smoro1(a: float, b: float, c: float, hbar: float = 0.0) -> PotentialModel:
    """``a r^2 + b/x^2 + c/y^2`` with the printed polar angular part."""
    if b or c:
        S = UFunc(lambda t: (2 * (b + c) + 2 * (c - b) * J.cos(2 * t)) / J.sin(2 * t) ** 2,
                  name="smoro1")
    else:
        S = UFunc(lambda t: 0.0 * t, name="zero")
    singular = (0.0,) if (b or c) else ()
    ang = AngularProfile(S, singular=singular, period=math.pi / 2, name="smoro1")

    def X1(p: PhasePoint) -> float:
        return p.px ** 2 + 2 * a * p.x ** 2 + 2 * b / p.x ** 2

    def cartesian_V(x, y):
        return a * (x * x + y * y) + b / x ** 2 + c / y ** 2

    return PotentialModel(Oscillator(a), ang, hbar=hbar, name="smoro1",
                          meta={"a": a, "b": b, "c": c, "X1": X1, "V_cartesian": cartesian_V})


# -- Calogero --------------------------------------------------------------------------

def calogero_g(alpha: float):
    """``(g1, g2)`` of the A1 = 1 integral, in the single-product normalization."""
    def g1(x, y):
        d = -3 * x * x + y * y
        return 2 * alpha * (-3 * x ** 4 + 6 * x * x * y * y + y ** 4) / (y * y * d * d)

    def g2(x, y):
        d = -3 * x * x + y * y
        return alpha * 16 * x * y / (d * d)
    return g1, g2


def make_calogero(alpha: float, hbar: float = 0.0) -> PotentialModel:
    """``alpha / (r^2 sin^2 3 theta)`` with its cubic integral."""
    S = UFunc(lambda t: alpha / J.sin(3 * t) ** 2, name="calogero")
    ang = AngularProfile(S, singular=(0.0,), period=math.pi / 3, guard=1e-3, name="calogero")
    g1, g2 = calogero_g(alpha)
    Y = ExplicitIntegral(YCoeffs(A1=1.0), g1, g2, label="Y")
    return PotentialModel(ZeroRadial(), ang, hbar=hbar, integral=Y, name="calogero",
                          meta={"alpha": alpha})


# -- Weierstrass cases ---------------------------------------------------------------

def _wp_angular(w: WeierstrassParams, scale: float, shift: float, name: str,
                beta: UFunc | None = None) -> AngularProfile:
    S = UFunc(lambda t: scale * wp_jet(w, t) + shift, name=name)
    om = w.real_half_period
    period = 2 * om if math.isfinite(om) else 2 * math.pi
    return AngularProfile(S, beta=beta, singular=(0.0,), period=period, guard=1e-4, name=name)


def weierstrass_Y1(u: Callable) -> ExplicitIntegral:
    """``2 L^3 + {L, 3 u(theta)}``: D0 = 1, g = 3 u (-y, x)."""
    def g1(x, y):
        return -3 * u(J.atan2(y, x)) * y

    def g2(x, y):
        return 3 * u(J.atan2(y, x)) * x
    return ExplicitIntegral(YCoeffs(D0=1.0), g1, g2, label="Y1")


def make_weierstrass_general(R: RadialProfile, w: WeierstrassParams, hbar: float) -> PotentialModel:
    """``R(r) + hbar^2 p(theta)/r^2`` with ``Y = 2L^3 + {L, 3 hbar^2 p}``.

    At ``hbar = 0`` the angular part vanishes and the model is purely radial.
    """
    if hbar < 0:
        raise ConfigurationError("hbar must be non-negative")
    h2 = hbar * hbar
    if hbar == 0:
        ang = AngularProfile(UFunc(lambda t: 0.0 * t, name="zero"), name="weierstrass")
        return PotentialModel(R, ang, hbar=0.0, name="weierstrass",
                              meta={"t2": w.t2, "t3": w.t3, "w": w})
    ang = _wp_angular(w, h2, 0.0, "weierstrass")
    Y = weierstrass_Y1(ang.S)
    return PotentialModel(R, ang, hbar=hbar, integral=Y, name="weierstrass",
                          classical_limit=False, meta={"t2": w.t2, "t3": w.t3, "w": w})


def check_algebraic_relation(m: PotentialModel, p: PhasePoint) -> float:
    """``|(Y/2)^2 - 8 (X/2)^3 + hbar^4 t2 X/4 - hbar^6 t3/4|`` at a phase point.

    The operators ``Y = 2L^3 + {L, 3u}`` and ``X = L^2 + 2u`` with
    ``u = hbar^2 p`` act on functions of theta only; the check evaluates their
    normal-ordered symbol ``e^{-i l theta/hbar} Op e^{i l theta/hbar}`` at
    ``(theta, l = L3(p))``, which vanishes identically iff the operator
    relation holds.  At ``hbar = 0`` this is the plain classical relation.
    """
    if m.name != "weierstrass" or "w" not in m.meta:
        raise ConfigurationError("check_algebraic_relation needs a make_weierstrass_general model")
    return algebraic_relation_residual(m.meta["w"], m.hbar, math.atan2(p.y, p.x),
                                       angular_momentum(p.x, p.y, p.px, p.py))


def algebraic_relation_residual(w: WeierstrassParams, hbar: float, theta: float, ell: float,
                                perturb: float = 0.0) -> float:
    h = hbar
    t2, t3 = w.t2, w.t3
    th = Jet.variable(np.asarray(theta, float), 0, 6, nvars=1)
    u = (wp_jet(w, th) + perturb) * h * h
    if h == 0:
        X = ell * ell + 2 * float(u.value)
        Y = 2 * ell ** 3 + 6 * float(u.value) * ell
        return abs((Y / 2) ** 2 - 8 * (X / 2) ** 3)
    wave = J.exp(th * (1j * ell / h))

    def L(f):
        return f.diff(0) * (-1j * h)

    def Xop(f):
        return L(L(f)) + f * u * 2

    def Yhalf(f):
        return L(L(L(f))) + (L(f * u) + L(f) * u) * 1.5

    def at0(f):
        return complex(f.value) / complex(wave.value)

    lhs = at0(Yhalf(Yhalf(wave)))
    rhs = at0(Xop(Xop(Xop(wave))))
    Xw = at0(Xop(wave))
    return abs(lhs - rhs + 0.25 * h ** 4 * t2 * Xw - 0.25 * h ** 6 * t3)


def weierstrass_c1_invariants(hbar: float, xi0: float, b: float, c: float) -> tuple[float, float]:
    """``(t2, t3)`` with ``S = hbar^2 p - xi0/3`` solving ``hbar^2 S'^2 = 4S^3 + 4 xi0 S^2 + b S + c``."""
    h4, h6 = hbar ** 4, hbar ** 6
    t2 = -(3 * b - 4 * xi0 ** 2) / (3 * h4)
    t3 = -(-9 * b * xi0 + 27 * c + 8 * xi0 ** 3) / (27 * h6)
    return t2, t3


def weierstrass_c1_beta(S: UFunc, hbar: float, xi0: float, b: float, c: float,
                        C1: float = 1.0) -> UFunc:
    """The printed rational expression for beta, with the elliptic function read as ``S``."""
    dS = S.derivative(1)
    h2 = hbar * hbar

    def beta(t):
        P, dP = S(t), dS(t)
        cs, sn = J.cos(t), J.sin(t)
        den = 4 * (h2 + xi0) * P * P + 4 * b * P + 6 * c
        num = ((b * b + 5 * c * (h2 - 2 * xi0)) * cs
               - 2 * (3 * b - h2 * h2 + h2 * xi0 + 2 * xi0 ** 2) * cs * P * P
               - 8 * (h2 + xi0) * cs * P ** 3 + b * (h2 + xi0) * sn * dP
               + (-2 * (9 * c + b * (-h2 + xi0)) * cs + (3 * b + 2 * h2 * (h2 + xi0)) * sn * dP) * P)
        return -C1 * num / den
    return UFunc(beta, name="beta_wp_c1")


def c1_integral(beta: UFunc, S: UFunc, label: str = "Y2", C1: float = 1.0,
                mirror: bool = False) -> ExplicitIntegral:
    """``C1 {L^2, p1} + {g1, p1} + {g2, p2}`` with g built from ``beta`` and ``S'``.

    ``g1 = beta cos + (2 cos S' - beta') sin``, ``g2 = beta sin - (2 cos S' - beta') cos``.
    """
    db, dS = beta.derivative(1), S.derivative(1)

    def parts(x, y):
        t = J.atan2(y, x)
        cs, sn = J.cos(t), J.sin(t)
        b = beta(t)
        k = 2 * C1 * cs * dS(t) - db(t)
        return cs, sn, b, k

    def g1(x, y):
        cs, sn, b, k = parts(x, y)
        return b * cs + k * sn

    def g2(x, y):
        cs, sn, b, k = parts(x, y)
        return b * sn - k * cs
    return ExplicitIntegral(YCoeffs(C1=C1), g1, g2, label=label)


def make_weierstrass_c1(w: WeierstrassParams | None, hbar: float, xi0: float, b: float,
                        c: float) -> PotentialModel:
    """``S(theta)/r^2`` with ``S = hbar^2 p - xi0/3`` and integrals Y1 (D0) and Y2 (C1).

    ``w`` may be None, in which case its invariants follow from ``(hbar, xi0, b, c)``;
    a supplied ``w`` must agree with them.
    """
    if hbar <= 0:
        raise ConfigurationError("hbar = 0 reduces the system to free motion; hbar > 0 required")
    t2, t3 = weierstrass_c1_invariants(hbar, xi0, b, c)
    if w is None:
        w = WeierstrassParams(t2, t3)
    elif abs(w.t2 - t2) > 1e-12 * max(1, abs(t2)) or abs(w.t3 - t3) > 1e-12 * max(1, abs(t3)):
        raise ConfigurationError(f"invariants ({w.t2}, {w.t3}) inconsistent with (xi0, b, c): ({t2}, {t3})")
    h2 = hbar * hbar
    if b == 0 and c == 0 and h2 + xi0 == 0:
        raise ConfigurationError("beta is 0/0 for b = c = 0 and xi0 = -hbar^2")
    S = UFunc(lambda t: h2 * wp_jet(w, t) - xi0 / 3, name="weierstrass-c1")
    beta = weierstrass_c1_beta(S, hbar, xi0, b, c)
    om = w.real_half_period
    ang = AngularProfile(S, beta=beta, singular=(0.0,), period=2 * om if math.isfinite(om) else 2 * math.pi,
                         guard=1e-4, name="weierstrass-c1")
    u = UFunc(lambda t: h2 * wp_jet(w, t), name="hbar2 p")
    Y1 = weierstrass_Y1(u)
    Y2 = c1_integral(beta, S, label="Y2")
    return PotentialModel(ZeroRadial(), ang, hbar=hbar, integral=Y2, extra_integrals=(Y1,),
                          name="weierstrass-c1", classical_limit=False,
                          meta={"w": w, "xi0": xi0, "b": b, "c": c, "t2": t2, "t3": t3,
                                "degenerate": b == 0 and c == 0})


# -- C1 case: beta and the T equation ----------------------------------------------------

def beta_c1_closed(T: UFunc, beta1: float, beta2: float, printed: bool = False) -> UFunc:
    """Particular solution of ``b'' + b = -(-2 cos S'' + 5 sin S' + 2 cos S)`` with ``S = T'``.

    The default is ``beta1 cos + beta2 sin - T sin + 2 cos T'``; ``printed=True``
    gives the printed variant with ``- sin`` in place of ``- T sin``.
    """
    dT = T.derivative(1)

    def beta(t):
        base = beta1 * J.cos(t) + beta2 * J.sin(t) + 2 * J.cos(t) * dT(t)
        return base - J.sin(t) * (1.0 if printed else T(t))
    return UFunc(beta, name="beta_c1" + ("_printed" if printed else ""))


@dataclass(frozen=True)
class ChebBeta:
    """Chebyshev-collocation solution of the forced harmonic equation on a window."""

    lo: float
    hi: float
    coeffs: np.ndarray

    def _u(self, t):
        return (2 * t - (self.lo + self.hi)) / (self.hi - self.lo)

    def __call__(self, t):
        """Clenshaw recurrence; works on floats, arrays and jets."""
        if not isinstance(t, Jet):
            tt = np.asarray(t, dtype=float)
            if np.any(tt < self.lo - 1e-12) or np.any(tt > self.hi + 1e-12):
                raise DomainError(f"theta outside the beta window [{self.lo:.6g}, {self.hi:.6g}]")
            return np.polynomial.chebyshev.chebval(self._u(tt), self.coeffs)
        u = self._u(t)
        b1 = b2 = 0.0 * u
        for ck in self.coeffs[:0:-1]:
            b1, b2 = u * b1 * 2 - b2 + ck, b1
        return u * b1 - b2 + self.coeffs[0]


def solve_beta_collocation(S: UFunc, lo: float, hi: float, n: int = 64,
                           C1: float = 1.0, hbar: float = 0.0) -> tuple[UFunc, dict]:
    """beta from ``b'' + b = -C1(-2 cos S'' + 5 sin S' + 2 cos S)`` on ``[lo, hi]``.

    A particular solution with zero boundary values is found by Chebyshev
    collocation; the two homogeneous constants are then fixed by least
    squares on the remaining determining equation
    ``hbar^2 C1 (...) = 4 S' b' - 8 S b - 8 C1 cos S'^2``.
    """
    C = np.polynomial.chebyshev
    k = np.arange(n + 1)
    u = np.cos(math.pi * k / n)  # Chebyshev-Lobatto points
    th = 0.5 * (lo + hi) + 0.5 * (hi - lo) * u
    S0, S1, S2, S3 = S.derivs(th, 3)
    cs, sn = np.cos(th), np.sin(th)
    f = -C1 * (-2 * cs * S2 + 5 * sn * S1 + 2 * cs * S0)
    jac = 2.0 / (hi - lo)
    V = C.chebvander(u, n)
    D2 = np.stack([C.chebval(u, C.chebder(np.eye(n + 1)[j], 2)) for j in range(n + 1)], axis=1) * jac ** 2
    A = D2 + V
    A[0], A[-1] = V[0], V[-1]
    rhs = f.copy()
    rhs[0] = rhs[-1] = 0.0
    cp = np.linalg.solve(A, rhs)
    # homogeneous part: express cos and sin on the same basis
    ccos = C.chebfit(u, cs, n)
    csin = C.chebfit(u, sn, n)
    def ev(cf, d=0):
        return C.chebval(u, C.chebder(cf, d)) * jac ** d if d else C.chebval(u, cf)
    # residual of the second equation is affine in (p, q)
    h2 = hbar * hbar
    lhs = h2 * C1 * (-sn * S3 - 4 * cs * S2 + 6 * sn * S1 + 4 * cs * S0)
    def eq(cf):
        return 4 * S1 * ev(cf, 1) - 8 * S0 * ev(cf)
    r0 = eq(cp) - 8 * C1 * cs * S1 ** 2 - lhs
    M = np.stack([eq(ccos), eq(csin)], axis=1)
    scale = np.maximum(1.0, np.abs(r0))
    pq, *_ = np.linalg.lstsq(M / scale[:, None], -r0 / scale, rcond=None)
    coeffs = cp + pq[0] * ccos + pq[1] * csin
    cb = ChebBeta(lo, hi, coeffs)
    info = {"homogeneous": (float(pq[0]), float(pq[1])), "n": n, "window": (lo, hi),
            "fit_residual": float(np.max(np.abs((M @ pq + r0) / scale)))}
    return UFunc(cb, name="beta_collocation"), info


# -- Painleve VI potential -------------------------------------------------------------------

def x_pm(theta, branch: int):
    """``sin^2(theta/2)`` for branch +1, ``cos^2(theta/2)`` for branch -1."""
    return (1.0 - branch * J.cos(theta)) * 0.5


def x_pm_radical(z, branch: int):
    """The radical form ``1/2 +- 1/(2 sqrt(1 + z^2))``."""
    return 0.5 + branch * 0.5 / np.sqrt(1.0 + np.asarray(z, float) ** 2)


def _p6_pair(sol: P6Solution, xj):
    """``(P6, P6')`` composed with ``xj`` (float or jet)."""
    if not isinstance(xj, Jet):
        return sol.state(xj)
    tc = sol.taylor(xj.value, xj.order + 1).c
    n = xj.order
    y = J.compose_taylor(xj, [tc[k] for k in range(n + 1)])
    yp = J.compose_taylor(xj, [(k + 1) * tc[k + 1] for k in range(n + 1)])
    return y, yp


def p6_theta_window(sol: P6Solution, branch: int) -> tuple[float, float]:
    lo, hi = sol.window
    if branch > 0:
        return 2 * math.asin(math.sqrt(lo)), 2 * math.asin(math.sqrt(hi))
    return 2 * math.acos(math.sqrt(hi)), 2 * math.acos(math.sqrt(lo))


def make_p6_potential(p: P6Params, sol: P6Solution, branch: int = 1, beta1: float | None = None,
                      hbar: float = 1.0, beta2: float = 0.0) -> PotentialModel:
    """Angular potential from a P6 solution through the Baecklund map.

    ``T = beta2 + (branch 8 hbar^2 W(x) + (hbar^2 + 4 beta1) cos)/(4 sin)`` with
    ``x = x_branch(theta)``, and ``S = T'``, which equals the printed
    ``hbar^2 W'(x) - (branch 8 hbar^2 cos W + 4 beta1 + hbar^2)/(4 sin^2)``.
    The integral is of the C1 form with beta built from T.
    """
    if branch not in (1, -1):
        raise ConfigurationError("branch must be +1 or -1")
    if hbar <= 0:
        raise ConfigurationError("the P6 potential is quantum: hbar > 0 required")
    c7, c9, c10 = c_from_gammas(p)
    b1, K1, K2 = integration_constants(c7, c9, c10, beta2, hbar)
    if beta1 is None:
        beta1 = b1
    elif abs(beta1 - b1) > 1e-9 * max(1.0, abs(b1)):
        raise ConfigurationError(f"beta1 = {beta1} inconsistent with the P6 parameters (beta1 = {b1})")
    h2 = hbar * hbar
    lo, hi = p6_theta_window(sol, branch)
    if sol.params != p:
        raise ConfigurationError("solution was computed for different P6 parameters")

    def W_of(t):
        x = x_pm(t, branch)
        y, yp = _p6_pair(sol, x)
        return backlund_W(p, x, y, yp), x, y, yp

    def T_f(t):
        if not isinstance(t, Jet):
            _check_window(t, lo, hi)
        W, *_ = W_of(t)
        return beta2 + (branch * 8 * h2 * W + (h2 + 4 * beta1) * J.cos(t)) / (4 * J.sin(t))

    def S_printed(t):
        if not isinstance(t, Jet):
            _check_window(t, lo, hi)
        W, x, y, yp = W_of(t)
        Wp = backlund_Wprime(p, x, y, yp)
        return h2 * Wp - (branch * 8 * h2 * J.cos(t) * W + 4 * beta1 + h2) / (4 * J.sin(t) ** 2)

    T = UFunc(T_f, name="T_p6")
    S = UFunc(S_printed, name="S_p6")
    beta = beta_c1_closed(T, beta1, beta2)
    ang = AngularProfile(S, beta=beta, singular=(0.0, math.pi), period=2 * math.pi, guard=1e-3,
                         name="p6")
    Y = c1_integral(beta, S, label="Y")
    return PotentialModel(ZeroRadial(), ang, hbar=hbar, integral=Y, name="p6", classical_limit=False,
                          meta={"T": T, "branch": branch, "beta1": beta1, "beta2": beta2, "K1": K1,
                                "K2": K2, "c": (c7, c9, c10), "theta_window": (lo, hi), "sol": sol})


def _check_window(t, lo, hi):
    t = np.asarray(t, float)
    if np.any(t < lo) or np.any(t > hi):
        raise DomainError(f"theta outside the P6 window; admissible interval [{lo:.6g}, {hi:.6g}]")


def T_of_z(T: UFunc) -> Callable:
    """``T`` as a function of ``z = tan(theta)``, with theta taken in ``(0, pi)``."""
    def f(z):
        th = J.atan2(z, 1.0 + 0.0 * z)
        if isinstance(th, Jet):
            base = np.where(th.value < 0, math.pi, 0.0)
            th = th + base
        else:
            th = np.where(np.asarray(th) < 0, th + math.pi, th)
        return T(th)
    return f


def p6_integral_residuals(m: PotentialModel, theta, tol: float = 1e-8) -> ResidualReport:
    """Fourth-order T equation and its two integrals along the P6 solution.

    The integrals are written in ``z = tan(theta)`` with the constants
    ``K1, K2`` fixed by the P6 parameters.
    """
    T = m.meta["T"]
    b1, b2, K1, K2 = m.meta["beta1"], m.meta["beta2"], m.meta["K1"], m.meta["K2"]
    h2 = m.hbar ** 2
    th = np.asarray(theta, float)
    z = np.tan(th)
    zj = Jet.variable(z, 0, 3, nvars=1)
    T0, T1, T2, T3 = T_of_z(T)(zj).derivatives()[:4]
    first = [h2 * z ** 2 * (1 + z ** 2) ** 2 * T3, 2 * h2 * z * (1 + z ** 2) * (1 + 3 * z ** 2) * T2,
             -6 * z ** 2 * (1 + z ** 2) * T1 ** 2,
             2 * (-h2 + h2 * z ** 2 + 3 * h2 * z ** 4 - 2 * b1 * z ** 2 + 2 * b2 * z - 2 * z * T0) * T1,
             2 * T0 ** 2, -4 * b2 * T0, -K1 + 0 * z]
    lhs2 = (T2 + (z * (2 * z ** 2 + 1) * T1 - T0 + b2) / (z ** 2 * (z ** 2 + 1))) ** 2
    inner = [4 * z ** 4 * (z ** 2 + 1) ** 2 * T1 ** 3,
             z ** 2 * (z ** 2 + 1) * (4 * z * T0 + h2 * (2 * z ** 2 + 1) + 4 * b1 * z ** 2 - 4 * b2 * z) * T1 ** 2,
             -2 * z * (z ** 2 + 1) * (2 * z * T0 ** 2 - (4 * b2 * z + h2) * T0 - (K1 * z - b2 * h2)) * T1,
             -(4 * z * T0 ** 3 + (h2 * (z ** 2 - 1) + 4 * b1 * z ** 2 - 12 * b2 * z) * T0 ** 2
               - 2 * (K1 * z + b2 * (4 * b1 + h2) * z ** 2 - 4 * b2 ** 2 * z - b2 * h2) * T0
               - (h2 * K2 * z ** 2 - 2 * b2 * K1 * z + b2 ** 2 * h2))]
    pref = 1.0 / (h2 * z ** 4 * (z ** 2 + 1) ** 3)
    second = [lhs2] + [-pref * t for t in inner]
    U0, U1, U2, U3, U4 = T.derivs(th, 4)
    s, c = np.sin(th), np.cos(th)
    fourth = [h2 * s * U4, 4 * h2 * c * U3, -6 * h2 * s * U2, -4 * h2 * c * U1, -12 * s * U1 * U2,
              -4 * c * U0 * U2, -4 * (b1 * s - b2 * c) * U2, -16 * c * U1 ** 2, 8 * s * U0 * U1,
              -8 * (b1 * c + b2 * s) * U1]
    return _report("p6-T", [("T.fourth", fourth), ("T.first", first), ("T.second", second)],
                   {"theta": th}, tol, "analytic", {"ntheta": int(th.size)},
                   {"beta1": b1, "beta2": b2, "K1": K1, "K2": K2})


# -- classical T family -----------------------------------------------------------------

def _q(z):
    return J.sqrt(4 + 3 * z * z)


def T1_closed(z, alpha: float, beta2: float):
    q = _q(z)
    return beta2 + alpha * J.cbrt(z) * J.power(5 + 3 * z * z + 2 * q, 1 / 6) / J.power(2 + q, 2 / 3)


def T2_closed(z, alpha: float, beta2: float):
    q = _q(z)
    return beta2 + alpha * J.power(1 + z * z, 1 / 3) * J.power(2 + q, 2 / 3) / (
        z * J.power(5 + 3 * z * z + 2 * q, 1 / 6))


def printed_T1_potential(theta, alpha: float):
    """The printed closed-form angular part belonging to T1 (times r^2)."""
    t = np.tan(theta)
    q = np.sqrt(4 + 3 * t * t)
    sec = 1 / np.cos(theta)
    num = 3 * alpha * sec ** 4 * (7 + 3 * q + np.cos(2 * theta) * (1 + q))
    den = np.cbrt(t) ** 2 * q * (2 + q) ** (5 / 3) * (5 + 3 * t * t + 2 * q) ** (5 / 6)
    return num / den


def printed_T2_potential(theta, alpha: float):
    """The printed closed-form angular part belonging to T2 (times r^2)."""
    t = np.tan(theta)
    q = np.sqrt(4 + 3 * t * t)
    sec = np.abs(1 / np.cos(theta))
    num = alpha * sec ** (2 / 3) * (47 + 17 * q + 18 / t ** 2 * (2 + q) + 3 * t * t * (5 + q))
    den = 2 * q * (2 + q) ** (1 / 3) * (5 + 3 * t * t + 2 * q) ** (7 / 6)
    return -num / den


@dataclass(frozen=True)
class TFamilyParams:
    branch: str = "T1"
    alpha: float = 1.0
    beta1: float = 0.0
    beta2: float = 0.0
    K1: Optional[float] = None
    K2: float = 0.0
    T: Optional[Callable] = field(default=None, compare=False)
    window: tuple[float, float] = (0.2, math.pi / 2 - 0.2)

    def __post_init__(self):
        if self.branch not in ("T1", "T2", "custom"):
            raise ConfigurationError(f"unknown T branch {self.branch!r}")
        if self.K1 is None:
            object.__setattr__(self, "K1", -2 * self.beta2 ** 2)
        if self.branch in ("T1", "T2"):
            if self.beta1 != 0 or abs(self.K1 + 2 * self.beta2 ** 2) > 1e-12 * max(1, self.beta2 ** 2):
                raise ConfigurationError("T1/T2 need beta1 = 0 and K1 = -2 beta2^2")
        elif self.T is None:
            raise ConfigurationError("custom branch needs a T(z) callable")

    def T_of_z(self) -> Callable:
        if self.branch == "T1":
            return lambda z: T1_closed(z, self.alpha, self.beta2)
        if self.branch == "T2":
            return lambda z: T2_closed(z, self.alpha, self.beta2)
        return self.T


def make_classical_T(t: TFamilyParams, beta_method: str = "closed") -> PotentialModel:
    """``S(theta)/r^2`` with ``S = d T(tan theta)/d theta`` and the C1 integral.

    ``beta_method`` is ``"collocation"`` (the linear beta equation solved on
    ``t.window``) or ``"closed"`` (the particular solution written with T).
    """
    Tz = t.T_of_z()
    T = UFunc(lambda th: Tz(J.tan(th)), name=f"T[{t.branch}]")
    S = T.derivative(1)
    if beta_method == "closed":
        beta = beta_c1_closed(T, t.beta1, t.beta2)
        info = {}
    elif beta_method == "collocation":
        beta, info = solve_beta_collocation(S, *t.window)
    else:
        raise ConfigurationError(f"unknown beta method {beta_method!r}")
    ang = AngularProfile(S, beta=beta, singular=(0.0, math.pi / 2), period=math.pi, guard=1e-3,
                         name=f"classical-{t.branch}")
    Y = c1_integral(beta, S, label="Y")
    return PotentialModel(ZeroRadial(), ang, hbar=0.0, integral=Y, name=f"classical-{t.branch}",
                          meta={"T": T, "params": t, "beta_info": info, "theta_window": t.window})


def residual_class1(T: Callable, z_grid, beta1: float, beta2: float, K1: float,
                    tol: float = 1e-9) -> ResidualReport:
    """``3z^2(1+z^2)T'^2 + 2zTT' - T^2 + 2(beta1 z^2 - beta2 z)T' + 2 beta2 T + K1/2``."""
    z = np.asarray(z_grid, dtype=float)
    if z.size == 0 or np.any(z == 0):
        raise ConfigurationError("z grid must be non-empty and avoid z = 0")
    zj = Jet.variable(z, 0, 1, nvars=1)
    Tj = T(zj)
    if isinstance(Tj, Jet):
        T0, T1 = Tj.derivatives()[:2]
    else:
        T0 = np.asarray(T(z), float)
        T1 = np.array([J.fd_derivative(T, zz, 1) for zz in z])
    terms = [3 * z * z * (1 + z * z) * T1 ** 2, 2 * z * T0 * T1, -T0 ** 2,
             2 * (beta1 * z * z - beta2 * z) * T1, 2 * beta2 * T0, K1 / 2 + 0 * z]
    return _report("class1", [("class1", terms)], {"z": z}, tol, "analytic",
                   {"nz": int(z.size)})


def condition_det(beta1: float, beta2: float, K1: float, z):
    """Determinant of ``[[A, B, D], [B, C, E], [D, E, F]]`` for the classical T equation."""
    z = np.asarray(z, dtype=float)
    A = 3 * z * z * (1 + z * z)
    B = z
    C = -1.0
    D = beta1 * z * z - beta2 * z
    E = beta2
    F = K1 / 2
    return A * (C * F - E * E) - B * (B * F - D * E) + D * (B * E - C * D)


# -- registry ------------------------------------------------------------------------

def build(name: str, params: dict) -> PotentialModel:
    """Catalog entry by name with keyword parameters (used by the CLI)."""
    params = dict(params)
    if name == "smoro2":
        return make_smoro2(**params)
    if name == "smoro1":
        return make_smoro1(**params)
    if name == "calogero":
        return make_calogero(**params)
    if name == "weierstrass":
        w = WeierstrassParams(params.pop("t2"), params.pop("t3"))
        from .phasecore import GenericSum
        R = GenericSum(**params.pop("radial", {})) if "radial" in params else ZeroRadial()
        return make_weierstrass_general(R, w, params.pop("hbar", 1.0))
    if name == "weierstrass-c1":
        return make_weierstrass_c1(None, **params)
    if name == "p6":
        from .specfun import p6_integrate
        g = params.pop("gammas")
        pp = P6Params(*g, sqrt_sign=params.pop("sqrt_sign", 1))
        x0, y0, yp0 = params.pop("x0", 0.5), params.pop("y0", 0.25), params.pop("yp0", 0.5)
        xs = np.linspace(*params.pop("x_window", (0.05, 0.95)), params.pop("nx", 181))
        sol = p6_integrate(pp, x0, y0, yp0, xs)
        if sol.truncated:
            raise DomainError(f"P6 solution hits a pole at x = {sol.pole_x}")
        return make_p6_potential(pp, sol, **params)
    if name in ("classical-T1", "classical-T2"):
        method = params.pop("beta_method", "closed")
        return make_classical_T(TFamilyParams(branch=name.split("-")[1], **params), method)
    raise ConfigurationError(f"unknown catalog name {name!r}; known: {', '.join(NAMES)}")
