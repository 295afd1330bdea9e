"""Phase-space data model, potentials separating in polar coordinates, H and X.

Potentials have the form ``V = R(r) + S(theta)/r**2``.  Both profiles are
"jet-capable": they accept floats, arrays or :class:`~polarsuper.jets.Jet`
objects, so every derivative the verification code needs is exact.
Profiles built from opaque float callables fall back to finite differences
and are flagged ``numeric``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets as J
from .errors import DomainError
from .jets import Jet


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float
    px: float
    py: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.px, self.py)):
            raise ValueError("phase point components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.px, self.py])

    @classmethod
    def from_array(cls, a) -> "PhasePoint":
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class PolarPhase:
    r: float
    theta: float
    pr: float
    ptheta: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")


def to_polar(p: PhasePoint) -> PolarPhase:
    r = math.hypot(p.x, p.y)
    if r == 0.0:
        raise DomainError("the origin has no polar representation")
    return PolarPhase(
        r=r,
        theta=math.atan2(p.y, p.x),
        pr=(p.x * p.px + p.y * p.py) / r,
        ptheta=p.x * p.py - p.y * p.px,
    )


def to_cartesian(q: PolarPhase) -> PhasePoint:
    c, s = math.cos(q.theta), math.sin(q.theta)
    return PhasePoint(
        x=q.r * c,
        y=q.r * s,
        px=c * q.pr - s * q.ptheta / q.r,
        py=s * q.pr + c * q.ptheta / q.r,
    )


def angular_momentum(x, y, px, py):
    return x * py - y * px


# -- univariate analytic functions ------------------------------------------

class UFunc:
    """A univariate function usable on floats, arrays and jets.

    ``f`` must accept jets unless ``numeric=True``, in which case derivatives
    come from :func:`polarsuper.jets.fd_derivative` (order <= ``max_fd_order``).
    """

    max_fd_order = 5

    def __init__(self, f: Callable, numeric: bool = False, name: str = ""):
        self.f = f
        self.numeric = numeric
        self.name = name or getattr(f, "__name__", "f")

    def __call__(self, t):
        if isinstance(t, Jet):
            return self.lift(t)
        return self.f(np.asarray(t, dtype=float)) if self.numeric else self.f(t)

    def taylor(self, t0, order: int) -> Jet:
        """Univariate Taylor jet of the function at ``t0``."""
        t0 = np.asarray(t0, dtype=float)
        if not self.numeric:
            return self.f(Jet.variable(t0, 0, order, nvars=1))
        if order > self.max_fd_order:
            raise ValueError(f"numeric fallback supports derivatives up to {self.max_fd_order}")
        ds = [np.asarray(self.f(t0), dtype=float)]
        ds += [np.asarray(J.fd_derivative(self.f, t0, k)) for k in range(1, order + 1)]
        return J.Jet.from_taylor([d / math.factorial(k) for k, d in enumerate(ds)])

    def derivs(self, t0, order: int) -> list[np.ndarray]:
        return self.taylor(t0, order).derivatives()

    def lift(self, a: Jet) -> Jet:
        """Compose with an arbitrary jet via the univariate Taylor coefficients."""
        if a.nvars == 1 and not self.numeric:
            return self.f(a)
        tc = self.taylor(a.value, a.order)
        return J.compose_taylor(a, [tc.c[k] for k in range(a.order + 1)])

    def derivative(self, k: int = 1) -> "UFunc":
        """``d^k f / dt^k`` as a jet-capable function."""
        return _Derived(self, k) if k else self


class _Derived(UFunc):
    """Derivative of a :class:`UFunc`, from shifted Taylor coefficients."""

    def __init__(self, base: UFunc, k: int):
        if isinstance(base, _Derived):
            base, k = base.base, base.k + k
        super().__init__(base.f, numeric=base.numeric, name=f"{base.name}^({k})")
        self.base, self.k = base, k

    def taylor(self, t0, order: int) -> Jet:
        tc = self.base.taylor(t0, order + self.k).c
        k = self.k
        return J.Jet.from_taylor([math.perm(n + k, k) * tc[n + k] for n in range(order + 1)])

    def __call__(self, t):
        if isinstance(t, Jet):
            return self.lift(t)
        return self.taylor(np.asarray(t, dtype=float), 0).value

    def lift(self, a: Jet) -> Jet:
        tc = self.taylor(a.value, a.order)
        return J.compose_taylor(a, [tc.c[n] for n in range(a.order + 1)])


def as_ufunc(f) -> Optional[UFunc]:
    if f is None or isinstance(f, UFunc):
        return f
    return UFunc(f)


# -- radial profiles ----------------------------------------------------------

class RadialProfile:
    """Base class: ``R(r)``; subclasses implement ``_f`` on floats and jets."""

    numeric = False
    singular_radii: tuple[float, ...] = ()

    def _f(self, r):
        raise NotImplementedError

    def __call__(self, r):
        return self._f(r)

    def taylor(self, r0, order: int) -> Jet:
        return UFunc(self._f, numeric=self.numeric).taylor(r0, order)

    def derivs(self, r0, order: int) -> list[np.ndarray]:
        return self.taylor(r0, order).derivatives()

    def lift(self, a: Jet) -> Jet:
        return UFunc(self._f, numeric=self.numeric).lift(a)

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class ZeroRadial(RadialProfile):
    def _f(self, r):
        return 0.0 * r

    @property
    def is_zero(self) -> bool:
        return True


@dataclass(frozen=True)
class Coulomb(RadialProfile):
    a: float

    def _f(self, r):
        return self.a / r


@dataclass(frozen=True)
class Oscillator(RadialProfile):
    a: float

    def _f(self, r):
        return self.a * r * r


@dataclass(frozen=True)
class GenericSum(RadialProfile):
    """Eight-term radial form allowed by the radial ODEs before case elimination."""

    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0
    a5: float = 0.0
    a6: float = 0.0
    a7: float = 0.0
    a8: float = 0.0
    A: float = 1.0
    C: float = 1.0

    def _f(self, r):
        out = (self.a1 / r ** 4 + self.a2 / r ** 3 + self.a3 / r
               + self.a4 * r * r + self.a5 * r ** 4)
        if self.a6:
            out = out + self.a6 * J.log(r)
        if self.a7 or self.a8:
            q = J.sqrt(self.A + self.C * r * r)
            out = out + self.a7 / q
            if self.a8:
                out = out + self.a8 / q * J.log((math.sqrt(self.A) + q) / r)
        return out


class CustomRadial(RadialProfile):
    """User-supplied ``R(r)``; ``numeric=True`` for float-only callables."""

    def __init__(self, f: Callable, numeric: bool = False, name: str = "custom"):
        self.f = f
        self.numeric = numeric
        self.name = name

    def _f(self, r):
        return self.f(r)

    def __repr__(self) -> str:
        return f"CustomRadial({self.name!r}, numeric={self.numeric})"


# -- angular profile -----------------------------------------------------------

@dataclass(frozen=True)
class AngularProfile:
    """``S(theta)`` with optional ``beta(theta)``, ``xi(theta)`` companions.

    The singular set is ``{s + k*period}`` for ``s`` in ``singular``;
    evaluation within ``guard`` of it is rejected.
    """

    S: UFunc
    beta: Optional[UFunc] = None
    xi: Optional[UFunc] = None
    singular: tuple[float, ...] = ()
    period: float = 2 * math.pi
    guard: float = 1e-6
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "S", as_ufunc(self.S))
        object.__setattr__(self, "beta", as_ufunc(self.beta))
        object.__setattr__(self, "xi", as_ufunc(self.xi))

    @property
    def numeric(self) -> bool:
        return self.S.numeric

    def distance_to_singular(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if not self.singular:
            return np.full(theta.shape, np.inf)
        d = np.full(theta.shape, np.inf)
        for s in self.singular:
            u = np.mod(theta - s, self.period)
            d = np.minimum(d, np.minimum(u, self.period - u))
        return d

    def check(self, theta, guard: float | None = None) -> None:
        g = self.guard if guard is None else guard
        d = self.distance_to_singular(theta)
        if np.any(d < g):
            raise DomainError(
                f"theta within {g:g} of a singular angle of {self.name or 'the potential'}")

    def domain_intervals(self, lo: float = -math.pi, hi: float = math.pi,
                         guard: float | None = None) -> list[tuple[float, float]]:
        """Open theta-intervals in ``[lo, hi]`` that avoid the guarded singular set."""
        g = self.guard if guard is None else guard
        if not self.singular:
            return [(lo, hi)]
        pts = []
        for s in self.singular:
            k0 = math.floor((lo - s) / self.period) - 1
            k1 = math.ceil((hi - s) / self.period) + 1
            pts += [s + k * self.period for k in range(k0, k1 + 1)]
        pts = sorted(p for p in set(round(p, 14) for p in pts))
        edges = [lo] + [p for p in pts if lo < p < hi] + [hi]
        out = []
        for a, b in zip(edges[:-1], edges[1:]):
            a2 = a + g if a in pts or self.distance_to_singular(a) < g else a
            b2 = b - g if b in pts or self.distance_to_singular(b) < g else b
            if b2 > a2:
                out.append((a2, b2))
        return out

    def derivs(self, theta, order: int) -> list[np.ndarray]:
        return self.S.derivs(theta, order)


# -- explicit integral data ----------------------------------------------------

@dataclass(frozen=True)
class ExplicitIntegral:
    """Third-order integral data: leading coefficients and the functions g1, g2.

    ``g1``, ``g2`` are jet-capable callables of Cartesian ``(x, y)``.
    """

    coeffs: "object"  # ybuilder.YCoeffs; kept untyped to avoid an import cycle
    g1: Callable
    g2: Callable
    label: str = "Y"


@dataclass(frozen=True)
class PotentialModel:
    radial: RadialProfile
    angular: AngularProfile
    hbar: float = 0.0
    integral: Optional[ExplicitIntegral] = None
    extra_integrals: tuple[ExplicitIntegral, ...] = ()
    name: str = "model"
    classical_limit: bool = True
    radial_guard: float = 1e-6
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.hbar < 0:
            raise ValueError("hbar must be non-negative")

    @property
    def is_classical(self) -> bool:
        return self.hbar == 0.0

    @property
    def integrals(self) -> tuple[ExplicitIntegral, ...]:
        first = (self.integral,) if self.integral is not None else ()
        return first + tuple(self.extra_integrals)

    # -- domain -----------------------------------------------------------
    def check_polar(self, r, theta) -> None:
        r = np.asarray(r, dtype=float)
        if np.any(r < self.radial_guard):
            raise DomainError("radius inside the guard band around the origin")
        self.angular.check(theta)

    def check_point(self, x, y) -> None:
        self.check_polar(np.hypot(x, y), np.arctan2(y, x))

    # -- potential ----------------------------------------------------------
    def V_polar(self, r, theta):
        """``R(r) + S(theta)/r**2`` on floats, arrays or jets."""
        R = self.radial.lift(r) if isinstance(r, Jet) else self.radial(r)
        S = self.angular.S(theta)
        return R + S / (r * r)

    def V(self, x, y):
        if isinstance(x, Jet) or isinstance(y, Jet):
            r = J.hypot(x, y)
            theta = J.atan2(y, x)
            return self.V_polar(r, theta)
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        self.check_point(x, y)
        return self.V_polar(np.hypot(x, y), np.arctan2(y, x))

    def with_integral(self, integral: ExplicitIntegral | None, **kw) -> "PotentialModel":
        from dataclasses import replace
        return replace(self, integral=integral, **kw)


def eval_H(m: PotentialModel, p: PhasePoint) -> float:
    return 0.5 * (p.px ** 2 + p.py ** 2) + float(m.V(p.x, p.y))


def eval_X(m: PotentialModel, p: PhasePoint) -> float:
    m.check_point(p.x, p.y)
    L = angular_momentum(p.x, p.y, p.px, p.py)
    return L * L + 2.0 * float(m.angular.S(math.atan2(p.y, p.x)))


def grad_V(m: PotentialModel, x, y) -> tuple[float, float]:
    """Cartesian gradient by the chain rule from ``R'`` and ``S'``."""
    m.check_point(x, y)
    r = math.hypot(x, y)
    th = math.atan2(y, x)
    R1 = float(m.radial.derivs(r, 1)[1])
    S0, S1 = (float(v) for v in m.angular.derivs(th, 1))
    Vr = R1 - 2.0 * S0 / r ** 3
    Vt = S1 / r ** 2
    c, s = x / r, y / r
    return c * Vr - s * Vt / r, s * Vr + c * Vt / r
