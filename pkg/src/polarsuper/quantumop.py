"""Differential operators acting on analytic test functions, and commutator residuals.

Functions are represented by their bivariate jets at the evaluation points.
Each first-order derivative lowers the jet order by one, so a test function
of order 5 carries enough information to evaluate ``H Y psi`` and
``Y H psi`` exactly (up to roundoff) at the base points.  The commutator is
applied pointwise as ``H(Y psi) - Y(H psi)``; no operator algebra is expanded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .errors import ClassicalModeError, ConfigurationError
from .jets import Jet
from .ybuilder import YCoeffs


# -- operator tree ----------------------------------------------------------------

class DiffOperator:
    """Linear differential operator with analytic coefficients."""

    #: number of derivatives the operator takes (jet order consumed)
    order: int = 0
    hbar: float = 1.0

    def apply(self, f: Jet, X: Jet, Y: Jet) -> Jet:
        raise NotImplementedError

    def __call__(self, f: Jet, X: Jet, Y: Jet) -> Jet:
        if f.order < self.order:
            raise ConfigurationError(
                f"operator of order {self.order} needs a function jet of order >= {self.order}")
        return self.apply(f, X, Y)

    # algebra
    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        return Sum((self, other))

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return Sum((self, Scaled(-1.0, other)))

    def __matmul__(self, other: "DiffOperator") -> "DiffOperator":
        return Compose((self, other))

    def __rmul__(self, c) -> "DiffOperator":
        return Scaled(c, self)


@dataclass(frozen=True, eq=False)
class Multiply(DiffOperator):
    """Multiplication by an analytic coefficient ``fn(X, Y)`` (jet-capable)."""

    fn: Callable
    label: str = "f"

    def apply(self, f, X, Y):
        n = f.order
        c = self.fn(_trunc(X, n), _trunc(Y, n))
        return f * c if isinstance(c, Jet) else f * np.asarray(c)


@dataclass(frozen=True, eq=False)
class Partial(DiffOperator):
    var: int

    @property
    def order(self) -> int:  # type: ignore[override]
        return 1

    def apply(self, f, X, Y):
        return f.diff(self.var)


@dataclass(frozen=True, eq=False)
class Scaled(DiffOperator):
    c: complex
    op: DiffOperator

    @property
    def order(self) -> int:  # type: ignore[override]
        return self.op.order

    def apply(self, f, X, Y):
        return self.op(f, X, Y) * self.c


@dataclass(frozen=True, eq=False)
class Sum(DiffOperator):
    terms: tuple

    @property
    def order(self) -> int:  # type: ignore[override]
        return max((t.order for t in self.terms), default=0)

    def apply(self, f, X, Y):
        out = None
        for t in self.terms:
            v = t(f, X, Y)
            out = v if out is None else out + v
        if out is None:
            return f * 0.0
        return out


@dataclass(frozen=True, eq=False)
class Compose(DiffOperator):
    """``ops[0] @ ops[1] @ ...``: the rightmost factor acts first."""

    ops: tuple

    @property
    def order(self) -> int:  # type: ignore[override]
        return sum(o.order for o in self.ops)

    def apply(self, f, X, Y):
        for o in reversed(self.ops):
            f = o(f, X, Y)
        return f


def _trunc(j: Jet, n: int) -> Jet:
    return j.truncate(n)


# -- elementary operators -----------------------------------------------------------

def identity() -> DiffOperator:
    return Multiply(lambda X, Y: 1.0, "1")


def coord(var: int) -> DiffOperator:
    return Multiply((lambda X, Y: X) if var == 0 else (lambda X, Y: Y), "xy"[var])


def momentum(var: int, hbar: float) -> DiffOperator:
    return Scaled(-1j * hbar, Partial(var))


def angular_momentum(hbar: float) -> DiffOperator:
    """``L3 = x p2 - y p1``."""
    return coord(0) @ momentum(1, hbar) - coord(1) @ momentum(0, hbar)


def anticommutator(a: DiffOperator, b: DiffOperator) -> DiffOperator:
    return a @ b + b @ a


def power(op: DiffOperator, k: int) -> DiffOperator:
    if k == 0:
        return identity()
    return Compose(tuple([op] * k))


# -- H, X, Y --------------------------------------------------------------------

def _require_quantum(hbar: float) -> None:
    if hbar <= 0:
        raise ClassicalModeError("operators need hbar > 0; the model is classical")


def build_H_op(m) -> DiffOperator:
    """``-(hbar^2/2)(dxx + dyy) + V``."""
    _require_quantum(m.hbar)
    lap = Partial(0) @ Partial(0) + Partial(1) @ Partial(1)
    return Scaled(-0.5 * m.hbar ** 2, lap) + Multiply(m.V, "V")


def build_X_op(m) -> DiffOperator:
    """``L3^2 + 2 S(theta)``."""
    _require_quantum(m.hbar)
    L = angular_momentum(m.hbar)
    S = m.angular.S
    return L @ L + Multiply(lambda X, Y: 2.0 * S(J.atan2(Y, X)), "2S")


def build_Y_op(c: YCoeffs, g1: Callable | None, g2: Callable | None, hbar: float) -> DiffOperator:
    """Symmetric third-order operator with principal symbol ``2 * eval_Y_classical``.

    ``sum A_ijk {L^i, p1^j p2^k} + {g1, p1} + {g2, p2}`` rewritten in the
    ``(A_i, B_i, C_i, D0)`` basis.
    """
    _require_quantum(hbar)
    L = angular_momentum(hbar)
    p1, p2 = momentum(0, hbar), momentum(1, hbar)
    L2 = L @ L
    psq = p1 @ p1 + p2 @ p2
    terms: list[DiffOperator] = []

    def add(coef, op):
        if coef:
            terms.append(Scaled(coef, op))

    add(2 * c.D0, L @ L2)
    add(c.C1, anticommutator(L2, p1))
    add(c.C2, anticommutator(L2, p2))
    add(c.B0, anticommutator(L, psq))
    add(c.B1, anticommutator(L, p1 @ p1 - p2 @ p2))
    add(2 * c.B2, anticommutator(L, p1 @ p2))
    add(2 * c.A1, p1 @ p1 @ p1 - Scaled(3.0, p1 @ p2 @ p2))
    add(2 * c.A2, Scaled(3.0, p2 @ p1 @ p1) - p2 @ p2 @ p2)
    add(2 * c.A3, p1 @ psq)
    add(2 * c.A4, p2 @ psq)
    if g1 is not None:
        terms.append(anticommutator(Multiply(g1, "g1"), p1))
    if g2 is not None:
        terms.append(anticommutator(Multiply(g2, "g2"), p2))
    if not terms:
        return Scaled(0.0, identity())
    return Sum(tuple(terms))


def build_integral_ops(m) -> list[DiffOperator]:
    return [build_Y_op(I.coeffs, I.g1, I.g2, m.hbar) for I in m.integrals]


# -- test functions ---------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """``poly(x - x0, y - y0) * exp(-(dx/wx)^2/2 - (dy/wy)^2/2)``.

    ``poly`` maps exponent pairs ``(i, j)`` to coefficients.
    """

    __test__ = False  # not a pytest class

    center: tuple[float, float]
    widths: tuple[float, float] = (1.0, 1.0)
    poly: tuple[tuple[tuple[int, int], float], ...] = (((0, 0), 1.0),)
    amplitude: float = 1.0

    def __call__(self, X, Y):
        dx, dy = X - self.center[0], Y - self.center[1]
        g = J.exp(-0.5 * (dx * dx) / self.widths[0] ** 2 - 0.5 * (dy * dy) / self.widths[1] ** 2)
        p = 0.0
        for (i, j), a in self.poly:
            p = p + a * (dx ** i if i else 1.0) * (dy ** j if j else 1.0)
        return g * p * self.amplitude

    def jet(self, x, y, order: int = 5) -> Jet:
        X = Jet.variable(np.asarray(x, float), 0, order)
        Y = Jet.variable(np.asarray(y, float), 1, order)
        out = self(X, Y)
        if not isinstance(out, Jet):
            out = Jet.constant(out, order)
        return out

    def scaled(self, s: float) -> "TestFunction":
        return TestFunction(self.center, self.widths, self.poly, self.amplitude * s)


def random_test_functions(rng: np.random.Generator, centers: np.ndarray, n: int = 6) -> list[TestFunction]:
    """Gaussians with widths in [0.5, 2] and random cubic prefactors."""
    out = []
    idx = [(i, j) for i in range(4) for j in range(4 - i)]
    for k in range(n):
        c = centers[k % len(centers)]
        w = tuple(float(v) for v in rng.uniform(0.5, 2.0, 2))
        coeffs = rng.normal(size=len(idx))
        out.append(TestFunction((float(c[0]), float(c[1])), w, tuple(zip(idx, map(float, coeffs)))))
    return out


def sample_domain_points(m, n: int, rng: np.random.Generator, r_range=(0.6, 2.0),
                         margin: float = 0.1, theta_window=None) -> np.ndarray:
    """Random points in the model domain, at least ``margin`` from singular angles."""
    intervals = m.angular.domain_intervals(guard=margin) if theta_window is None else [theta_window]
    lengths = np.array([b - a for a, b in intervals])
    pts = []
    while len(pts) < n:
        k = rng.choice(len(intervals), p=lengths / lengths.sum())
        a, b = intervals[k]
        th = rng.uniform(a, b)
        r = rng.uniform(*r_range)
        pts.append((r * math.cos(th), r * math.sin(th)))
    return np.array(pts)


# -- residuals ------------------------------------------------------------------

@dataclass
class CommutatorStats:
    sup: float
    rms: float
    worst_test: int
    worst_point: tuple[float, float]
    per_test: list[float] = field(default_factory=list)
    n_points: int = 0

    def as_dict(self) -> dict:
        return {"sup": self.sup, "rms": self.rms, "worst_test": self.worst_test,
                "worst_point": list(self.worst_point), "per_test": list(self.per_test),
                "n_points": self.n_points}


def apply_at(op: DiffOperator, f: Callable, points: np.ndarray, order: int) -> np.ndarray:
    pts = np.asarray(points, float)
    X = Jet.variable(pts[:, 0], 0, order)
    Y = Jet.variable(pts[:, 1], 1, order)
    return op(f(X, Y), X, Y)


def commutator_values(Hop: DiffOperator, Yop: DiffOperator, psi: Callable, points: np.ndarray):
    """``(HY psi - YH psi, H psi, Y psi)`` at the points."""
    n = Hop.order + Yop.order
    pts = np.asarray(points, float)
    X = Jet.variable(pts[:, 0], 0, n)
    Y = Jet.variable(pts[:, 1], 1, n)
    f = psi(X, Y)
    Yf = Yop(f, X, Y)
    Hf = Hop(f, X, Y)
    HYf = Hop(Yf, X, Y).value
    YHf = Yop(Hf, X, Y).value
    return HYf - YHf, Hf.value, Yf.value


def commutator_residual(Hop: DiffOperator, Yop: DiffOperator, tests: Sequence[TestFunction],
                        points) -> CommutatorStats:
    """``sup |(HY - YH) psi| / max(1, |H psi|, |Y psi|)`` over tests and points."""
    pts = np.asarray(points, float)
    sup, sq, cnt = -1.0, 0.0, 0
    worst = (0, (float("nan"), float("nan")))
    per = []
    for k, t in enumerate(tests):
        comm, Hv, Yv = commutator_values(Hop, Yop, t, pts)
        scale = np.maximum(1.0, np.maximum(np.abs(Hv), np.abs(Yv)))
        r = np.abs(comm) / scale
        i = int(np.argmax(r))
        per.append(float(r.max()))
        if r[i] > sup:
            sup = float(r[i])
            worst = (k, (float(pts[i, 0]), float(pts[i, 1])))
        sq += float(np.sum(r * r))
        cnt += r.size
    return CommutatorStats(sup, math.sqrt(sq / max(cnt, 1)), worst[0], worst[1], per, cnt)


def symbol_of(make_op: Callable[[float], DiffOperator], x: float, y: float, px: float, py: float,
              hbars=(0.2, 0.1, 0.05, 0.025)) -> float:
    """``lim_{hbar->0} e^{-i p.x/hbar} Op_hbar e^{i p.x/hbar}`` at ``(x, y)``.

    The conjugated operator is a polynomial of degree <= 3 in ``hbar`` for
    third-order operators; Lagrange extrapolation from four ``hbar`` values
    recovers the constant term exactly up to roundoff.
    """
    vals = []
    for h in hbars:
        op = make_op(h)
        n = op.order
        X = Jet.variable(np.array([x]), 0, n)
        Y = Jet.variable(np.array([y]), 1, n)
        dx, dy = X - x, Y - y
        wave = J.exp((dx * px + dy * py) * (1j / h))
        vals.append(complex(op(wave, X, Y).value[0]))
    hs = np.asarray(hbars, float)
    out = 0.0
    for i, hi in enumerate(hs):
        w = 1.0
        for j, hj in enumerate(hs):
            if j != i:
                w *= (0.0 - hj) / (hi - hj)
        out += w * vals[i]
    return out
