"""Determining equations of the third-order integral, evaluated as residuals.

Every equation is transcribed as a list of additive terms.  The residual at a
point is the sum of the terms divided by ``max(1, max_k |term_k|)``, so that
equations involving large but cancelling terms near singular angles are judged
relative to their own size.  The raw absolute sup is reported alongside.

Equations are identified by a content hash of their transcription string.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .errors import ConfigurationError
from .jets import Jet
from .phasecore import AngularProfile, PotentialModel, RadialProfile, UFunc, as_ufunc
from .ybuilder import YCoeffs, eval_F

ANALYTIC_TOL = 1e-8
NUMERIC_TOL = 1e-4

# -- equation registry ------------------------------------------------------------

EQUATIONS: dict[str, str] = {
    "det.quantum": "G1 Vr + G2 Vt = hbar^2/4 [F1 Vrrr + F2 Vrrt + F3 Vrtt + F4 Vttt + r F3 Vrr"
                   " + (3 r F4 - 2 F2/r) Vrt - 2 F3/r Vtt + (-F3 + 2 C1 c + 2 C2 s) Vr"
                   " + (-2 F4 + 2 F2/r^2 + 8 D0 + (-2 C1 s + 2 C2 c)/r) Vt]",
    "det.G1r": "(G1)_r = 3 F1 Vr + F2 Vt",
    "det.G2t": "(G2)_t / r^2 = F3 Vr + 3 F4 Vt - G1/r^3",
    "det.G2r": "(G2)_r = 2 (F2 Vr + F3 Vt) - (G1)_t / r^2",
    "compat": "0 = r^4 F3 Vrrr + (3 r^4 F4 - 2 r^2 F2) Vrrt + (3 F1 - 2 r^2 F3) Vrtt + F2 Vttt"
              " + (2 r^4 F3r + 6 r^3 F3 - 2 r^2 F2t - 3 r F1) Vrr + (2 F2t - 4 r F3 - 2 r^2 F3r) Vtt"
              " + (6 r^4 F4r + 18 r^3 F4 - 2 r^2 (F2r + F3t) - 5 r F2 + 6 F1t) Vrt"
              " + (r^4 F3rr + 6 r^3 F3r + r^2 (6 F3 - 2 F2rt) - 4 r F2t + 3 F1tt) Vr"
              " + (3 r^4 F4rr + 18 r^3 F4r + r^2 (18 F4 - 2 F3rt) - r (F2r + 4 F3t) + F2tt) Vt",
    "radial.A1": "A1 (r^4 R5 + 7 r^3 R4 - r^2 R3 - 18 r R2 + 18 R1)",
    "radial.A2": "A2 (r^4 R5 + 7 r^3 R4 - r^2 R3 - 18 r R2 + 18 R1)",
    "radial.B1": "B1 (r^4 R5 + 14 r^3 R4 + 48 r^2 R3 + 24 r R2 - 24 R1)",
    "radial.B2": "B2 (r^4 R5 + 14 r^3 R4 + 48 r^2 R3 + 24 r R2 - 24 R1)",
    "radial.C1A3": "(C1 r^6 + A3 r^4) R5 + (20 C1 r^5 + 11 A3 r^3) R4 + (120 C1 r^4 + 27 A3 r^2) R3"
                   " + (240 C1 r^3 + 6 A3 r) R2 + (120 C1 r^2 - 6 A3) R1",
    "radial.C2A4": "(C2 r^6 + A4 r^4) R5 + (20 C2 r^5 + 11 A4 r^3) R4 + (120 C2 r^4 + 27 A4 r^2) R3"
                   " + (240 C2 r^3 + 6 A4 r) R2 + (120 C2 r^2 - 6 A4) R1",
    "generic.beta": "b'' + b",
    "generic.xi": "xi' - 3 D0 S'",
    "generic.S": "B0 (S''' + 4 S')",
    "coulomb.beta": "b'' + b - 2 (C1 c + C2 s) S'' + 5 (C1 s - C2 c) S' + 2 (C1 c + C2 s) S"
                    " - 6 a (B1 s2 - B2 c2)",
    "coulomb.B": "(B1 c2 + B2 s2 + B0) S''' + 8 (-B1 s2 + B2 c2) S'' + 4 (-5 B1 c2 - 5 B2 s2 + B0) S'"
                 " + 16 (B1 s2 - B2 c2) S - 3 a (-15 A1 c3 - 15 A2 s3 + A3 c + A4 s)",
    "coulomb.A": "(3 A1 s3 - 3 A2 c3 + A3 s - A4 c) S''' + (36 A1 c3 + 36 A2 s3 + 4 A3 c + 4 A4 s) S''"
                 " - (132 A1 s3 - 132 A2 c3 - 4 A3 s + 4 A4 c) S' - (144 A1 c3 + 144 A2 s3 - 16 A3 c - 16 A4 s) S",
    "coulomb.xi": "hbar^2 (D0 S''' + a C1 c + a C2 s) - 4 xi S' + 4 a b; xi = 3 D0 S - a (C1 s - C2 c) + xi0",
    "coulomb.C": "hbar^2 ((-C1 s + C2 c) S''' - 4 (C1 c + C2 s) S'' + 6 (C1 s - C2 c) S' + 4 (C1 c + C2 s) S"
                 " + 6 a (-B1 s2 + B2 c2)) - [4 S' b' - 8 S b - 8 (C1 c + C2 s) S'^2"
                 " + 12 a (B1 c2 + B2 s2 + B0) S' - 12 a^2 (A1 c3 + A2 s3 + A3 c + A4 s)]",
    "coulomb.Bq": "hbar^2 ((B1 c2 + B2 s2 - B0) S''' + 8 (-B1 s2 + B2 c2) S'' - 4 (5 B1 c2 + 5 B2 s2 + B0) S'"
                  " + 16 (B1 s2 - B2 c2) S) - [-3 a hbar^2 (5 A1 c3 + 5 A2 s3 + A3 c + A4 s)"
                  " + 12 a (3 A1 s3 - 3 A2 c3 + A3 s - A4 c) S' + 36 a (A1 c3 + A2 s3 + A3 c + A4 s) S"
                  " + 2 (B1 c2 + B2 s2 + B0) S' S'' - 12 (B1 s2 - B2 c2) S'^2 - 16 (B1 c2 + B2 s2 + B0) S S']",
    "coulomb.Aq": "hbar^2 ((3 A1 s3 - 3 A2 c3 - 3 A3 s + 3 A4 c) S''' + (36 A1 c3 + 36 A2 s3 - 12 A3 c - 12 A4 s) S''"
                  " + (-132 A1 s3 + 132 A2 c3 - 12 A3 s + 12 A4 c) S' + (-144 A1 c3 - 144 A2 s3 - 48 A3 c - 48 A4 s) S)"
                  " - [-72 (A1 c3 + A2 s3 + A3 c + A4 s) S^2 + (-120 A1 s3 + 120 A2 c3 - 40 A3 s + 40 A4 c) S S'"
                  " + (54 A1 c3 + 54 A2 s3 + 6 A3 c + 6 A4 s) S'^2 + (6 A1 s3 - 6 A2 c3 + 2 A3 s - 2 A4 c) S' S'']",
    "osc.B": "(B1 c2 + B2 s2 + B0) S''' + 8 (-B1 s2 + B2 c2) S'' + 4 (-5 B1 c2 - 5 B2 s2 + B0) S'"
             " + 16 (B1 s2 - B2 c2) S",
    "osc.D": "hbar^2 D0 S''' - 12 D0 S S' - 4 xi0 S'",
    "osc.Bq": "hbar^2 ((B1 c2 + B2 s2 - B0) S''' + 8 (-B1 s2 + B2 c2) S'' - 4 (5 B1 c2 + 5 B2 s2 + B0) S'"
              " + 16 (B1 s2 - B2 c2) S) - [2 (B1 c2 + B2 s2 + B0) S' S'' - 12 (B1 s2 - B2 c2) S'^2"
              " - 16 (B1 c2 + B2 s2 + B0) S S']",
    "c1d0.beta": "b'' + b + C1 (-2 c S'' + 5 s S' + 2 c S)",
    "c1d0.xi": "hbar^2 D0 S''' - 4 xi S'; xi = 3 D0 S + xi0",
    "c1d0.C": "hbar^2 C1 (-s S''' - 4 c S'' + 6 s S' + 4 c S) - (4 S' b' - 8 S b - 8 C1 c S'^2)",
    "T.fourth": "hbar^2 (s T'''' + 4 c T''' - 6 s T'' - 4 c T') - 12 s T' T'' - 4 c T T''"
                " - 4 (b1 s - b2 c) T'' - 16 c T'^2 + 8 s T T' - 8 (b1 c + b2 s) T'",
    "T.first": "hbar^2 z^2 (1+z^2)^2 T''' + 2 hbar^2 z (1+z^2)(1+3z^2) T'' - 6 z^2 (1+z^2) T'^2"
               " + 2 (-hbar^2 + hbar^2 z^2 + 3 hbar^2 z^4 - 2 b1 z^2 + 2 b2 z - 2 z T) T' + 2 T^2 - 4 b2 T - K1",
    "T.second": "[T'' + (z (2z^2+1) T' - T + b2)/(z^2 (z^2+1))]^2 - [4 z^4 (z^2+1)^2 T'^3"
                " + z^2 (z^2+1) (4 z T + hbar^2 (2z^2+1) + 4 b1 z^2 - 4 b2 z) T'^2"
                " - 2 z (z^2+1) (2 z T^2 - (4 b2 z + hbar^2) T - (K1 z - b2 hbar^2)) T'"
                " - (4 z T^3 + (hbar^2 (z^2-1) + 4 b1 z^2 - 12 b2 z) T^2"
                " - 2 (K1 z + b2 (4 b1 + hbar^2) z^2 - 4 b2^2 z - b2 hbar^2) T"
                " - (hbar^2 K2 z^2 - 2 b2 K1 z + b2^2 hbar^2))] / (hbar^2 z^4 (z^2+1)^3)",
    "class1": "3 z^2 (1+z^2) T'^2 + 2 z T T' - T^2 + 2 (b1 z^2 - b2 z) T' + 2 b2 T + K1/2",
}


def equation_id(key: str) -> str:
    """``key@hash``: the hash is over the transcription text, not a printed number."""
    h = hashlib.sha1(EQUATIONS[key].encode()).hexdigest()[:8]
    return f"{key}@{h}"


# -- grids and reports -------------------------------------------------------------

@dataclass(frozen=True)
class EvalGrid:
    r: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.r, dtype=float))
        th = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if r.size == 0 or th.size == 0:
            raise ConfigurationError("evaluation grid is empty")
        if np.any(r <= 0) or not np.all(np.isfinite(r)) or not np.all(np.isfinite(th)):
            raise ConfigurationError("grid radii must be positive and finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", th)

    @classmethod
    def default(cls, angular: AngularProfile | None = None, nr: int = 24, nth: int = 72,
                r_range=(0.2, 5.0), guard: float = 1e-2, theta_range=(-math.pi, math.pi)) -> "EvalGrid":
        """Log-spaced radii times angles spread uniformly over the guarded domain."""
        r = np.geomspace(r_range[0], r_range[1], nr)
        if angular is None or not angular.singular:
            th = np.linspace(theta_range[0], theta_range[1], nth, endpoint=False)
        else:
            th = _spread(angular.domain_intervals(*theta_range, guard=guard), nth)
        return cls(r, th)

    def refined(self, factor: int = 2) -> "EvalGrid":
        """A grid with new points strictly between the old ones (for re-verification)."""
        def mid(v):
            v = np.sort(v)
            out = []
            for a, b in zip(v[:-1], v[1:]):
                out += list(a + (b - a) * (np.arange(1, factor + 1) / (factor + 1)))
            return np.array(out)
        return EvalGrid(mid(self.r), mid(self.theta))

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        R, T = np.meshgrid(self.r, self.theta, indexing="ij")
        return R.ravel(), T.ravel()

    def check(self, m: PotentialModel) -> None:
        R, T = self.mesh()
        m.check_polar(R, T)

    def meta(self) -> dict:
        return {"nr": int(self.r.size), "ntheta": int(self.theta.size),
                "r_min": float(self.r.min()), "r_max": float(self.r.max()),
                "theta_min": float(self.theta.min()), "theta_max": float(self.theta.max())}


def _spread(intervals, n: int) -> np.ndarray:
    lengths = np.array([b - a for a, b in intervals])
    counts = np.maximum(1, np.round(n * lengths / lengths.sum()).astype(int))
    out = []
    for (a, b), k in zip(intervals, counts):
        out += list(a + (b - a) * (np.arange(k) + 0.5) / k)
    return np.array(out)


def theta_grid(angular: AngularProfile | None, n: int = 72, guard: float = 1e-2,
               lo: float = -math.pi, hi: float = math.pi) -> np.ndarray:
    if angular is None or not angular.singular:
        return np.linspace(lo, hi, n, endpoint=False)
    return _spread(angular.domain_intervals(lo, hi, guard=guard), n)


@dataclass
class EquationResidual:
    eq_id: str
    sup: float
    rms: float
    sup_abs: float
    worst: tuple
    passed: bool

    def as_dict(self) -> dict:
        return {"id": self.eq_id, "sup": self.sup, "rms": self.rms, "sup_abs": self.sup_abs,
                "worst": list(self.worst), "pass": self.passed}


@dataclass
class ResidualReport:
    name: str
    equations: list[EquationResidual]
    tol: float
    method: str = "analytic"
    grid: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def sup(self) -> float:
        return max((e.sup for e in self.equations), default=0.0)

    @property
    def rms(self) -> float:
        return max((e.rms for e in self.equations), default=0.0)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.equations)

    def __getitem__(self, key: str) -> EquationResidual:
        for e in self.equations:
            if e.eq_id == key or e.eq_id.split("@")[0] == key:
                return e
        raise KeyError(key)

    def keys(self) -> list[str]:
        return [e.eq_id.split("@")[0] for e in self.equations]

    def as_dict(self) -> dict:
        return {"name": self.name, "tol": self.tol, "method": self.method, "pass": self.passed,
                "sup": self.sup, "grid": self.grid, "info": self.info,
                "equations": [e.as_dict() for e in self.equations]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)


def _summarize(key: str, terms: Sequence, coords: dict, tol: float) -> EquationResidual:
    arrs = [np.asarray(J.value_of(t)) for t in terms]
    shape = np.broadcast_shapes(*(a.shape for a in arrs))
    arrs = [np.broadcast_to(a, shape) for a in arrs]
    total = sum(arrs)
    scale = np.maximum(1.0, np.max(np.abs(np.stack(arrs)), axis=0))
    rel = np.abs(total) / scale
    if rel.size == 0:
        return EquationResidual(equation_id(key), 0.0, 0.0, 0.0, (), True)
    i = int(np.argmax(rel))
    worst = tuple(float(np.broadcast_to(v, shape).ravel()[i]) for v in coords.values())
    sup = float(rel.max())
    return EquationResidual(equation_id(key), sup, float(np.sqrt(np.mean(rel ** 2))),
                            float(np.abs(total).max()), worst, sup < tol)


def _report(name, keyed_terms, coords, tol, method, grid_meta, info=None) -> ResidualReport:
    eqs = [_summarize(k, t, coords, tol) for k, t in keyed_terms]
    return ResidualReport(name, eqs, tol, method, grid_meta, info or {})


def _method(*numeric_flags) -> tuple[str, float]:
    if any(numeric_flags):
        return "numeric", NUMERIC_TOL
    return "analytic", ANALYTIC_TOL


# -- derivatives on the polar grid --------------------------------------------------

def _polar_jets(grid: EvalGrid, order: int):
    R, T = grid.mesh()
    return R, T, Jet.variable(R, 0, order), Jet.variable(T, 1, order)


def _V_derivs(m: PotentialModel, rj: Jet, tj: Jet) -> dict:
    V = m.V_polar(rj, tj)
    out = {}
    for a in range(V.order + 1):
        for b in range(V.order + 1 - a):
            out[(a, b)] = V.partial(a, b)
    return out


def G_from_g(g1: Callable, g2: Callable):
    """Polar ``(G1, G2)`` callables from Cartesian ``g1(x, y), g2(x, y)``."""
    def G1(r, t):
        x, y = r * J.cos(t), r * J.sin(t)
        return g1(x, y) * J.cos(t) + g2(x, y) * J.sin(t)

    def G2(r, t):
        x, y = r * J.cos(t), r * J.sin(t)
        return (-g1(x, y) * J.sin(t) + g2(x, y) * J.cos(t)) / r
    return G1, G2


def _G_jets(G1, G2, rj, tj, need: int):
    if G1 is None or G2 is None:
        raise ConfigurationError("G1 and G2 callables are required")
    g1 = G1(rj.truncate(need), tj.truncate(need))
    g2 = G2(rj.truncate(need), tj.truncate(need))
    if not isinstance(g1, Jet) or not isinstance(g2, Jet):
        raise ConfigurationError("G1, G2 must accept jets so that their derivatives are available")
    return g1, g2


# -- the four linear determining equations ----------------------------------------

def residual_det_linear(m: PotentialModel, c: YCoeffs, G1, G2, grid: EvalGrid,
                        tol: float | None = None) -> ResidualReport:
    """The three equations linear in ``G1, G2``."""
    grid.check(m)
    R, T, rj, tj = _polar_jets(grid, 1)
    V = m.V_polar(rj, tj)
    Vr, Vt = V.partial(1, 0), V.partial(0, 1)
    F1, F2, F3, F4 = (J.value_of(f) for f in eval_F(c, R, T))
    g1, g2 = _G_jets(G1, G2, rj, tj, 1)
    method, dtol = _method(m.angular.numeric, m.radial.numeric)
    terms = [
        ("det.G1r", [g1.partial(1, 0), -3 * F1 * Vr, -F2 * Vt]),
        ("det.G2t", [g2.partial(0, 1) / R ** 2, -F3 * Vr, -3 * F4 * Vt, g1.value / R ** 3]),
        ("det.G2r", [g2.partial(1, 0), -2 * F2 * Vr, -2 * F3 * Vt, g1.partial(0, 1) / R ** 2]),
    ]
    return _report("det_linear", terms, {"r": R, "theta": T}, tol or dtol, method, grid.meta())


def residual_det_quantum(m: PotentialModel, c: YCoeffs, G1, G2, grid: EvalGrid,
                         tol: float | None = None) -> ResidualReport:
    """The equation carrying the ``hbar^2`` bracket; classical when ``hbar = 0``."""
    grid.check(m)
    R, T, rj, tj = _polar_jets(grid, 3)
    d = _V_derivs(m, rj, tj)
    F1, F2, F3, F4 = (J.value_of(f) for f in eval_F(c, R, T))
    g1, g2 = _G_jets(G1, G2, rj, tj, 0)
    h2 = m.hbar ** 2 / 4
    cs, sn = np.cos(T), np.sin(T)
    terms = [g1.value * d[1, 0], g2.value * d[0, 1]]
    if h2:
        br = [F1 * d[3, 0], F2 * d[2, 1], F3 * d[1, 2], F4 * d[0, 3], R * F3 * d[2, 0],
              (3 * R * F4 - 2 / R * F2) * d[1, 1], -2 / R * F3 * d[0, 2],
              (-F3 + 2 * c.C1 * cs + 2 * c.C2 * sn) * d[1, 0],
              (-2 * F4 + 2 / R ** 2 * F2 + 8 * c.D0 + (-2 * c.C1 * sn + 2 * c.C2 * cs) / R) * d[0, 1]]
        terms += [-h2 * b for b in br]
    method, dtol = _method(m.angular.numeric, m.radial.numeric)
    return _report("det_quantum", [("det.quantum", terms)], {"r": R, "theta": T},
                   tol or dtol, method, grid.meta(), {"hbar": m.hbar})


def residual_compatibility(m: PotentialModel, c: YCoeffs, grid: EvalGrid,
                           tol: float | None = None) -> ResidualReport:
    """The third-order linear PDE for ``V`` implied by the three linear equations."""
    grid.check(m)
    R, T, rj, tj = _polar_jets(grid, 3)
    d = _V_derivs(m, rj, tj)
    Fj = eval_F(c, rj.truncate(2), tj.truncate(2))
    Fj = [f if isinstance(f, Jet) else Jet.constant(f + 0 * R, 2) for f in Fj]
    F1, F2, F3, F4 = (f.value for f in Fj)
    P = lambda f, a, b: Fj[f - 1].partial(a, b)  # noqa: E731
    r = R
    terms = [
        r ** 4 * F3 * d[3, 0], (3 * r ** 4 * F4 - 2 * r ** 2 * F2) * d[2, 1],
        (3 * F1 - 2 * r ** 2 * F3) * d[1, 2], F2 * d[0, 3],
        (2 * r ** 4 * P(3, 1, 0) + 6 * r ** 3 * F3 - 2 * r ** 2 * P(2, 0, 1) - 3 * r * F1) * d[2, 0],
        (2 * P(2, 0, 1) - 4 * r * F3 - 2 * r ** 2 * P(3, 1, 0)) * d[0, 2],
        (6 * r ** 4 * P(4, 1, 0) + 18 * r ** 3 * F4 - 2 * r ** 2 * (P(2, 1, 0) + P(3, 0, 1))
         - 5 * r * F2 + 6 * P(1, 0, 1)) * d[1, 1],
        (r ** 4 * P(3, 2, 0) + 6 * r ** 3 * P(3, 1, 0) + r ** 2 * (6 * F3 - 2 * P(2, 1, 1))
         - 4 * r * P(2, 0, 1) + 3 * P(1, 0, 2)) * d[1, 0],
        (3 * r ** 4 * P(4, 2, 0) + 18 * r ** 3 * P(4, 1, 0) + r ** 2 * (18 * F4 - 2 * P(3, 1, 1))
         - r * (P(2, 1, 0) + 4 * P(3, 0, 1)) + P(2, 0, 2)) * d[0, 1],
    ]
    method, dtol = _method(m.angular.numeric, m.radial.numeric)
    return _report("compatibility", [("compat", terms)], {"r": R, "theta": T},
                   tol or dtol, method, grid.meta())


# -- radial equations ------------------------------------------------------------

def _radial_terms(key: str, c: YCoeffs, r, d, literal_a_term: bool):
    R1, R2, R3, R4, R5 = d[1:6]
    if key in ("radial.A1", "radial.A2"):
        k = c.A1 if key.endswith("A1") else c.A2
        return [k * r ** 4 * R5, 7 * k * r ** 3 * R4, -k * r ** 2 * R3, -18 * k * r * R2, 18 * k * R1]
    if key in ("radial.B1", "radial.B2"):
        k = c.B1 if key.endswith("B1") else c.B2
        return [k * r ** 4 * R5, 14 * k * r ** 3 * R4, 48 * k * r ** 2 * R3, 24 * k * r * R2, -24 * k * R1]
    C, A = (c.C1, c.A3) if key == "radial.C1A3" else (c.C2, c.A4)
    last = -6 * A * (r if literal_a_term else 1.0) * R1
    return [(C * r ** 6 + A * r ** 4) * R5, (20 * C * r ** 5 + 11 * A * r ** 3) * R4,
            (120 * C * r ** 4 + 27 * A * r ** 2) * R3, (240 * C * r ** 3 + 6 * A * r) * R2,
            120 * C * r ** 2 * R1, last]


def radial_gates(c: YCoeffs) -> list[str]:
    keys = []
    if c.A1:
        keys.append("radial.A1")
    if c.A2:
        keys.append("radial.A2")
    if c.B1:
        keys.append("radial.B1")
    if c.B2:
        keys.append("radial.B2")
    if c.C1 or c.A3:
        keys.append("radial.C1A3")
    if c.C2 or c.A4:
        keys.append("radial.C2A4")
    return keys


def residual_radial(c: YCoeffs, R: RadialProfile, r_grid, tol: float | None = None,
                    literal_a_term: bool = False) -> ResidualReport:
    """The six radial ODEs, each only when its coefficient gate is open.

    ``literal_a_term`` keeps the ``-6 A3 r R'`` term as printed; by default the
    dimensionally consistent ``-6 A3 R'`` is used (see the decisions ledger).
    """
    r = np.asarray(r_grid, dtype=float)
    if r.size == 0 or np.any(r <= 0):
        raise ConfigurationError("radial grid must be non-empty and positive")
    d = R.derivs(r, 5)
    terms = [(k, _radial_terms(k, c, r, d, literal_a_term)) for k in radial_gates(c)]
    method, dtol = _method(R.numeric)
    return _report("radial", terms, {"r": r}, tol or dtol, method,
                   {"nr": int(r.size), "r_min": float(r.min()), "r_max": float(r.max())})


# -- angular systems -------------------------------------------------------------------

def _angular_derivs(f, theta, order: int) -> list[np.ndarray]:
    f = as_ufunc(f)
    return f.derivs(theta, order)


def _trig(th):
    return {"c": np.cos(th), "s": np.sin(th), "c2": np.cos(2 * th), "s2": np.sin(2 * th),
            "c3": np.cos(3 * th), "s3": np.sin(3 * th)}


def residual_generic_case(S, beta, xi, B0: float, D0: float, theta_grid,
                          tol: float | None = None, literal: bool = False) -> ResidualReport:
    """beta'' + beta, xi' - 3 D0 S' and B0 (S^(3) + 4 S').

    The sign of the last condition follows from the theta-equation with the
    generic-case G1, G2; ``literal=True`` uses the printed minus sign.
    """
    th = np.asarray(theta_grid, dtype=float)
    S0, S1, S2, S3 = _angular_derivs(S, th, 3)
    b0, b1, b2 = _angular_derivs(beta, th, 2)
    x0, x1 = _angular_derivs(xi, th, 1)
    terms = [("generic.beta", [b2, b0]),
             ("generic.xi", [x1, -3 * D0 * S1]),
             ("generic.S", [B0 * S3, (-4 if literal else 4) * B0 * S1])]
    numeric = any(as_ufunc(f).numeric for f in (S, beta, xi))
    method, dtol = _method(numeric)
    return _report("generic_case", terms, {"theta": th}, tol or dtol, method, {"ntheta": int(th.size)})


def generic_case_G(R: RadialProfile, S, beta, xi, B0: float):
    """``(G1, G2)`` of the generic case (only B0, D0 nonzero)."""
    S, beta, xi = as_ufunc(S), as_ufunc(beta), as_ufunc(xi)
    dS, ddS, db = S.derivative(1), S.derivative(2), beta.derivative(1)

    def G1(r, t):
        return -B0 * dS(t) / r + beta(t)

    def G2(r, t):
        Rv = R.lift(r) if isinstance(r, Jet) else R(r)
        return 2 * B0 * (Rv + S(t) / (r * r)) - B0 * ddS(t) / (2 * r * r) + db(t) / r + xi(t)
    return G1, G2


def coulomb_terms(th, Sd, bd, c: YCoeffs, a: float, hbar: float, xi0: float,
                  fix_a4: bool = True) -> list[tuple[str, list]]:
    """Terms of the seven angular equations for ``R = a/r``.

    ``Sd = [S, S', S'', S''']``, ``bd = [b, b', b'']`` evaluated at ``th``.
    ``fix_a4`` reads the ``6 A3 sin`` entry of the last equation as ``6 A4 sin``.
    """
    S0, S1, S2, S3 = Sd
    b0, b1, b2 = bd
    t = _trig(th)
    c1, s1, c2, s2, c3, s3 = t["c"], t["s"], t["c2"], t["s2"], t["c3"], t["s3"]
    A1, A2, A3, A4 = c.A1, c.A2, c.A3, c.A4
    B0, B1, B2, C1, C2, D0 = c.B0, c.B1, c.B2, c.C1, c.C2, c.D0
    h2 = hbar ** 2
    Cc = C1 * c1 + C2 * s1
    Cs = C1 * s1 - C2 * c1
    Bc = B1 * c2 + B2 * s2
    Bs = B1 * s2 - B2 * c2
    Ac = A1 * c3 + A2 * s3 + A3 * c1 + A4 * s1
    xi = 3 * D0 * S0 - a * (C1 * s1 - C2 * c1) + xi0
    a4s = A4 if fix_a4 else A3
    return [
        ("coulomb.beta", [b2, b0, -2 * Cc * S2, 5 * Cs * S1, 2 * Cc * S0, -6 * a * Bs]),
        ("coulomb.B", [(Bc + B0) * S3, -8 * Bs * S2, 4 * (-5 * Bc + B0) * S1, 16 * Bs * S0,
                       -3 * a * (-15 * A1 * c3 - 15 * A2 * s3 + A3 * c1 + A4 * s1)]),
        ("coulomb.A", [(3 * A1 * s3 - 3 * A2 * c3 + A3 * s1 - A4 * c1) * S3,
                       (36 * A1 * c3 + 36 * A2 * s3 + 4 * A3 * c1 + 4 * A4 * s1) * S2,
                       -(132 * A1 * s3 - 132 * A2 * c3 - 4 * A3 * s1 + 4 * A4 * c1) * S1,
                       -(144 * A1 * c3 + 144 * A2 * s3 - 16 * A3 * c1 - 16 * A4 * s1) * S0]),
        ("coulomb.xi", [h2 * D0 * S3, h2 * a * Cc, -4 * xi * S1, 4 * a * b0]),
        ("coulomb.C", [h2 * (-Cs) * S3, -4 * h2 * Cc * S2, 6 * h2 * Cs * S1, 4 * h2 * Cc * S0,
                       -6 * h2 * a * Bs,
                       -4 * S1 * b1, 8 * S0 * b0, 8 * Cc * S1 ** 2, -12 * a * (Bc + B0) * S1,
                       12 * a * a * Ac]),
        ("coulomb.Bq", [h2 * (Bc - B0) * S3, -8 * h2 * Bs * S2, -4 * h2 * (5 * Bc + B0) * S1,
                        16 * h2 * Bs * S0,
                        3 * a * h2 * (5 * A1 * c3 + 5 * A2 * s3 + A3 * c1 + A4 * s1),
                        -12 * a * (3 * A1 * s3 - 3 * A2 * c3 + A3 * s1 - A4 * c1) * S1,
                        -36 * a * Ac * S0, -2 * (Bc + B0) * S1 * S2, 12 * Bs * S1 ** 2,
                        16 * (Bc + B0) * S0 * S1]),
        ("coulomb.Aq", [h2 * (3 * A1 * s3 - 3 * A2 * c3 - 3 * A3 * s1 + 3 * A4 * c1) * S3,
                        h2 * (36 * A1 * c3 + 36 * A2 * s3 - 12 * A3 * c1 - 12 * A4 * s1) * S2,
                        h2 * (-132 * A1 * s3 + 132 * A2 * c3 - 12 * A3 * s1 + 12 * A4 * c1) * S1,
                        h2 * (-144 * A1 * c3 - 144 * A2 * s3 - 48 * A3 * c1 - 48 * A4 * s1) * S0,
                        72 * Ac * S0 ** 2,
                        -(-120 * A1 * s3 + 120 * A2 * c3 - 40 * A3 * s1 + 40 * A4 * c1) * S0 * S1,
                        -(54 * A1 * c3 + 54 * A2 * s3 + 6 * A3 * c1 + 6 * a4s * s1) * S1 ** 2,
                        -(6 * A1 * s3 - 6 * A2 * c3 + 2 * A3 * s1 - 2 * A4 * c1) * S1 * S2]),
    ]


def residual_angular_coulomb(S, beta, c: YCoeffs, a: float, hbar: float, theta_grid,
                             xi0: float = 0.0, tol: float | None = None,
                             fix_a4: bool = True) -> ResidualReport:
    th = np.asarray(theta_grid, dtype=float)
    Sd = _angular_derivs(S, th, 3)
    bd = _angular_derivs(beta, th, 2) if beta is not None else [0 * th] * 3
    numeric = as_ufunc(S).numeric or (beta is not None and as_ufunc(beta).numeric)
    method, dtol = _method(numeric)
    return _report("angular_coulomb", coulomb_terms(th, Sd, bd, c, a, hbar, xi0, fix_a4),
                   {"theta": th}, tol or dtol, method, {"ntheta": int(th.size)},
                   {"a": a, "hbar": hbar, "xi0": xi0})


def oscillator_terms(th, Sd, c: YCoeffs, hbar: float, xi0: float) -> list[tuple[str, list]]:
    S0, S1, S2, S3 = Sd
    t = _trig(th)
    B0, B1, B2, D0 = c.B0, c.B1, c.B2, c.D0
    Bc = B1 * t["c2"] + B2 * t["s2"]
    Bs = B1 * t["s2"] - B2 * t["c2"]
    h2 = hbar ** 2
    return [
        ("osc.B", [(Bc + B0) * S3, -8 * Bs * S2, 4 * (-5 * Bc + B0) * S1, 16 * Bs * S0]),
        ("osc.D", [h2 * D0 * S3, -12 * D0 * S0 * S1, -4 * xi0 * S1]),
        ("osc.Bq", [h2 * (Bc - B0) * S3, -8 * h2 * Bs * S2, -4 * h2 * (5 * Bc + B0) * S1,
                    16 * h2 * Bs * S0, -2 * (Bc + B0) * S1 * S2, 12 * Bs * S1 ** 2,
                    16 * (Bc + B0) * S0 * S1]),
    ]


def residual_angular_oscillator(S, c: YCoeffs, a: float, hbar: float, theta_grid,
                                xi0: float = 0.0, tol: float | None = None) -> ResidualReport:
    """The three equations for ``R = a r^2`` with ``beta = 0``; ``a`` does not enter them."""
    th = np.asarray(theta_grid, dtype=float)
    Sd = _angular_derivs(S, th, 3)
    method, dtol = _method(as_ufunc(S).numeric)
    return _report("angular_oscillator", oscillator_terms(th, Sd, c, hbar, xi0), {"theta": th},
                   tol or dtol, method, {"ntheta": int(th.size)}, {"a": a, "hbar": hbar, "xi0": xi0})


def c1d0_terms(th, Sd, bd, xi0: float, C1: float, D0: float, hbar: float):
    S0, S1, S2, S3 = Sd
    b0, b1, b2 = bd
    cs, sn = np.cos(th), np.sin(th)
    h2 = hbar ** 2
    xi = 3 * D0 * S0 + xi0
    return [
        ("c1d0.beta", [b2, b0, -2 * C1 * cs * S2, 5 * C1 * sn * S1, 2 * C1 * cs * S0]),
        ("c1d0.xi", [h2 * D0 * S3, -4 * xi * S1]),
        ("c1d0.C", [-h2 * C1 * sn * S3, -4 * h2 * C1 * cs * S2, 6 * h2 * C1 * sn * S1,
                    4 * h2 * C1 * cs * S0, -4 * S1 * b1, 8 * S0 * b0, 8 * C1 * cs * S1 ** 2]),
    ]


def residual_angular_c1d0(S, beta, xi0: float, C1: float, D0: float, hbar: float, theta_grid,
                          tol: float | None = None) -> ResidualReport:
    th = np.asarray(theta_grid, dtype=float)
    Sd = _angular_derivs(S, th, 3)
    bd = _angular_derivs(beta, th, 2)
    method, dtol = _method(as_ufunc(S).numeric, as_ufunc(beta).numeric)
    return _report("angular_c1d0", c1d0_terms(th, Sd, bd, xi0, C1, D0, hbar), {"theta": th},
                   tol or dtol, method, {"ntheta": int(th.size)},
                   {"xi0": xi0, "C1": C1, "D0": D0, "hbar": hbar})


# -- coefficient fits ---------------------------------------------------------------

@dataclass
class PatternFit:
    """Null vector of a homogeneous linear system of determining equations."""

    coeffs: YCoeffs
    xi0: float
    beta_weights: np.ndarray
    beta_basis: tuple
    singular_values: np.ndarray
    names: tuple[str, ...]

    @property
    def beta(self) -> UFunc | None:
        if not len(self.beta_basis):
            return None
        basis, w = self.beta_basis, self.beta_weights

        def f(t):
            out = 0.0 * t
            for b, wk in zip(basis, w):
                if wk:
                    out = out + wk * b(t)
            return out
        return UFunc(f, name="beta_fit")

    @property
    def gap(self) -> float:
        """Ratio of the two smallest singular values (large means a clean 1-D null space)."""
        s = self.singular_values
        return float(s[-2] / max(s[-1], 1e-300)) if s.size > 1 else math.inf


def trig_sec_basis(kmax: int = 3, sec_powers=(2, 4)) -> tuple:
    """Linearly independent beta basis: trig polynomials plus ``{1, sin} * sec^k``."""
    out = [UFunc(lambda t: 1.0 + 0.0 * t, name="1")]
    for k in range(1, kmax + 1):
        out.append(UFunc(lambda t, k=k: J.cos(k * t), name=f"cos{k}"))
        out.append(UFunc(lambda t, k=k: J.sin(k * t), name=f"sin{k}"))
    for p in sec_powers:
        out.append(UFunc(lambda t, p=p: 1.0 / J.cos(t) ** p, name=f"sec{p}"))
        out.append(UFunc(lambda t, p=p: J.sin(t) / J.cos(t) ** p, name=f"sin*sec{p}"))
    return tuple(out)


def _fit(terms_fn, names: Sequence[str], basis: tuple, th: np.ndarray) -> PatternFit:
    cnames = YCoeffs().names
    nc = len(names)
    nb = len(basis)
    bder = [as_ufunc(b).derivs(th, 2) for b in basis]

    def system(u):
        cd = {n: 0.0 for n in cnames}
        for n, v in zip(names, u[:nc]):
            if n != "xi0":
                cd[n] = v
        xi0 = u[names.index("xi0")] if "xi0" in names else 0.0
        bd = [sum(u[nc + k] * bder[k][j] for k in range(nb)) if nb else 0 * th for j in range(3)]
        rows = terms_fn(YCoeffs(**cd), xi0, bd)
        tot = [np.broadcast_to(sum(t), th.shape) for _, t in rows]
        mag = [np.max(np.abs(np.stack([np.broadcast_to(x, th.shape) for x in t])), axis=0)
               for _, t in rows]
        return np.concatenate(tot), np.concatenate(mag)

    n = nc + nb
    cols, mags = zip(*(system(np.eye(n)[k]) for k in range(n)))
    M = np.stack(cols, axis=1)
    rowscale = np.maximum(1.0, np.max(np.stack(mags), axis=0))
    _, s, vt = np.linalg.svd(M / rowscale[:, None], full_matrices=False)
    v = vt[-1]
    ci = [i for i, nm in enumerate(names) if nm != "xi0"]
    k = max(ci, key=lambda i: abs(v[i]))
    v = v / v[k]
    # polish: on the support of the null vector, fix v[k] = 1 and re-solve with
    # column scaling (safe here, every support column is nonzero)
    Ms = M / rowscale[:, None]
    sup_idx = [i for i in range(n) if i != k and abs(v[i]) > 1e-6]
    if sup_idx:
        A = Ms[:, sup_idx]
        cn = np.linalg.norm(A, axis=0)
        x, *_ = np.linalg.lstsq(A / cn, -Ms[:, k], rcond=None)
        v = np.zeros(n)
        v[k] = 1.0
        v[sup_idx] = x / cn
    cd = {nm: float(v[i]) for i, nm in enumerate(names) if nm != "xi0"}
    xi0 = float(v[names.index("xi0")]) if "xi0" in names else 0.0
    return PatternFit(YCoeffs(**cd), xi0, v[nc:].copy(), basis, s, tuple(names))


def fit_coulomb_pattern(S, a: float, hbar: float, theta_grid, basis: tuple | None = None,
                        names: Sequence[str] = YCoeffs().names + ("xi0",)) -> PatternFit:
    """Least-squares null vector of the seven ``R = a/r`` equations.

    Unknowns: the named Y-coefficients, ``xi0`` and the weights of ``beta``
    on ``basis``; the system is linear and homogeneous in all of them.
    """
    th = np.asarray(theta_grid, dtype=float)
    Sd = _angular_derivs(S, th, 3)
    basis = trig_sec_basis() if basis is None else basis
    return _fit(lambda c, xi0, bd: coulomb_terms(th, Sd, bd, c, a, hbar, xi0),
                list(names), basis, th)


def fit_oscillator_pattern(S, hbar: float, theta_grid,
                           names: Sequence[str] = ("B0", "B1", "B2", "D0", "xi0")) -> PatternFit:
    th = np.asarray(theta_grid, dtype=float)
    Sd = _angular_derivs(S, th, 3)
    return _fit(lambda c, xi0, bd: oscillator_terms(th, Sd, c, hbar, xi0), list(names), (), th)
