"""Classical trajectories, conservation drift and closed-orbit detection."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, DomainError
from .phasecore import Oscillator, PhasePoint, PotentialModel, ZeroRadial, angular_momentum
from .ybuilder import eval_Y_classical

SINGULAR_GUARD = 1e-5
RTOL_FLOOR = 2.3e-14  # DOP853 refuses rtol below 100 * eps
# ``tol`` is a target for the global error; the per-step tolerance is tighter
# because step errors accumulate over many periods
LOCAL_FACTOR = 1e-2


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # (n, 4): x, y, px, py
    observables: dict[str, np.ndarray] = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    truncated: bool = False
    reason: Optional[str] = None
    crossings: np.ndarray = field(default_factory=lambda: np.zeros((0, 5)))  # t, x, y, px, py
    model: str = ""

    def __len__(self) -> int:
        return len(self.t)

    def point(self, k: int) -> PhasePoint:
        return PhasePoint(*(float(v) for v in self.states[k]))

    @property
    def start(self) -> PhasePoint:
        return self.point(0)

    @property
    def end(self) -> PhasePoint:
        return self.point(-1)

    def to_csv(self, path, period: float | None = None) -> None:
        """Columns t, x, y, px, py, H, X, Y (empty when unavailable) and period."""
        cols = ["H", "X", "Y"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "y", "px", "py"] + cols + ["period"])
            for k in range(len(self.t)):
                row = [_fmt(self.t[k])] + [_fmt(v) for v in self.states[k]]
                row += [_fmt(self.observables[c][k]) if c in self.observables else "" for c in cols]
                row.append(_fmt(period) if period is not None else "")
                w.writerow(row)


def _fmt(v) -> str:
    return repr(float(v))


# -- equations of motion -------------------------------------------------------

def _origin_singular(m: PotentialModel) -> bool:
    if not isinstance(m.radial, (ZeroRadial, Oscillator)):
        return True
    th = np.linspace(-3.0, 3.0, 13) + 0.0123
    th = th[m.angular.distance_to_singular(th) > 1e-2]
    return bool(m.angular.singular) or bool(np.any(np.asarray(m.angular.S(th)) != 0))


def singular_distance(m: PotentialModel, x: float, y: float, origin: bool | None = None) -> float:
    """Euclidean distance from ``(x, y)`` to the declared singular set."""
    r = math.hypot(x, y)
    if origin is None:
        origin = _origin_singular(m)
    d = r if origin else math.inf
    if m.angular.singular:
        a = float(m.angular.distance_to_singular(math.atan2(y, x)))
        d = min(d, r * math.sin(min(a, math.pi / 2)))
    return d


def _force(m: PotentialModel):
    """``-grad V`` without the domain check, for use inside the integrator."""
    R, S = m.radial, m.angular

    def f(x, y):
        r = math.hypot(x, y)
        th = math.atan2(y, x)
        R1 = float(R.derivs(r, 1)[1])
        S0, S1 = (float(v) for v in S.derivs(th, 1))
        Vr = R1 - 2.0 * S0 / r ** 3
        Vt = S1 / r ** 2
        c, s = x / r, y / r
        return -(c * Vr - s * Vt / r), -(s * Vr + c * Vt / r)
    return f


def _require_classical(m: PotentialModel) -> None:
    if m.hbar > 0 and not m.classical_limit:
        raise ConfigurationError(f"{m.name} is a quantum-only model; no classical dynamics")


def _state(p0) -> np.ndarray:
    if isinstance(p0, PhasePoint):
        return np.array([p0.x, p0.y, p0.px, p0.py], dtype=float)
    return np.asarray(p0, dtype=float).reshape(4)


def integrate(m: PotentialModel, p0, tmax: float, tol: float = 1e-12, n_samples: int = 2001,
              observables: bool = True, guard: float = SINGULAR_GUARD) -> Trajectory:
    """Hamilton's equations in Cartesian coordinates with DOP853.

    ``tmax`` may be negative for backward integration.  Integration stops
    early (``truncated=True``) when the orbit comes within ``guard`` of the
    singular set.  Crossings of the section ``px = 0`` with ``dpx/dt > 0``
    are recorded for :func:`detect_closure`.
    """
    _require_classical(m)
    if not (1e-14 <= tol <= 1e-6):
        raise ConfigurationError(f"tol must lie in [1e-14, 1e-6], got {tol}")
    if tmax == 0 or n_samples < 2:
        raise ConfigurationError("need tmax != 0 and at least two samples")
    u0 = _state(p0)
    origin = _origin_singular(m)
    if singular_distance(m, u0[0], u0[1], origin) <= guard:
        raise DomainError("initial point inside the singular guard band")
    force = _force(m)

    def rhs(t, u):
        fx, fy = force(u[0], u[1])
        return np.array([u[2], u[3], fx, fy])

    def near_singular(t, u):
        return singular_distance(m, u[0], u[1], origin) - guard
    near_singular.terminal = True
    near_singular.direction = -1

    def section(t, u):
        return u[2]
    section.direction = 1 if tmax > 0 else -1

    scale = max(1.0, float(np.max(np.abs(u0))))
    local = tol * LOCAL_FACTOR
    rtol = max(local, RTOL_FLOOR)
    t_eval = np.linspace(0.0, tmax, n_samples)
    sol = solve_ivp(rhs, (0.0, tmax), u0, method="DOP853", rtol=rtol, atol=local * scale,
                    t_eval=t_eval, events=(near_singular, section))
    if sol.status == -1:
        raise DomainError(f"integration failed: {sol.message}")
    truncated = sol.status == 1
    t, Y = sol.t, sol.y.T
    reason = None
    if truncated:
        te = float(sol.t_events[0][0])
        reason = f"singular guard reached at t = {te:.17g}"
        t = np.append(t, te)
        Y = np.vstack([Y, sol.y_events[0][0]])
    cr = np.column_stack([sol.t_events[1], sol.y_events[1]]) if len(sol.t_events[1]) else np.zeros((0, 5))
    traj = Trajectory(t, Y, {}, {"nfev": int(sol.nfev), "rtol": rtol, "atol": local * scale,
                                 "tol": tol, "method": "DOP853"},
                      truncated, reason, cr, m.name)
    if observables:
        traj.observables = observe(m, traj)
    return traj


# -- observables -------------------------------------------------------------------

def _series(f: Callable, states: np.ndarray) -> np.ndarray:
    return np.array([float(f(PhasePoint(*(float(v) for v in s)))) for s in states])


def observable_functions(m: PotentialModel) -> dict[str, Callable[[PhasePoint], float]]:
    """``H``, ``X`` and one entry per attached integral (labelled as the integral)."""
    force_free = m.angular.S

    def H(p):
        r = math.hypot(p.x, p.y)
        return 0.5 * (p.px ** 2 + p.py ** 2) + float(m.radial(r)) + float(force_free(math.atan2(p.y, p.x))) / r ** 2

    def X(p):
        L = angular_momentum(p.x, p.y, p.px, p.py)
        return L * L + 2.0 * float(force_free(math.atan2(p.y, p.x)))

    out = {"H": H, "X": X}
    for I in m.integrals:
        out[I.label] = (lambda I: lambda p: eval_Y_classical(I.coeffs, I.g1, I.g2, p))(I)
    return out


def observe(m: PotentialModel, traj: Trajectory) -> dict[str, np.ndarray]:
    out = {k: _series(f, traj.states) for k, f in observable_functions(m).items()}
    if m.integral is not None and m.integral.label != "Y":
        out["Y"] = out[m.integral.label]
    return out


def drift(traj: Trajectory, observable) -> float:
    """``max |f(sample) - f(start)| / max(1, |f(start)|)``.

    ``observable`` is a callable of a :class:`PhasePoint` or the name of a
    recorded series.
    """
    if len(traj) == 0:
        raise ConfigurationError("empty trajectory")
    vals = traj.observables[observable] if isinstance(observable, str) else _series(observable, traj.states)
    v0 = vals[0]
    return float(np.max(np.abs(vals - v0)) / max(1.0, abs(v0)))


# -- closure -------------------------------------------------------------------------

@dataclass
class Closure:
    period: Optional[float]
    mismatch: float
    bounded: bool
    n_crossings: int

    def __bool__(self) -> bool:
        return self.period is not None


def detect_closure(traj: Trajectory, eps: float = 1e-6, escape_factor: float = 50.0) -> Closure:
    """Smallest return time to the first section crossing within ``eps * scale``.

    A trajectory whose radius grows past ``escape_factor`` times its initial
    radius is flagged unbounded and has no period.
    """
    r = np.hypot(traj.states[:, 0], traj.states[:, 1])
    bounded = bool(r.max() < escape_factor * max(r[0], 1e-12)) and not traj.truncated
    cr = traj.crossings
    if not bounded or len(cr) < 2:
        return Closure(None, math.inf, bounded, len(cr))
    s0 = cr[0, 1:]
    scale = max(1.0, float(np.max(np.abs(s0))))
    d = np.max(np.abs(cr[1:, 1:] - s0), axis=1) / scale
    best = float(d.min())
    hit = np.nonzero(d < eps)[0]
    if len(hit) == 0:
        return Closure(None, best, bounded, len(cr))
    k = int(hit[0]) + 1
    return Closure(float(cr[k, 0] - cr[0, 0]), float(d[k - 1]), bounded, len(cr))


def time_reversal_error(m: PotentialModel, p0, tmax: float, tol: float = 1e-12) -> float:
    """Integrate forward, flip momenta, integrate again; distance to the start over scale."""
    u0 = _state(p0)
    fwd = integrate(m, u0, tmax, tol, n_samples=2, observables=False)
    if fwd.truncated:
        raise DomainError("forward leg reached the singular guard")
    u1 = fwd.states[-1] * np.array([1, 1, -1, -1])
    back = integrate(m, u1, tmax, tol, n_samples=2, observables=False)
    u2 = back.states[-1] * np.array([1, 1, -1, -1])
    scale = max(1.0, float(np.max(np.abs(u0))))
    return float(np.max(np.abs(u2 - u0)) / scale)
