"""The third-order integral Y: coefficient bases, F-functions, G-functions, values.

Classical values use the reading of the canonical polynomial under which the
determining equations hold as transcribed: each anticommutator is a single
product, so for instance ``C1 {L^2, p1} -> C1 L^2 p1`` and ``{g1, p1} -> g1 p1``.
The symmetric quantum operator built in :mod:`polarsuper.quantumop` has exactly
twice this value as its principal symbol; integrals are defined up to scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Callable

import numpy as np

from . import jets as J
from .errors import ConfigurationError
from .jets import Jet


@dataclass(frozen=True)
class AijkCoeffs:
    """Input basis: the ten constants multiplying ``{L^i, p1^j p2^k}``, i+j+k=3."""

    A300: float = 0.0
    A210: float = 0.0
    A201: float = 0.0
    A120: float = 0.0
    A111: float = 0.0
    A102: float = 0.0
    A030: float = 0.0
    A021: float = 0.0
    A012: float = 0.0
    A003: float = 0.0


@dataclass(frozen=True)
class YCoeffs:
    A1: float = 0.0
    A2: float = 0.0
    A3: float = 0.0
    A4: float = 0.0
    B0: float = 0.0
    B1: float = 0.0
    B2: float = 0.0
    C1: float = 0.0
    C2: float = 0.0
    D0: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"coefficient {f.name} is not finite")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)])

    @classmethod
    def from_array(cls, a) -> "YCoeffs":
        return cls(*(float(v) for v in a))

    def scaled(self, s: float) -> "YCoeffs":
        return YCoeffs.from_array(s * self.as_array())

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in fields(self))


def coeffs_from_Aijk(a: AijkCoeffs) -> YCoeffs:
    return YCoeffs(
        A1=(a.A030 - a.A012) / 4,
        A2=(a.A021 - a.A003) / 4,
        A3=(3 * a.A030 + a.A012) / 4,
        A4=(3 * a.A003 + a.A021) / 4,
        B0=(a.A120 + a.A102) / 2,
        B1=(a.A120 - a.A102) / 2,
        B2=a.A111 / 2,
        C1=a.A210,
        C2=a.A201,
        D0=a.A300,
    )


# -- F-functions -------------------------------------------------------------

@dataclass(frozen=True)
class FParts:
    """Angular parts of F1..F4 grouped by power of 1/r."""

    F1: object
    F21: object
    F20: object
    F32: object
    F31: object
    F30: object
    F43: object
    F42: object
    F41: object
    F40: object


def f_parts(c: YCoeffs, theta) -> FParts:
    """The theta-dependent pieces of F1..F4; ``theta`` may be a jet."""
    c1, s1 = J.cos(theta), J.sin(theta)
    c2, s2 = J.cos(2 * theta), J.sin(2 * theta)
    c3, s3 = J.cos(3 * theta), J.sin(3 * theta)
    F1 = c.A1 * c3 + c.A2 * s3 + c.A3 * c1 + c.A4 * s1
    F21 = -3 * c.A1 * s3 + 3 * c.A2 * c3 - c.A3 * s1 + c.A4 * c1
    F20 = c.B1 * c2 + c.B2 * s2 + c.B0
    F32 = -3 * c.A1 * c3 - 3 * c.A2 * s3 + c.A3 * c1 + c.A4 * s1
    F31 = -2 * c.B1 * s2 + 2 * c.B2 * c2
    F30 = c.C1 * c1 + c.C2 * s1
    F43 = c.A1 * s3 - c.A2 * c3 - c.A3 * s1 + c.A4 * c1
    F42 = -c.B1 * c2 - c.B2 * s2 + c.B0
    F41 = -c.C1 * s1 + c.C2 * c1
    F40 = c.D0 + 0.0 * c1
    return FParts(F1, F21, F20, F32, F31, F30, F43, F42, F41, F40)


def eval_F(c: YCoeffs, r, theta):
    """``(F1, F2, F3, F4)`` at ``(r, theta)``; arguments may be jets."""
    p = f_parts(c, theta)
    ir = 1.0 / r
    F1 = p.F1
    F2 = p.F21 * ir + p.F20
    F3 = p.F32 * ir * ir + p.F31 * ir + p.F30
    F4 = p.F43 * ir * ir * ir + p.F42 * ir * ir + p.F41 * ir + p.F40
    return F1, F2, F3, F4


def eval_G1(c: YCoeffs, m, r, theta):
    """``3 F1 (R + S/r^2) - (F21/(2 r^2) + F20/r) S' + beta``."""
    ang = m.angular
    if ang.beta is None:
        raise ConfigurationError("eval_G1 needs beta(theta) on the angular profile")
    p = f_parts(c, theta)
    if isinstance(theta, Jet):
        S = ang.S(theta)
        dS = S.diff(0) if theta.nvars == 1 else _dtheta(ang.S, theta)
    else:
        S, dS = ang.S.derivs(theta, 1)
    R = m.radial.lift(r) if isinstance(r, Jet) else m.radial(r)
    return 3 * p.F1 * (R + S / (r * r)) - (p.F21 / (2 * r * r) + p.F20 / r) * dS + ang.beta(theta)


def _dtheta(f, theta: Jet):
    """``f'(theta)`` as a jet of the same order (one extra Taylor term)."""
    tc = f.taylor(theta.value, theta.order + 1).c
    d = [(k + 1) * tc[k + 1] for k in range(theta.order + 1)]
    return J.compose_taylor(theta, d)


def g_to_G(g1, g2, r, theta):
    """``(G1, G2)`` from Cartesian components ``(g1, g2)``."""
    c, s = J.cos(theta), J.sin(theta)
    return g1 * c + g2 * s, (-g1 * s + g2 * c) / r


def G_to_g(G1, G2, r, theta):
    c, s = J.cos(theta), J.sin(theta)
    return G1 * c - r * G2 * s, G1 * s + r * G2 * c


# -- classical value ------------------------------------------------------------

def leading_value(c: YCoeffs, x, y, px, py):
    """Momentum-cubic part of the classical Y (g = 0)."""
    L = x * py - y * px
    p2 = px * px + py * py
    return (c.D0 * L ** 3 + c.C1 * L * L * px + c.C2 * L * L * py + c.B0 * L * p2
            + c.B1 * L * (px * px - py * py) + 2 * c.B2 * L * px * py
            + c.A1 * px * (px * px - 3 * py * py) + c.A2 * py * (3 * px * px - py * py)
            + (c.A3 * px + c.A4 * py) * p2)


def eval_Y_classical(c: YCoeffs, g1: Callable | None, g2: Callable | None, p) -> float:
    """Classical value of Y at a :class:`PhasePoint` (or any object with x, y, px, py)."""
    val = leading_value(c, p.x, p.y, p.px, p.py)
    if g1 is not None:
        val = val + g1(p.x, p.y) * p.px
    if g2 is not None:
        val = val + g2(p.x, p.y) * p.py
    return float(val)


# -- rotations --------------------------------------------------------------------

def _rot(a: float, b: float, ang: float) -> tuple[float, float]:
    ca, sa = math.cos(ang), math.sin(ang)
    return ca * a - sa * b, sa * a + ca * b


def rotate_frame(c: YCoeffs, phi: float) -> YCoeffs:
    """Coefficients of the same integral seen in a frame rotated by ``phi``.

    With ``c' = rotate_frame(c, phi)`` and ``R_phi`` the rotation of positions
    and momenta, ``Y[c'](R_phi p) = Y[c](p)`` for g = 0.
    """
    A1, A2 = _rot(c.A1, c.A2, 3 * phi)
    A3, A4 = _rot(c.A3, c.A4, phi)
    B1, B2 = _rot(c.B1, c.B2, 2 * phi)
    C1, C2 = _rot(c.C1, c.C2, phi)
    return replace(c, A1=A1, A2=A2, A3=A3, A4=A4, B1=B1, B2=B2, C1=C1, C2=C2)


def rotate_point(p, phi: float):
    """Rotate a phase point's position and momentum by ``phi``."""
    from .phasecore import PhasePoint
    x, y = _rot(p.x, p.y, phi)
    px, py = _rot(p.px, p.py, phi)
    return PhasePoint(x, y, px, py)
