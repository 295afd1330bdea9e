"""Truncated multivariate Taylor arithmetic ("jets").

A :class:`Jet` stores the Taylor coefficients of a function of one or two
variables around a base point, truncated at total degree ``order``.  The
coefficient array has shape ``(order+1,)*nvars + batch`` so that many base
points are processed at once.  Arithmetic and the elementary functions below
propagate the coefficients exactly (up to roundoff), which gives every
partial derivative through ``order`` without finite differences.

Special functions that are only known through an ODE (Weierstrass p, the
Painleve VI transcendent) enter through :func:`compose_taylor`, fed with the
univariate Taylor coefficients produced by :func:`taylor_ode2`.
"""
from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import numpy as np


@lru_cache(maxsize=None)
def _index_set(order: int, nvars: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        idx for idx in product(range(order + 1), repeat=nvars) if sum(idx) <= order
    )


@lru_cache(maxsize=None)
def _mask(order: int, nvars: int) -> np.ndarray:
    grids = np.indices((order + 1,) * nvars)
    return grids.sum(axis=0) <= order


def _bmask(order: int, nvars: int, ndim: int) -> np.ndarray:
    m = _mask(order, nvars)
    return m.reshape(m.shape + (1,) * (ndim - nvars))


class Jet:
    """Truncated Taylor polynomial in ``nvars`` variables with batched base points."""

    __slots__ = ("c", "order", "nvars")
    __array_priority__ = 100

    def __init__(self, c: np.ndarray, order: int, nvars: int):
        self.c = c
        self.order = order
        self.nvars = nvars

    # -- construction ---------------------------------------------------
    @classmethod
    def constant(cls, value, order: int, nvars: int = 2) -> "Jet":
        value = np.asarray(value)
        c = np.zeros((order + 1,) * nvars + value.shape, dtype=np.result_type(value, float))
        c[(0,) * nvars] = value
        return cls(c, order, nvars)

    @classmethod
    def variable(cls, value, index: int, order: int, nvars: int = 2) -> "Jet":
        j = cls.constant(value, order, nvars)
        if order >= 1:
            e = [0] * nvars
            e[index] = 1
            j.c[tuple(e)] = 1.0
        return j

    @classmethod
    def from_taylor(cls, coeffs, order: int | None = None) -> "Jet":
        """Univariate jet from a sequence of Taylor coefficients."""
        arrs = [np.asarray(a) for a in coeffs]
        shape = np.broadcast_shapes(*(a.shape for a in arrs))
        dtype = np.result_type(*arrs, float)
        n = len(arrs) - 1 if order is None else order
        c = np.zeros((n + 1,) + shape, dtype=dtype)
        for k, a in enumerate(arrs[: n + 1]):
            c[k] = a
        return cls(c, n, 1)

    # -- inspection -------------------------------------------------------
    @property
    def value(self) -> np.ndarray:
        return self.c[(0,) * self.nvars]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.c.shape[self.nvars:]

    def coeff(self, *alpha: int) -> np.ndarray:
        return self.c[alpha]

    def partial(self, *alpha: int) -> np.ndarray:
        """Value of the mixed partial derivative with multi-index ``alpha``."""
        if sum(alpha) > self.order:
            raise ValueError(f"derivative order {sum(alpha)} exceeds jet order {self.order}")
        scale = 1.0
        for a in alpha:
            scale *= math.factorial(a)
        return self.c[tuple(alpha)] * scale

    def derivatives(self) -> list[np.ndarray]:
        """Univariate jets only: ``[f, f', ..., f^(order)]``."""
        if self.nvars != 1:
            raise ValueError("derivatives() is defined for univariate jets")
        return [self.c[k] * math.factorial(k) for k in range(self.order + 1)]

    @property
    def real(self) -> "Jet":
        return Jet(np.ascontiguousarray(self.c.real), self.order, self.nvars)

    @property
    def imag(self) -> "Jet":
        return Jet(np.ascontiguousarray(self.c.imag), self.order, self.nvars)

    # -- structural operations ------------------------------------------
    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        sl = (slice(0, order + 1),) * self.nvars
        c = self.c[sl] * _bmask(order, self.nvars, self.c.ndim)
        return Jet(c, order, self.nvars)

    def diff(self, var: int) -> "Jet":
        """Exact partial derivative; the result has order ``order-1``."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        n = self.order
        sl = [slice(0, n)] * self.nvars
        sl[var] = slice(1, n + 1)
        c = self.c[tuple(sl)]
        w = np.arange(1, n + 1, dtype=float).reshape((-1,) + (1,) * (c.ndim - var - 1))
        w = w.reshape((1,) * var + w.shape)
        return Jet(c * w, n - 1, self.nvars)

    def shift_base(self, value) -> "Jet":
        """Same jet with the constant term replaced."""
        c = self.c.copy()
        c[(0,) * self.nvars] = value
        return Jet(c, self.order, self.nvars)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets with different variable counts")
            return other
        return Jet.constant(other, self.order, self.nvars)

    def __neg__(self) -> "Jet":
        return Jet(-self.c, self.order, self.nvars)

    def __pos__(self) -> "Jet":
        return self

    def __add__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            other = np.asarray(other)
            nv = self.nvars
            batch = np.broadcast_shapes(self.batch_shape, other.shape)
            c = np.zeros(self.c.shape[:nv] + batch, dtype=np.result_type(self.c, other))
            c[...] = self.c
            c[(0,) * nv] += other
            return Jet(c, self.order, nv)
        n = min(self.order, other.order)
        a, b = self.truncate(n), other.truncate(n)
        return Jet(a.c + b.c, n, self.nvars)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            other = np.asarray(other)
            return Jet(self.c * other, self.order, self.nvars)
        n = min(self.order, other.order)
        a, b = self.truncate(n), other.truncate(n)
        nv = self.nvars
        batch = np.broadcast_shapes(a.batch_shape, b.batch_shape)
        out = np.zeros((n + 1,) * nv + batch, dtype=np.result_type(a.c, b.c))
        for idx in _index_set(n, nv):
            coef = a.c[idx]
            if not np.any(coef):
                continue
            dst = tuple(slice(i, n + 1) for i in idx)
            src = tuple(slice(0, n + 1 - i) for i in idx)
            out[dst] += coef * b.c[src]
        out *= _bmask(n, nv, out.ndim)
        return Jet(out, n, nv)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other), self.order, self.nvars)
        return self * reciprocal(other)

    def __rtruediv__(self, other) -> "Jet":
        return reciprocal(self) * other

    def __pow__(self, p) -> "Jet":
        if isinstance(p, (int, np.integer)):
            return _int_power(self, int(p))
        return power(self, p)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, nvars={self.nvars}, batch={self.batch_shape})"


def is_jet(x) -> bool:
    return isinstance(x, Jet)


def _int_power(a: Jet, p: int) -> Jet:
    if p < 0:
        return reciprocal(_int_power(a, -p))
    result = Jet.constant(np.ones(a.batch_shape), a.order, a.nvars)
    base = a
    while p:
        if p & 1:
            result = result * base
        p >>= 1
        if p:
            base = base * base
    return result


def compose_taylor(a: Jet, tc) -> Jet:
    """``f(a)`` given ``tc[k] = f^(k)(a0)/k!`` at the base value ``a0`` of ``a``.

    Uses Horner's rule in the nilpotent increment ``a - a0``.
    """
    n = a.order
    h = a.shift_base(0.0)
    tc = list(tc)
    if len(tc) < n + 1:
        raise ValueError(f"need {n + 1} Taylor coefficients, got {len(tc)}")
    res = Jet.constant(np.asarray(tc[n]) + np.zeros(a.batch_shape), n, a.nvars)
    for k in range(n - 1, -1, -1):
        res = res * h + tc[k]
    return res


def compose_derivs(a: Jet, derivs) -> Jet:
    """``f(a)`` given the derivatives ``[f(a0), f'(a0), ...]``."""
    return compose_taylor(a, [d / math.factorial(k) for k, d in enumerate(derivs)])


# -- elementary functions ---------------------------------------------------
# Each accepts a Jet or a plain float/ndarray.

def reciprocal(a):
    if not isinstance(a, Jet):
        return 1.0 / np.asarray(a)
    a0 = a.value
    if np.any(a0 == 0):
        raise ZeroDivisionError("reciprocal of a jet with zero base value")
    inv = 1.0 / a0
    return compose_taylor(a, [(-1) ** k * inv ** (k + 1) for k in range(a.order + 1)])


def exp(a):
    if not isinstance(a, Jet):
        return np.exp(a)
    e = np.exp(a.value)
    return compose_taylor(a, [e / math.factorial(k) for k in range(a.order + 1)])


def log(a):
    if not isinstance(a, Jet):
        return np.log(a)
    a0 = a.value
    tc = [np.log(a0)] + [(-1) ** (k - 1) / (k * a0 ** k) for k in range(1, a.order + 1)]
    return compose_taylor(a, tc)


def sin(a):
    if not isinstance(a, Jet):
        return np.sin(a)
    s, c = np.sin(a.value), np.cos(a.value)
    cyc = (s, c, -s, -c)
    return compose_taylor(a, [cyc[k % 4] / math.factorial(k) for k in range(a.order + 1)])


def cos(a):
    if not isinstance(a, Jet):
        return np.cos(a)
    s, c = np.sin(a.value), np.cos(a.value)
    cyc = (c, -s, -c, s)
    return compose_taylor(a, [cyc[k % 4] / math.factorial(k) for k in range(a.order + 1)])


def tan(a):
    if not isinstance(a, Jet):
        return np.tan(a)
    return sin(a) / cos(a)


def _falling(p: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= p - i
    return out


def power(a, p: float):
    """``a**p`` for real ``p``; requires a positive base unless ``p`` is an integer."""
    if isinstance(p, (int, np.integer)) and isinstance(a, Jet):
        return _int_power(a, int(p))
    if not isinstance(a, Jet):
        return np.power(a, p)
    a0 = a.value
    tc = [_falling(p, k) * a0 ** (p - k) / math.factorial(k) for k in range(a.order + 1)]
    return compose_taylor(a, tc)


def signed_power(a, p: float):
    """Odd extension ``sign(a)|a|**p`` (real cube root for ``p=1/3``)."""
    if not isinstance(a, Jet):
        a = np.asarray(a, dtype=float)
        return np.sign(a) * np.abs(a) ** p
    a0 = a.value
    s, m = np.sign(a0), np.abs(a0)
    tc = [_falling(p, k) * m ** (p - k) * s ** (k + 1) / math.factorial(k)
          for k in range(a.order + 1)]
    return compose_taylor(a, tc)


def sqrt(a):
    return power(a, 0.5)


def cbrt(a):
    return signed_power(a, 1.0 / 3.0)


def atan2(y, x):
    """Principal polar angle of ``(x, y)`` as a jet (via the complex logarithm)."""
    if not isinstance(y, Jet) and not isinstance(x, Jet):
        return np.arctan2(y, x)
    w = x + 1j * y if isinstance(x, Jet) else y * 1j + x
    w0 = w.value
    tc = [np.log(np.abs(w0)) + 1j * np.arctan2(w0.imag, w0.real)]
    tc += [(-1) ** (k - 1) / (k * w0 ** k) for k in range(1, w.order + 1)]
    return compose_taylor(w, tc).imag


def hypot(x, y):
    return sqrt(x * x + y * y)


def value_of(a):
    return a.value if isinstance(a, Jet) else np.asarray(a)


# -- univariate ODE series -------------------------------------------------

def taylor_ode2(rhs, x0, y0, yp0, order: int) -> Jet:
    """Taylor series of the solution of ``y'' = rhs(x, y, y')`` at ``x0``.

    ``rhs`` must accept univariate jets.  Returns the univariate jet of ``y``
    in the increment ``x - x0`` truncated at ``order``; all inputs may be
    batched arrays.
    """
    x0, y0, yp0 = (np.asarray(v, dtype=float) for v in (x0, y0, yp0))
    shape = np.broadcast_shapes(x0.shape, y0.shape, yp0.shape)
    coeffs = np.zeros((order + 1,) + shape)
    coeffs[0] = y0
    if order >= 1:
        coeffs[1] = yp0
    for k in range(2, order + 1):
        m = k - 2
        xj = Jet.variable(x0 + np.zeros(shape), 0, m, nvars=1)
        yj = Jet(coeffs[: m + 1].copy(), m, 1)
        ypj = Jet(coeffs[1: m + 2] * np.arange(1, m + 2).reshape((-1,) + (1,) * len(shape)), m, 1)
        r = rhs(xj, yj, ypj)
        coeffs[k] = np.real(r.c[m]) / (k * (k - 1))
    return Jet(coeffs, order, 1)


def eval_series(j: Jet, h):
    """Evaluate a univariate jet's polynomial at increment ``h``."""
    h = np.asarray(h)
    out = np.zeros(np.broadcast_shapes(j.batch_shape, h.shape), dtype=j.c.dtype)
    for k in range(j.order, -1, -1):
        out = out * h + j.c[k]
    return out


# -- numeric fallback differentiation ---------------------------------------

def _fornberg_weights(nodes: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights at 0 for derivatives 0..m on ``nodes``."""
    n = len(nodes)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = nodes[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i]
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


@lru_cache(maxsize=None)
def _central_stencil(k: int) -> tuple[np.ndarray, np.ndarray, int]:
    half = (k + 1) // 2 + 3
    nodes = np.arange(-half, half + 1, dtype=float)
    w = _fornberg_weights(nodes, k)[:, k]
    accuracy = 2 * ((2 * half + 2 - k) // 2)
    return nodes, w, accuracy


def fd_derivative(f, x, k: int):
    """k-th derivative of a scalar callable by 8th-order central differences.

    The base step is ``1e-3*max(1,|x|)``, enlarged for higher ``k`` to the
    roundoff-balanced ``eps**(1/(8+k))``; one Richardson extrapolation against
    ``h/2`` follows.
    """
    if k == 0:
        return f(x)
    x = np.asarray(x, dtype=float)
    nodes, w, acc = _central_stencil(k)
    h = max(1e-3, 0.5 * np.finfo(float).eps ** (1.0 / (8 + k))) * np.maximum(1.0, np.abs(x))

    def est(step):
        total = 0.0
        for node, weight in zip(nodes, w):
            if weight != 0.0:
                total = total + weight * f(x + node * step)
        return total / step ** k

    d1, d2 = est(h), est(h / 2)
    q = 2.0 ** acc
    return (q * d2 - d1) / (q - 1.0)
