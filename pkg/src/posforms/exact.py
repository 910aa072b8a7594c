"""Gaussian-rational scalars and helpers shared by the exact and float paths.

Coefficient arrays are either ``complex128`` (float mode) or ``object``
arrays of :class:`GaussianRational` (exact mode).  The helpers here let the
rest of the package write one code path for both.
"""

from __future__ import annotations

import numbers
from fractions import Fraction

import numpy as np


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def _deferring(method):
    """Hand arrays back to numpy so it broadcasts elementwise instead of rounding to complex."""
    def wrapper(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return method(self, other)
    wrapper.__name__ = method.__name__
    wrapper.__doc__ = method.__doc__
    return wrapper


class GaussianRational:
    """A complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (complex, np.complexfloating)):
            return cls(float(x.real), float(x.imag))
        return cls(x, 0)

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return abs(complex(self))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def _other(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, np.integer, Fraction)):
            return GaussianRational(other, 0)
        return None

    @_deferring
    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return complex(self) + other
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    @_deferring
    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return complex(self) - other
        return GaussianRational(self.re - o.re, self.im - o.im)

    @_deferring
    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return other - complex(self)
        return GaussianRational(o.re - self.re, o.im - self.im)

    @_deferring
    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return complex(self) * other
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    @_deferring
    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return complex(self) / other
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    @_deferring
    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)):
            return complex(self) ** k
        result = GaussianRational(1)
        base = self if k >= 0 else GaussianRational(1) / self
        for _ in range(abs(int(k))):
            result = result * base
        return result

    @_deferring
    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            if isinstance(other, numbers.Number):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


I = GaussianRational(0, 1)


def gaussian(x) -> GaussianRational:
    """Convert an int, Fraction, decimal string, float, or complex exactly."""
    return GaussianRational.coerce(x)


def is_exact_array(a: np.ndarray) -> bool:
    return a.dtype == object


def to_exact_array(a) -> np.ndarray:
    a = np.asarray(a)
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = gaussian(x)
    return out


def to_float_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype != object:
        return a.astype(complex)
    out = np.empty(a.shape, dtype=complex)
    for idx, x in np.ndenumerate(a):
        out[idx] = complex(x)
    return out


def zeros(shape, exact: bool) -> np.ndarray:
    if not exact:
        return np.zeros(shape, dtype=complex)
    out = np.empty(shape, dtype=object)
    out.fill(GaussianRational(0))
    return out


def unit(exact: bool):
    """The scalar ``1`` in the requested mode."""
    return GaussianRational(1) if exact else 1.0 + 0j


def ipow(k: int, exact: bool):
    """``i**k`` computed without rounding (``1j**k`` drifts for large k)."""
    q = [1, 1j, -1, -1j][k % 4]
    if exact:
        return gaussian(q)
    return complex(q)


def real_part(x):
    if isinstance(x, GaussianRational):
        return x.re
    return complex(x).real


def imag_part(x):
    if isinstance(x, GaussianRational):
        return x.im
    return complex(x).imag


def abs2(x):
    """``|x|**2``; exact (a Fraction) for exact inputs."""
    if isinstance(x, GaussianRational):
        return x.abs2()
    if isinstance(x, (int, Fraction, np.integer)):
        return Fraction(x) ** 2
    z = complex(x)
    return z.real * z.real + z.imag * z.imag


def conj_array(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        out = np.empty(a.shape, dtype=object)
        for idx, x in np.ndenumerate(a):
            out[idx] = x.conjugate()
        return out
    return np.conj(a)


def is_zero(x) -> bool:
    if isinstance(x, GaussianRational):
        return not x
    return x == 0


def det(m: np.ndarray):
    """Determinant by fraction-free-friendly Gaussian elimination.

    Works for object arrays of :class:`GaussianRational` without rounding
    and for complex arrays via ``numpy.linalg.det``.
    """
    m = np.asarray(m)
    if m.dtype != object:
        return np.linalg.det(m.astype(complex))
    n = m.shape[0]
    a = [[m[i, j] for j in range(n)] for i in range(n)]
    result = GaussianRational(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return GaussianRational(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            result = -result
        p = a[col][col]
        result = result * p
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return result


def inv(m: np.ndarray) -> np.ndarray:
    """Matrix inverse; exact Gauss-Jordan for object arrays."""
    m = np.asarray(m)
    if m.dtype != object:
        return np.linalg.inv(m.astype(complex))
    n = m.shape[0]
    a = [[m[i, j] for j in range(n)] + [GaussianRational(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            raise np.linalg.LinAlgError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = a[i][n + j]
    return out
