"""Complex exterior algebra on C^n with a fixed standard coframe.

A :class:`Form` of bidegree ``(p, q)`` stores dense coefficients ``c[I, J]``
of ``omega^I ^ conj(omega)^J`` over strictly increasing 1-based multi-indices
``I`` (length p) and ``J`` (length q), listed in lexicographic order.

Signs are never tabulated by hand: every sign comes from the parity of the
permutation sorting a concatenated index list, plus the rule that moving an
antiholomorphic block of degree q past a holomorphic block of degree p costs
``(-1)**(p*q)``.  The only hand-written signs are those of the phi-basis of
Lambda^{2,0}(C^4).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import exact as ex

MAX_DIM = 8

HOLOMORPHIC = "holomorphic"
ANTIHOLOMORPHIC = "antiholomorphic"


class DimensionError(ValueError):
    """Incompatible ambient dimensions or degrees."""


class BidegreeError(ValueError):
    """An operation received a form of the wrong bidegree."""


@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All strictly increasing k-tuples from 1..n, in lexicographic order."""
    if k < 0 or k > n:
        return ()
    return tuple(itertools.combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def _position(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {I: i for i, I in enumerate(multi_indices(n, k))}


def index_position(I: Sequence[int], n: int) -> int:
    I = tuple(I)
    try:
        return _position(n, len(I))[I]
    except KeyError:
        raise ValueError(f"{I} is not a strictly increasing multi-index in 1..{n}") from None


def permutation_sign(seq: Sequence[int]) -> int:
    """Parity of the sorting permutation of ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _merge_table(n: int, k1: int, k2: int) -> dict[tuple[int, int], tuple[int, int]]:
    """(pos I, pos I') -> (pos of sorted I+I', sign) for disjoint I, I'."""
    table = {}
    pos = _position(n, k1 + k2)
    for a, I in enumerate(multi_indices(n, k1)):
        for b, K in enumerate(multi_indices(n, k2)):
            s = permutation_sign(I + K)
            if s:
                table[a, b] = (pos[tuple(sorted(I + K))], s)
    return table


@lru_cache(maxsize=None)
def _removal_table(n: int, k: int) -> tuple[tuple[tuple[int, int, int], ...], ...]:
    """For each k-index I: entries (slot r, removed index I[r], pos of I without I[r])."""
    pos = _position(n, k - 1)
    out = []
    for I in multi_indices(n, k):
        out.append(tuple((r, I[r], pos[I[:r] + I[r + 1:]]) for r in range(k)))
    return tuple(out)


def _coerce_array(values, exact: bool) -> np.ndarray:
    return ex.to_exact_array(values) if exact else ex.to_float_array(values)


@dataclass(frozen=True, eq=False)
class Form:
    """An exterior (p, q)-form on C^n with dense coefficients.

    Instances are immutable; arithmetic returns new forms.  ``coeffs`` is a
    ``complex128`` array in float mode or an object array of
    :class:`~posforms.exact.GaussianRational` in exact mode.
    """

    n: int
    p: int
    q: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise DimensionError(f"n must be in 1..{MAX_DIM}, got {self.n}")
        if not (0 <= self.p <= self.n and 0 <= self.q <= self.n):
            raise DimensionError(f"bidegree ({self.p},{self.q}) impossible on C^{self.n}")
        shape = (len(multi_indices(self.n, self.p)), len(multi_indices(self.n, self.q)))
        c = np.asarray(self.coeffs)
        if c.shape != shape:
            raise DimensionError(f"coefficient array has shape {c.shape}, expected {shape}")
        if c.dtype != object and c.dtype != complex:
            c = c.astype(complex)
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction -----------------------------------------------------------

    @classmethod
    def zero(cls, n: int, p: int, q: int, exact: bool = False) -> Form:
        shape = (len(multi_indices(n, p)), len(multi_indices(n, q)))
        return cls(n, p, q, ex.zeros(shape, exact))

    @classmethod
    def from_terms(cls, n: int, p: int, q: int, terms, exact: bool = False) -> Form:
        """Build from ``{(I, J): c}`` or an iterable of ``((I, J), c)`` pairs.

        Repeated index pairs are summed.
        """
        items = terms.items() if isinstance(terms, dict) else terms
        c = ex.zeros((len(multi_indices(n, p)), len(multi_indices(n, q))), exact)
        for (I, J), value in items:
            if len(I) != p or len(J) != q:
                raise BidegreeError(f"term ({I},{J}) does not have bidegree ({p},{q})")
            v = ex.gaussian(value) if exact else complex(value)
            c[index_position(I, n), index_position(J, n)] += v
        return cls(n, p, q, c)

    @classmethod
    def covector(cls, components: Sequence, exact: bool | None = None) -> Form:
        """The (1,0)-form with the given components on omega^1..omega^n."""
        comps = np.asarray(components)
        if exact is None:
            exact = comps.dtype == object
        arr = _coerce_array(comps, exact).reshape(-1, 1)
        return cls(len(arr), 1, 0, arr)

    @classmethod
    def scalar(cls, n: int, value=1, exact: bool = False) -> Form:
        return cls.from_terms(n, 0, 0, {((), ()): value}, exact=exact)

    # access -----------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    @property
    def bidegree(self) -> tuple[int, int]:
        return self.p, self.q

    def coeff(self, I: Sequence[int], J: Sequence[int] = ()):
        return self.coeffs[index_position(I, self.n), index_position(J, self.n)]

    def terms(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], object]]:
        """Yield ``(I, J, c)`` for every nonzero coefficient."""
        rows = multi_indices(self.n, self.p)
        cols = multi_indices(self.n, self.q)
        for (a, b), c in np.ndenumerate(self.coeffs):
            if not ex.is_zero(c):
                yield rows[a], cols[b], c

    def is_zero(self) -> bool:
        return not any(True for _ in self.terms())

    def norm(self) -> float:
        """Max-abs coefficient norm, as a float."""
        if self.coeffs.size == 0:
            return 0.0
        return float(np.max(np.abs(ex.to_float_array(self.coeffs))))

    def to_float(self) -> Form:
        return Form(self.n, self.p, self.q, ex.to_float_array(self.coeffs))

    def to_exact(self) -> Form:
        return Form(self.n, self.p, self.q, ex.to_exact_array(self.coeffs))

    def conjugate(self) -> Form:
        return conjugate(self)

    def allclose(self, other: Form, tol: float = 1e-12) -> bool:
        self._check_same_space(other)
        diff = ex.to_float_array(self.coeffs) - ex.to_float_array(other.coeffs)
        if diff.size == 0:
            return True
        return float(np.max(np.abs(diff))) <= tol * max(1.0, self.norm(), other.norm())

    # arithmetic -------------------------------------------------------------

    def _check_same_space(self, other: Form):
        if not isinstance(other, Form):
            raise TypeError(f"expected Form, got {type(other).__name__}")
        if (self.n, self.p, self.q) != (other.n, other.p, other.q):
            raise BidegreeError(
                f"cannot combine ({self.p},{self.q}) on C^{self.n} "
                f"with ({other.p},{other.q}) on C^{other.n}")

    def _aligned(self, other: Form) -> tuple[np.ndarray, np.ndarray]:
        if self.exact == other.exact:
            return self.coeffs, other.coeffs
        return ex.to_float_array(self.coeffs), ex.to_float_array(other.coeffs)

    def __add__(self, other: Form) -> Form:
        self._check_same_space(other)
        a, b = self._aligned(other)
        return Form(self.n, self.p, self.q, a + b)

    def __sub__(self, other: Form) -> Form:
        self._check_same_space(other)
        a, b = self._aligned(other)
        return Form(self.n, self.p, self.q, a - b)

    def __neg__(self) -> Form:
        return Form(self.n, self.p, self.q, -self.coeffs)

    def __mul__(self, scalar) -> Form:
        if isinstance(scalar, Form):
            return NotImplemented
        if self.exact:
            if isinstance(scalar, (float, complex, np.floating, np.complexfloating)):
                return Form(self.n, self.p, self.q, ex.to_float_array(self.coeffs) * scalar)
            scalar = ex.gaussian(scalar)
        elif isinstance(scalar, ex.GaussianRational):
            scalar = complex(scalar)
        return Form(self.n, self.p, self.q, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> Form:
        if self.exact and not isinstance(scalar, (float, complex)):
            return self * (ex.unit(True) / ex.gaussian(scalar))
        return self * (1.0 / complex(scalar))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        if (self.n, self.p, self.q) != (other.n, other.p, other.q):
            return False
        a, b = self._aligned(other)
        return bool(np.all(a == b))

    __hash__ = None

    def __repr__(self) -> str:
        terms = list(itertools.islice(self.terms(), 4))
        more = "" if len(terms) < 4 else ", ..."
        body = ", ".join(f"{I}|{J}: {c}" for I, J, c in terms[:3])
        return f"Form(n={self.n}, ({self.p},{self.q}), {{{body}{more}}})"


def _check_n(*forms: Form) -> int:
    ns = {f.n for f in forms}
    if len(ns) != 1:
        raise DimensionError(f"forms live on different spaces: n in {sorted(ns)}")
    return ns.pop()


def wedge(*forms: Form) -> Form:
    """Exterior product of one or more forms (left to right)."""
    if not forms:
        raise ValueError("wedge needs at least one form")
    result = forms[0]
    for b in forms[1:]:
        result = _wedge2(result, b)
    return result


def _wedge2(a: Form, b: Form) -> Form:
    n = _check_n(a, b)
    p, q = a.p + b.p, a.q + b.q
    if p > n or q > n:
        raise DimensionError(f"wedge of ({a.p},{a.q}) and ({b.p},{b.q}) exceeds C^{n}")
    exact = a.exact and b.exact
    ca, cb = a._aligned(b) if a.exact != b.exact else (a.coeffs, b.coeffs)
    hol = _merge_table(n, a.p, b.p)
    anti = _merge_table(n, a.q, b.q)
    # omega-bar^J of a moves past omega^{I'} of b
    swap = -1 if (a.q * b.p) % 2 else 1
    out = ex.zeros((len(multi_indices(n, p)), len(multi_indices(n, q))), exact)
    nz_a = [(i, j, c) for (i, j), c in np.ndenumerate(ca) if not ex.is_zero(c)]
    nz_b = [(i, j, c) for (i, j), c in np.ndenumerate(cb) if not ex.is_zero(c)]
    for i1, j1, c1 in nz_a:
        for i2, j2, c2 in nz_b:
            h = hol.get((i1, i2))
            if h is None:
                continue
            t = anti.get((j1, j2))
            if t is None:
                continue
            s = swap * h[1] * t[1]
            prod = c1 * c2
            out[h[0], t[0]] += prod if s > 0 else -prod
    return Form(n, p, q, out)


def conjugate(a: Form) -> Form:
    """Complex conjugate: a (q, p)-form, ``c'[J, I] = (-1)**(p q) conj(c[I, J])``."""
    c = ex.conj_array(a.coeffs).T
    if (a.p * a.q) % 2:
        c = -c
    return Form(a.n, a.q, a.p, c)


def is_real(a: Form, tol: float = 1e-12) -> bool:
    """Whether a (p, p)-form equals its conjugate.

    Exact forms are compared exactly; float forms within
    ``tol * max(1, |a|_inf)``.
    """
    if a.p != a.q:
        raise BidegreeError(f"reality needs a (p,p)-form, got ({a.p},{a.q})")
    b = conjugate(a)
    if a.exact:
        return a == b
    return a.allclose(b, tol)


def contract(v, a: Form, slot: str = HOLOMORPHIC) -> Form:
    """Interior product by the vector ``v`` (holomorphic) or ``conj(v)``.

    This is the usual antiderivation: the vector is inserted into the first
    argument of the chosen type, with sign ``(-1)**p`` for passing the
    holomorphic block when ``slot`` is antiholomorphic.
    """
    v = np.asarray(v)
    if v.shape != (a.n,):
        raise DimensionError(f"vector of length {v.shape} on C^{a.n}")
    if a.exact and v.dtype == object:
        comps = v
    elif a.exact:
        a = a.to_float()
        comps = ex.to_float_array(v)
    else:
        comps = ex.to_float_array(v)
    if slot == HOLOMORPHIC:
        if a.p < 1:
            raise BidegreeError("holomorphic contraction of a form with p = 0")
        table = _removal_table(a.n, a.p)
        out = ex.zeros((len(multi_indices(a.n, a.p - 1)), a.coeffs.shape[1]), a.exact)
        for i, row in enumerate(table):
            for r, idx, target in row:
                f = comps[idx - 1]
                if ex.is_zero(f):
                    continue
                f = f if r % 2 == 0 else -f
                out[target, :] += f * a.coeffs[i, :]
        return Form(a.n, a.p - 1, a.q, out)
    if slot == ANTIHOLOMORPHIC:
        if a.q < 1:
            raise BidegreeError("antiholomorphic contraction of a form with q = 0")
        comps = ex.conj_array(comps)
        table = _removal_table(a.n, a.q)
        out = ex.zeros((a.coeffs.shape[0], len(multi_indices(a.n, a.q - 1))), a.exact)
        for j, row in enumerate(table):
            for r, idx, target in row:
                f = comps[idx - 1]
                if ex.is_zero(f):
                    continue
                f = f if (r + a.p) % 2 == 0 else -f
                out[:, target] += f * a.coeffs[:, j]
        return Form(a.n, a.p, a.q - 1, out)
    raise ValueError(f"slot must be {HOLOMORPHIC!r} or {ANTIHOLOMORPHIC!r}, got {slot!r}")


def _minors(L: np.ndarray, k: int) -> np.ndarray:
    """k x k minors ``M[I, K] = det(L[I, K])`` for a linear map's matrix L."""
    n, m = L.shape
    rows = multi_indices(n, k)
    cols = multi_indices(m, k)
    exact = L.dtype == object
    M = ex.zeros((len(rows), len(cols)), exact)
    if k == 0:
        M[0, 0] = ex.unit(exact)
        return M
    for a, I in enumerate(rows):
        ri = [i - 1 for i in I]
        for b, K in enumerate(cols):
            M[a, b] = ex.det(L[np.ix_(ri, [j - 1 for j in K])])
    return M


def pullback(a: Form, L) -> Form:
    """Pull ``a`` back along the linear map ``C^m -> C^n`` with matrix ``L`` (n x m)."""
    L = np.asarray(L)
    if L.shape[0] != a.n:
        raise DimensionError(f"map with {L.shape[0]} output rows cannot pull back a form on C^{a.n}")
    m = L.shape[1]
    if a.p > m or a.q > m:
        raise DimensionError(f"({a.p},{a.q})-form cannot be pulled back to C^{m}")
    if a.exact and L.dtype != object:
        L = ex.to_exact_array(L) if np.all(np.isfinite(L)) and _is_integral(L) else L
    if a.exact != (L.dtype == object):
        a = a.to_float()
        L = ex.to_float_array(L)
    Mp = _minors(L, a.p)
    Mq = ex.conj_array(_minors(L, a.q))
    c = Mp.T.dot(a.coeffs).dot(Mq)
    out = Form(m, a.p, a.q, c)
    return out


def _is_integral(L: np.ndarray) -> bool:
    return bool(np.all(np.asarray(L).real == np.round(np.asarray(L).real))
                and np.all(np.asarray(L).imag == 0))


def pairing(covector, vector):
    """alpha(v) = sum_i alpha_i v_i."""
    covector = np.asarray(covector)
    vector = np.asarray(vector)
    if covector.shape != vector.shape:
        raise DimensionError("covector and vector dimensions differ")
    return sum((x * y for x, y in zip(covector, vector)), ex.unit(covector.dtype == object) * 0)


@dataclass(frozen=True, eq=False)
class Frame:
    """A splitting V = ker(alpha) + C v0 with ``alpha(v0) = 1``.

    The hyperplane h = ker(alpha) gets the basis
    ``b_i = e_i - (alpha_i / alpha_m) e_m`` for i != m, where m is the
    pivot (the first index of largest |alpha_m|).  Coordinates of a vector
    of h in that basis are simply its non-pivot components, so for a
    coordinate frame (v0 = e_j, alpha = omega^j) the induced coframe on h is
    the standard one with index j dropped.
    """

    v0: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        v0 = np.asarray(self.v0)
        alpha = np.asarray(self.alpha)
        exact = v0.dtype == object or alpha.dtype == object
        v0 = _coerce_array(v0, exact) if exact else ex.to_float_array(v0)
        alpha = _coerce_array(alpha, exact) if exact else ex.to_float_array(alpha)
        if v0.ndim != 1 or v0.shape != alpha.shape:
            raise DimensionError("v0 and alpha must be vectors of the same length")
        if not 2 <= len(v0) <= MAX_DIM:
            raise DimensionError(f"frame dimension must be in 2..{MAX_DIM}")
        value = pairing(alpha, v0)
        if exact:
            ok = value == 1
        else:
            ok = abs(complex(value) - 1) <= 1e-12
        if not ok:
            if ex.is_zero(value) or (not exact and abs(complex(value)) < 1e-14):
                raise ValueError("alpha(v0) = 0: v0 lies in the hyperplane, no splitting")
            raise ValueError(f"alpha(v0) = {value}, expected 1 (normalize the frame first)")
        for arr in (v0, alpha):
            arr.setflags(write=False)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def coordinate(cls, j: int, n: int, exact: bool = False) -> Frame:
        """v0 = e_j, alpha = omega^j (1-based j)."""
        if not 1 <= j <= n:
            raise ValueError(f"coordinate index {j} out of range 1..{n}")
        e = np.zeros(n, dtype=int)
        e[j - 1] = 1
        if exact:
            return cls(ex.to_exact_array(e), ex.to_exact_array(e))
        return cls(e.astype(complex), e.astype(complex))

    @classmethod
    def from_vector(cls, v0) -> Frame:
        """alpha = conj(v0) / |v0|^2, so that h is the orthogonal complement of v0."""
        v0 = np.asarray(v0)
        if v0.dtype == object:
            norm2 = sum((x.abs2() for x in v0), ex.GaussianRational(0).re)
            alpha = ex.conj_array(v0) / ex.gaussian(norm2)
            return cls(v0, alpha)
        v0 = v0.astype(complex)
        return cls(v0, np.conj(v0) / np.vdot(v0, v0).real)

    @classmethod
    def random(cls, rng: np.random.Generator, n: int) -> Frame:
        v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return cls.from_vector(v0)

    @property
    def n(self) -> int:
        return len(self.v0)

    @property
    def exact(self) -> bool:
        return self.v0.dtype == object

    @property
    def pivot(self) -> int:
        mags = [ex.abs2(x) for x in self.alpha]
        best = max(mags)
        return next(i for i, m in enumerate(mags) if m == best)

    @property
    def basis(self) -> np.ndarray:
        """n x (n-1) matrix whose columns span h = ker(alpha)."""
        n, m = self.n, self.pivot
        B = ex.zeros((n, n - 1), self.exact)
        one = ex.unit(self.exact)
        col = 0
        for i in range(n):
            if i == m:
                continue
            B[i, col] = one
            B[m, col] = -self.alpha[i] / self.alpha[m]
            col += 1
        return B

    @property
    def coordinates(self) -> np.ndarray:
        """(n-1) x n matrix of v -> coordinates of v - alpha(v) v0 in ``basis``."""
        n, m = self.n, self.pivot
        P = ex.zeros((n, n), self.exact)
        one = ex.unit(self.exact)
        for i in range(n):
            P[i, i] = one
        P = P - np.outer(self.v0, self.alpha)
        keep = [i for i in range(n) if i != m]
        return P[keep, :]


def restrict_to_hyperplane(a: Form, frame: Frame) -> Form:
    """Restriction of ``a`` to h = ker(alpha), in the frame's induced coframe."""
    if a.n != frame.n:
        raise DimensionError("form and frame live on different spaces")
    return pullback(a, frame.basis)


def rho_extend(a: Form, frame: Frame) -> Form:
    """Extend a form on h to V so that it vanishes on v0 and conj(v0)."""
    if a.n != frame.n - 1:
        raise DimensionError(f"form on C^{a.n} is not a form on the hyperplane of C^{frame.n}")
    return pullback(a, frame.coordinates)


def volume_coefficient(a: Form):
    """The c with ``a = c * Vol``, ``Vol = i^(n^2) omega^{1..n} ^ conj(omega)^{1..n}``."""
    if a.p != a.n or a.q != a.n:
        raise BidegreeError(f"volume coefficient needs an (n,n)-form, got ({a.p},{a.q}) on C^{a.n}")
    return a.coeffs[0, 0] * ex.ipow(-(a.n * a.n), a.exact)


def volume_form(n: int, exact: bool = False) -> Form:
    full = tuple(range(1, n + 1))
    return Form.from_terms(n, n, n, {(full, full): ex.ipow(n * n, exact)}, exact=exact)


# (index pair, sign) of phi^1..phi^6 in omega^{ab}
PHI = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
PHI_SIGNS = (1, 1, 1, 1, -1, 1)


def phi_basis(n: int = 4, exact: bool = False) -> list[Form]:
    """The basis phi^1..phi^6 of Lambda^{2,0}(C^4); note phi^5 = -omega^{24}."""
    if n != 4:
        raise DimensionError("the phi-basis is defined on C^4 only")
    return [Form.from_terms(4, 2, 0, {(I, ()): s}, exact=exact) for I, s in zip(PHI, PHI_SIGNS)]


def standard_basis(n: int, k: int, exact: bool = False) -> list[Form]:
    return [Form.from_terms(n, k, 0, {(I, ()): 1}, exact=exact) for I in multi_indices(n, k)]


def holomorphic_vector(form: Form) -> np.ndarray:
    """Coefficients of a (k,0)-form as a flat vector (lexicographic order)."""
    if form.q != 0:
        raise BidegreeError("expected a (k,0)-form")
    return form.coeffs[:, 0].copy()


def wedge_covectors(covectors: Iterable) -> Form:
    """mu_1 ^ ... ^ mu_k for covectors given as component sequences."""
    forms = [Form.covector(c) for c in covectors]
    return wedge(*forms)
