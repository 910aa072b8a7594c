"""The Hermitian form Q_Omega of a real (p,p)-form and its matrix.

For a basis ``b_1..b_N`` of Lambda^{p,0} write ``b*_K`` for the
complementary basis of Lambda^{n-p,0} defined by
``b_K ^ b*_L = delta_{KL} omega^{1..n}``.  The matrix ``A`` returned by
:func:`gram_matrix` is ``A[K, L] = Q(b*_K, b*_L)``; equivalently

    Omega = i^(p^2) * sum_{K,L} A[K, L] b_K ^ conj(b_L).

With the phi-basis on C^4 (the default for (n, p) = (4, 2)) one has
``b*_j = phi^(7-j)`` and ``i^4 = 1``, so ``Omega = sum a_jk phi^j ^ conj(phi^k)``.
Q evaluated on ``beta = sum_K z_K b*_K`` is ``z @ A @ conj(z)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import exact as ex
from .exterior import (BidegreeError, DimensionError, Form, is_real, multi_indices,
                       permutation_sign, phi_basis, standard_basis, volume_coefficient, wedge,
                       conjugate)
from .verdicts import PositivityVerdict, Status

DEFAULT_EIGEN_TOL = 1e-9


class NotRealError(ValueError):
    """A form that must be real is not."""


class NotHermitianError(ValueError):
    """A matrix that must be Hermitian is not."""


def default_basis(n: int, p: int, exact: bool = False) -> list[Form]:
    if (n, p) == (4, 2):
        return phi_basis(4, exact=exact)
    return standard_basis(n, p, exact=exact)


def _basis_matrix(basis: list[Form], n: int, p: int) -> np.ndarray:
    if len(basis) != len(multi_indices(n, p)):
        raise DimensionError(f"basis has {len(basis)} elements, expected {len(multi_indices(n, p))}")
    for b in basis:
        if (b.n, b.p, b.q) != (n, p, 0):
            raise BidegreeError(f"basis elements must be ({p},0)-forms on C^{n}")
    exact = all(b.exact for b in basis)
    rows = [b.coeffs[:, 0] if exact else ex.to_float_array(b.coeffs[:, 0]) for b in basis]
    return np.array(rows, dtype=object if exact else complex)


@lru_cache(maxsize=None)
def _complement_signs(n: int, p: int) -> np.ndarray:
    """E[I, M] = sign of omega^I ^ omega^M against omega^{1..n}."""
    rows = multi_indices(n, p)
    cols = multi_indices(n, n - p)
    E = np.zeros((len(rows), len(cols)), dtype=int)
    for a, I in enumerate(rows):
        for b, M in enumerate(cols):
            E[a, b] = permutation_sign(I + M)
    return E


def complementary_basis(basis: list[Form]) -> list[Form]:
    """The basis b*_K of Lambda^{n-p,0} with ``b_K ^ b*_L = delta_KL omega^{1..n}``."""
    n, p = basis[0].n, basis[0].p
    B = _basis_matrix(basis, n, p)
    exact = B.dtype == object
    E = _complement_signs(n, p)
    E = ex.to_exact_array(E) if exact else E.astype(complex)
    D = ex.inv(B.dot(E)).T
    return [Form(n, n - p, 0, D[k].reshape(-1, 1)) for k in range(len(basis))]


def dual_coordinates(beta: Form, basis: list[Form] | None = None) -> np.ndarray:
    """z with ``beta = sum_K z_K b*_K``; ``z_K`` is the coefficient of b_K ^ beta on omega^{1..n}."""
    n = beta.n
    p = n - beta.p
    if beta.q != 0:
        raise BidegreeError("expected an (n-p,0)-form")
    basis = basis if basis is not None else default_basis(n, p, exact=beta.exact)
    B = _basis_matrix(basis, n, p)
    E = _complement_signs(n, p)
    if B.dtype == object and beta.exact:
        E = ex.to_exact_array(E)
        b = beta.coeffs[:, 0]
    else:
        B = ex.to_float_array(B)
        b = ex.to_float_array(beta.coeffs[:, 0])
    return B.dot(E).dot(b)


def check_hermitian(A, tol: float = 1e-12) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {A.shape}")
    if A.dtype == object:
        if not np.all(A == ex.conj_array(A).T):
            raise NotHermitianError("matrix is not Hermitian")
        return A
    A = A.astype(complex)
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if A.size and float(np.max(np.abs(A - A.conj().T))) > tol * scale:
        raise NotHermitianError("matrix is not Hermitian")
    return A


def gram_matrix(omega: Form, basis: list[Form] | None = None, tol: float = 1e-12) -> np.ndarray:
    """Matrix of Q_Omega in the complementary basis of ``basis`` (phi-basis on C^4)."""
    if omega.p != omega.q:
        raise BidegreeError(f"gram matrix needs a (p,p)-form, got ({omega.p},{omega.q})")
    if not is_real(omega, tol):
        raise NotRealError("form is not real")
    n, p = omega.n, omega.p
    basis = basis if basis is not None else default_basis(n, p, exact=omega.exact)
    B = _basis_matrix(basis, n, p)
    c = omega.coeffs
    if (B.dtype == object) != omega.exact:
        B, c = ex.to_float_array(B), ex.to_float_array(c)
    binv = ex.inv(B)
    A = binv.T.dot(c).dot(ex.conj_array(binv)) * ex.ipow(-p * p, omega.exact)
    if not omega.exact:
        # exact hermiticity up to rounding
        A = (A + A.conj().T) / 2
    return A


def form_from_matrix(A, n: int | None = None, p: int | None = None,
                     basis: list[Form] | None = None) -> Form:
    """Inverse of :func:`gram_matrix`: ``i^(p^2) sum A[K,L] b_K ^ conj(b_L)``."""
    A = check_hermitian(A)
    if n is None or p is None:
        if A.shape[0] != 6:
            raise DimensionError("pass n and p for matrices other than 6 x 6")
        n, p = 4, 2
    exact = A.dtype == object
    basis = basis if basis is not None else default_basis(n, p, exact=exact)
    B = _basis_matrix(basis, n, p)
    if (B.dtype == object) != exact:
        B, A = ex.to_float_array(B), ex.to_float_array(A)
        exact = False
    c = B.T.dot(A).dot(ex.conj_array(B)) * ex.ipow(p * p, exact)
    return Form(n, p, p, c)


def q_value(omega: Form, beta: Form, gamma: Form | None = None):
    """Q_Omega(beta, gamma) straight from the wedge definition."""
    gamma = beta if gamma is None else gamma
    k = beta.p
    top = wedge(omega, beta, conjugate(gamma))
    return volume_coefficient(top) * ex.ipow(k * k, top.exact)


@dataclass
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int
    cutoff: float = 0.0

    @property
    def signature(self) -> tuple[int, int, int]:
        """(positive, negative, zero) eigenvalue counts at the rank cutoff."""
        w = self.eigenvalues
        pos = int(np.sum(w > self.cutoff))
        neg = int(np.sum(w < -self.cutoff))
        return pos, neg, len(w) - pos - neg


def eigen(A, tol: float = DEFAULT_EIGEN_TOL) -> EigenDecomposition:
    """Eigenvalues (ascending), orthonormal eigenvectors (columns), and rank.

    An eigenvalue counts towards the rank when ``|lambda| > tol * |A|_2``.
    """
    A = check_hermitian(ex.to_float_array(A), tol=1e-10)
    w, V = np.linalg.eigh(A)
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    cutoff = tol * norm
    rank = int(np.sum(np.abs(w) > cutoff)) if norm > 0 else 0
    return EigenDecomposition(w, V, rank, cutoff)


def _principal_minors(A: np.ndarray, leading: bool):
    N = A.shape[0]
    if leading:
        subsets = [tuple(range(k)) for k in range(1, N + 1)]
    else:
        subsets = [s for k in range(1, N + 1) for s in itertools.combinations(range(N), k)]
    for s in subsets:
        yield s, ex.real_part(ex.det(A[np.ix_(s, s)]))


def is_psd_exact(A: np.ndarray, strict: bool = False) -> bool:
    """Sylvester-type test without rounding (object arrays)."""
    if strict:
        return all(m > 0 for _, m in _principal_minors(A, leading=True))
    return all(m >= 0 for _, m in _principal_minors(A, leading=False))


def is_psd(A, strict: bool = False, tol: float = DEFAULT_EIGEN_TOL) -> bool:
    A = np.asarray(A)
    if A.dtype == object:
        return is_psd_exact(A, strict)
    w = np.linalg.eigvalsh(check_hermitian(A, tol=1e-10))
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if strict:
        return bool(w.size == 0 or w[0] > tol * scale) and (scale > 0 or w.size == 0)
    return bool(w.size == 0 or w[0] >= -tol * scale)


def hermitian_positivity(omega: Form, strict: bool = False,
                         tol: float = DEFAULT_EIGEN_TOL,
                         basis: list[Form] | None = None) -> PositivityVerdict:
    """Decide (strict) Hermitian positivity of a real (p,p)-form.

    Exact forms are decided by principal minors; float forms by the smallest
    eigenvalue against ``tol * |A|_2``.  A refutation carries the
    (n-p,0)-form ``beta`` along the offending eigenvector, with
    ``Q(beta, beta) = value``.
    """
    A = gram_matrix(omega, basis=basis)
    n, p = omega.n, omega.p
    dec = eigen(A, tol)
    lam = float(dec.eigenvalues[0]) if dec.eigenvalues.size else 0.0
    scale = float(np.max(np.abs(dec.eigenvalues))) if dec.eigenvalues.size else 0.0
    if omega.exact:
        ok = is_psd_exact(A, strict)
        provenance = "exact principal minors (Sylvester)"
    else:
        ok = lam > tol * scale if strict else lam >= -tol * scale
        provenance = f"smallest eigenvalue vs tol={tol:g} relative to |A|_2"
    details = {"eigenvalues": dec.eigenvalues.tolist(), "rank": dec.rank}
    if ok:
        return PositivityVerdict("hermitian", strict, Status.CERTIFIED, provenance, lam,
                                 details=details)
    coords = np.conj(dec.eigenvectors[:, 0])
    dual = complementary_basis(basis if basis is not None else default_basis(n, p))
    beta = Form.zero(n, n - p, 0)
    for z, b in zip(coords, dual):
        beta = beta + b * complex(z)
    details["witness_coordinates"] = coords.tolist()
    return PositivityVerdict("hermitian", strict, Status.REFUTED, provenance, lam, witness=beta,
                             details=details)
