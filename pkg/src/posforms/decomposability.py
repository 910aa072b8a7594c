"""Decomposable (k,0)-forms: tests, factorization, and random sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exact as ex
from .exterior import (BidegreeError, Form, contract, conjugate, multi_indices, phi_basis,
                       wedge, PHI, PHI_SIGNS, index_position)

DECOMPOSABLE_TOL = 1e-10


class NotDecomposableError(ValueError):
    """A (2,0)-form expected to be decomposable is not (or is zero)."""


@dataclass(frozen=True, eq=False)
class PlueckerPoint:
    """A (2,0)-form on C^4 written as ``psi = sum_r z_r phi^(7-r)``.

    These are the coordinates in which ``Q(psi, psi) = z @ A @ conj(z)`` for
    the phi-basis matrix A, i.e. the vectors used in the weak-positivity
    arguments; ``phi_coordinates`` gives the plain phi-basis coefficients.
    The Plücker residual is the same in both orders.
    """

    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z)
        z = z if z.dtype == object else z.astype(complex)
        if z.shape != (6,):
            raise ValueError("a Plücker point has 6 coordinates")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def residual(self):
        return pluecker_residual(self.z)

    @property
    def phi_coordinates(self) -> np.ndarray:
        return self.z[::-1].copy()

    def form(self) -> Form:
        exact = self.z.dtype == object
        return sum((b * c for b, c in zip(phi_basis(4, exact=exact), self.phi_coordinates)),
                   Form.zero(4, 2, 0, exact=exact))

    def quadratic_value(self, A: np.ndarray):
        """``z A conj(z)``, the value of Q on this (2,0)-form."""
        z = self.z
        if z.dtype != object or np.asarray(A).dtype != object:
            z = ex.to_float_array(z)
            return float(np.real(z @ ex.to_float_array(A) @ np.conj(z)))
        return ex.real_part(z.dot(A).dot(ex.conj_array(z)))

    @classmethod
    def from_form(cls, psi: Form) -> PlueckerPoint:
        if (psi.n, psi.p, psi.q) != (4, 2, 0):
            raise BidegreeError("Plücker coordinates are for (2,0)-forms on C^4")
        c = [psi.coeff(I) * s for I, s in zip(PHI, PHI_SIGNS)]
        return cls(np.array(c[::-1], dtype=object if psi.exact else complex))


def pluecker_residual(z):
    """``z1 z6 + z2 z5 + z3 z4``; zero exactly on decomposable (2,0)-forms of C^4."""
    if isinstance(z, PlueckerPoint):
        z = z.z
    z = np.asarray(z)
    return z[0] * z[5] + z[1] * z[4] + z[2] * z[3]


def _norm2(form: Form):
    c = form.coeffs
    if form.exact:
        return sum((ex.abs2(x) for x in c.ravel()), ex.GaussianRational(0).re)
    return float(np.sum(np.abs(c) ** 2))


def plucker_defects(psi: Form) -> list[Form]:
    """The forms ``iota_xi(psi) ^ psi`` over basis (k-1)-vectors xi.

    ``psi`` is decomposable exactly when all of them vanish.
    """
    if psi.q != 0:
        raise BidegreeError("decomposability is defined for (k,0)-forms")
    k, n = psi.p, psi.n
    out = []
    if k <= 1:
        return out
    eye = np.eye(n, dtype=int)
    for K in multi_indices(n, k - 1):
        c = psi
        for j in reversed(K):
            vec = ex.to_exact_array(eye[j - 1]) if psi.exact else eye[j - 1]
            c = contract(vec, c)
        out.append(wedge(c, psi))
    return out


def is_decomposable(psi: Form, tol: float = DECOMPOSABLE_TOL) -> bool:
    """Whether a (k,0)-form is a wedge of k covectors.

    Uses the Plücker relations in contraction form; exact forms are tested
    exactly, float forms against ``tol * |psi|_2^2``.
    """
    if psi.q != 0:
        raise BidegreeError("decomposability is defined for (k,0)-forms")
    if psi.p <= 1 or psi.p >= psi.n - 1:
        return True
    defects = plucker_defects(psi)
    if psi.exact:
        return all(d.is_zero() for d in defects)
    bound = tol * _norm2(psi)
    return all(d.norm() <= bound for d in defects)


def factorize_2form(psi: Form, tol: float = DECOMPOSABLE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Covectors (mu1, mu2) with ``mu1 ^ mu2 = psi`` for a decomposable 2-form.

    Pivots on the largest coefficient c_ab and returns
    ``mu1 = iota_{e_a} psi / c_ab``, ``mu2 = iota_{e_b} psi``.
    """
    if psi.p != 2 or psi.q != 0:
        raise BidegreeError("factorize_2form expects a (2,0)-form")
    if psi.is_zero():
        raise NotDecomposableError("the zero form has no factorization")
    if not is_decomposable(psi, tol):
        raise NotDecomposableError("form is not decomposable")
    mags = np.abs(ex.to_float_array(psi.coeffs[:, 0]))
    pos = int(np.argmax(mags))
    a, b = multi_indices(psi.n, 2)[pos]
    c = psi.coeffs[pos, 0]
    eye = np.eye(psi.n, dtype=int)
    ea, eb = eye[a - 1], eye[b - 1]
    if psi.exact:
        ea, eb = ex.to_exact_array(ea), ex.to_exact_array(eb)
    mu1 = (contract(ea, psi) / c).coeffs[:, 0]
    mu2 = contract(eb, psi).coeffs[:, 0]
    return mu1.copy(), mu2.copy()


def random_covectors(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    """k independent standard complex Gaussian covectors, as rows."""
    return (rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))) / np.sqrt(2)


def wedge_of_rows(M: np.ndarray) -> np.ndarray:
    """Coefficients of ``M[0] ^ ... ^ M[k-1]``: the k x k minors of M."""
    k, n = M.shape
    cols = multi_indices(n, k)
    if k == 0:
        return np.ones(1, dtype=complex)
    idx = np.array(cols) - 1
    return np.linalg.det(M[:, idx].transpose(1, 0, 2))


def random_decomposable_factor(rng: np.random.Generator, k: int, n: int) -> Form:
    """A unit-norm decomposable (k,0)-form from Gaussian covectors."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    psi = wedge_of_rows(random_covectors(rng, k, n))
    psi = psi / np.linalg.norm(psi)
    return Form(n, k, 0, psi.reshape(-1, 1))


def elementary(psi: Form) -> Form:
    """``i^(k^2) psi ^ conj(psi)`` for a (k,0)-form psi."""
    k = psi.p
    return wedge(psi, conjugate(psi)) * ex.ipow(k * k, psi.exact)


def sample_decomposable(rng: np.random.Generator, k: int, n: int) -> Form:
    """A random decomposable (k,k)-form ``i^(k^2) psi ^ conj(psi)`` of unit coefficient norm.

    ``psi = mu_1 ^ ... ^ mu_k`` with independent complex Gaussian covectors;
    the result is deterministic given the state of ``rng``.
    """
    psi = random_decomposable_factor(rng, k, n)
    return Form(n, k, k, np.outer(psi.coeffs[:, 0], np.conj(psi.coeffs[:, 0])) * ex.ipow(k * k, False))


def sample_decomposable_gram(rng: np.random.Generator, count: int) -> np.ndarray:
    """Phi-basis matrices (count x 6 x 6) of random decomposable (2,2)-forms on C^4.

    Equivalent to ``gram_matrix(sample_decomposable(rng, 2, 4))`` repeated,
    drawing from ``rng`` in the same order.
    """
    signs = np.array(PHI_SIGNS)
    out = np.empty((count, 6, 6), dtype=complex)
    for t in range(count):
        psi = random_decomposable_factor(rng, 2, 4).coeffs[:, 0] * signs
        out[t] = np.outer(psi, np.conj(psi))
    return out


def phi_index(I) -> int:
    """0-based position of the phi-basis element supported on omega^I."""
    return index_position(I, 4)
