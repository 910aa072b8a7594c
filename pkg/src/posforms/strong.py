"""The wedge pairing and strong positivity of real (2,2)-forms on C^4.

Strongly positive forms are the dual cone of the weakly positive ones under
``pair(Omega, Theta) = volume coefficient of Omega ^ Theta``.  Three tools
are offered:

* :func:`certify_strong_by_duality` proves strong positivity when the
  pairing functional is a trace term dominating its off-diagonal terms;
* :func:`refute_strong` searches a library of weakly positive forms for a
  negative pairing;
* :func:`nnls_decompose` looks for an explicit nonnegative combination of
  decomposable forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize, nnls

from . import exact as ex
from .decomposability import sample_decomposable_gram
from .exterior import (BidegreeError, Form, PHI, PHI_SIGNS, index_position, is_real,
                       volume_coefficient, wedge)
from .quadratic import NotRealError, form_from_matrix, gram_matrix, hermitian_positivity
from .verdicts import PositivityVerdict, Status
from .weak import ANTIDIAGONAL, omega_family_matrix

DUALITY_TOL = 1e-12
DUALITY_INEQUALITY = "duality_inequality"
DECOMPOSITION = "decomposition"
REFUTATION_WITNESS = "refutation_witness"


def _check_c4_22(form: Form, what: str = "form"):
    if (form.n, form.p, form.q) != (4, 2, 2):
        raise BidegreeError(f"{what} must be a (2,2)-form on C^4")


def pair(omega: Form, theta: Form):
    """Volume coefficient of ``omega ^ theta`` for real forms of complementary bidegree.

    Exact inputs give an exact rational; float inputs a float.
    """
    if omega.n != theta.n:
        raise BidegreeError(f"forms live on C^{omega.n} and C^{theta.n}")
    if omega.p != omega.q or theta.p != theta.q or omega.p + theta.p != omega.n:
        raise BidegreeError(
            f"bidegrees ({omega.p},{omega.q}) and ({theta.p},{theta.q}) are not complementary "
            f"real bidegrees on C^{omega.n}")
    if not is_real(omega) or not is_real(theta):
        raise NotRealError("pairing needs real forms")
    v = volume_coefficient(wedge(omega, theta))
    return ex.real_part(v) if isinstance(v, ex.GaussianRational) else float(np.real(v))


@dataclass
class PairingFunctional:
    """``pair(Omega, Theta) = sum_jk F[j,k] a_jk(Theta)`` for the phi-basis matrix of Theta.

    F satisfies ``F[k,j] = conj(F[j,k])`` so the pairing is real on real Theta.
    """

    F: np.ndarray

    def __call__(self, theta):
        A = gram_matrix(theta) if isinstance(theta, Form) else np.asarray(theta)
        return self.evaluate(A)

    def evaluate(self, A):
        A = np.asarray(A)
        if A.dtype == object or self.F.dtype == object:
            F = ex.to_exact_array(self.F)
            s = sum((F[j, k] * ex.gaussian(A[j, k]) for j in range(6) for k in range(6)),
                    ex.gaussian(0))
            return s.re
        return float(np.real(np.sum(self.F * A, axis=(-2, -1))))

    def evaluate_batch(self, As: np.ndarray) -> np.ndarray:
        """Pairings against a stack of float matrices of shape (..., 6, 6)."""
        return np.real(np.einsum("jk,...jk->...", ex.to_float_array(self.F), As))

    @property
    def trace_weight(self):
        return min((ex.real_part(self.F[j, j]) for j in range(6)))

    def off_diagonal(self):
        """``{(j, k): F[j,k]}`` over 1-based j < k with nonzero entries."""
        out = {}
        for j, k in itertools.combinations(range(6), 2):
            if not ex.is_zero(self.F[j, k]):
                out[(j + 1, k + 1)] = self.F[j, k]
        return out

    def __add__(self, other: PairingFunctional) -> PairingFunctional:
        return PairingFunctional(self.F + other.F)


def _basis_element(j: int, k: int, exact: bool) -> Form:
    """The (2,2)-form phi^j ^ conj(phi^k) (0-based j, k)."""
    c = ex.zeros((6, 6), exact)
    c[index_position(PHI[j], 4), index_position(PHI[k], 4)] = ex.unit(exact) * (
        PHI_SIGNS[j] * PHI_SIGNS[k])
    return Form(4, 2, 2, c)


def pairing_functional(omega: Form) -> PairingFunctional:
    """Coefficients F with ``pair(omega, Theta) = sum F[j,k] a_jk(Theta)``.

    ``F[j,k]`` is the volume coefficient of ``omega ^ phi^j ^ conj(phi^k)``,
    obtained by wedging against each of the 36 basis products.
    """
    _check_c4_22(omega)
    if not is_real(omega):
        raise NotRealError("pairing needs a real form")
    F = ex.zeros((6, 6), omega.exact)
    for j in range(6):
        for k in range(6):
            F[j, k] = volume_coefficient(wedge(omega, _basis_element(j, k, omega.exact)))
    return PairingFunctional(F)


# certificates ------------------------------------------------------------


@dataclass
class StrongCertificate:
    """Evidence about strong positivity.

    ``kind`` is one of ``duality_inequality`` (a proof), ``decomposition``
    (weights, generators, residual) or ``refutation_witness`` (a weakly
    positive Theta with negative pairing).
    """

    kind: str
    strict: bool = False
    payload: dict = field(default_factory=dict)

    @property
    def certifies(self) -> bool:
        return self.kind in (DUALITY_INEQUALITY, DECOMPOSITION)

    def to_json(self) -> dict:
        from .serialization import to_plain
        return {"kind": self.kind, "strict": self.strict, **to_plain(self.payload)}


def certify_strong_by_duality(omega: Form, tol: float = DUALITY_TOL) -> StrongCertificate | None:
    """Prove strong positivity from the shape of the pairing functional.

    With c the smallest diagonal entry of F and ``S = sum_{j<k} |F[j,k]|``,
    every weakly positive Theta satisfies ``a_jj >= 0`` and
    ``|a_jk| <= tr A_Theta / 2``, hence ``pair(omega, Theta) >= (c - S) tr``.
    So ``S <= c`` certifies strong positivity and ``S < c`` strict strong
    positivity (weakly positive Theta != 0 has positive trace).  Returns
    None when ``S > c``.

    A single off-diagonal pair on exact input is compared without rounding;
    otherwise S is summed in floating point with slack ``tol * max(1, c)``.
    """
    F = pairing_functional(omega)
    c = F.trace_weight
    off = F.off_diagonal()
    if omega.exact and len(off) <= 1:
        s2 = ex.abs2(next(iter(off.values()))) if off else Fraction(0)
        if c < 0:
            return None
        ok, strict = s2 <= c * c, s2 < c * c
        S = float(np.sqrt(float(s2)))
        exact_cmp = True
    else:
        S = float(sum(abs(complex(v)) for v in off.values()))
        cf = float(c)
        slack = tol * max(1.0, abs(cf))
        ok, strict = S <= cf + slack, S < cf - slack
        exact_cmp = False
    if not ok:
        return None
    payload = {
        "trace_weight": c,
        "corner_mass": S,
        "corners": [{"j": j, "k": k, "coefficient": v} for (j, k), v in off.items()],
        "exact_comparison": exact_cmp,
        "argument": "pair >= (trace_weight - corner_mass) * tr(A_Theta) on weakly positive Theta",
    }
    return StrongCertificate(DUALITY_INEQUALITY, bool(strict), payload)


# refutation --------------------------------------------------------------


@dataclass
class RefuteConfig:
    phases: int = 24
    magnitudes: tuple = (0.25, 0.5, 1.0, 2.0, 4.0)
    samples: int = 2000
    seed: int = 0
    tol: float = 1e-9
    refine: bool = True


def _elementary_gram(c: np.ndarray) -> np.ndarray:
    """Matrix of psi ^ conj(psi) for psi = sum c_j phi^j."""
    return np.einsum("...j,...k->...jk", c, np.conj(c))


def _witness_library(config: RefuteConfig):
    """Yield (label, stack of 6x6 matrices, parameters) groups of weakly positive forms."""
    phases = np.exp(2j * np.pi * np.arange(config.phases) / config.phases)
    mags = np.asarray(config.magnitudes, dtype=float)
    # elementary (phi^j + c phi^k) ^ conj(...)
    params, vecs = [], []
    for j, k in itertools.combinations(range(6), 2):
        for m in mags:
            for t, ph in enumerate(phases):
                v = np.zeros(6, dtype=complex)
                v[j], v[k] = 1.0, m * ph
                vecs.append(v)
                params.append({"j": j + 1, "k": k + 1, "magnitude": float(m),
                               "phase": f"{t}/{config.phases}"})
    for l in range(6):
        v = np.zeros(6, dtype=complex)
        v[l] = 1.0
        vecs.append(v)
        params.append({"j": l + 1})
    yield "elementary", _elementary_gram(np.array(vecs)), params

    mats, params = [], []
    for j, k in ANTIDIAGONAL:
        for b in (1.0, 2.0):
            for t, ph in enumerate(phases):
                mats.append(omega_family_matrix(j, k, complex(b * ph)))
                params.append({"j": j, "k": k, "modulus": b, "phase": f"{t}/{config.phases}"})
    yield "omega_family", np.array(mats), params

    if config.samples:
        rng = np.random.default_rng(config.seed)
        mats = sample_decomposable_gram(rng, config.samples)
        yield "decomposable", mats, [{"sample": i} for i in range(len(mats))]


def _normalize(A: np.ndarray) -> np.ndarray:
    tr = float(np.real(np.trace(A)))
    return A * (2.0 / tr) if tr > 0 else A


def refute_strong(omega: Form, config: RefuteConfig | None = None) -> StrongCertificate | None:
    """Search weakly positive forms Theta for ``pair(omega, Theta) < -tol``.

    Candidates: elementary forms built from ``phi^j + c phi^k`` over a
    phase/magnitude grid and pure ``phi^l``, the antidiagonal family with
    modulus 1 and 2, sampled decomposables, and (if omega is not Hermitian
    positive) the elementary form of its most negative eigenvector.  They
    are ranked by ``pair / tr A_Theta``; the best elementary cell is then
    refined by Nelder-Mead.  Witness matrices are scaled to trace 2, the
    trace of ``phi^j + c phi^k`` with ``|c| = 1``.  Returns None when
    nothing pairs negatively.
    """
    config = config or RefuteConfig()
    _check_c4_22(omega)
    F = pairing_functional(omega)
    Ff = ex.to_float_array(F.F)
    scale = max(1.0, float(np.max(np.abs(Ff))))
    best = None
    for label, mats, params in _witness_library(config):
        vals = F.evaluate_batch(mats)
        trs = np.real(np.trace(mats, axis1=-2, axis2=-1))
        scores = vals / trs
        i = int(np.argmin(scores))
        if best is None or scores[i] < best["score"] - 1e-12:
            best = {"score": float(scores[i]), "source": label, "params": params[i],
                    "matrix": mats[i]}

    herm = hermitian_positivity(omega.to_float())
    if herm.refuted:
        # beta = sum z_K phi^(7-K) has phi-coordinates z reversed, and
        # pair(omega, beta ^ conj(beta)) = Q(beta, beta)
        z = np.asarray(herm.details["witness_coordinates"])
        M = _elementary_gram(z[::-1])
        s = float(F.evaluate(M)) / float(np.real(np.trace(M)))
        if s < best["score"] - 1e-12:
            best = {"score": s, "source": "eigenvector", "params": {}, "matrix": M}

    if config.refine and best["source"] == "elementary" and "k" in best["params"]:
        j, k = best["params"]["j"] - 1, best["params"]["k"] - 1

        def f(x):
            v = np.zeros(6, dtype=complex)
            v[j], v[k] = 1.0, x[0] + 1j * x[1]
            M = _elementary_gram(v)
            return F.evaluate(M) / float(np.real(np.trace(M)))

        c0 = best["matrix"][k, j] / best["matrix"][j, j]
        res = minimize(f, [c0.real, c0.imag], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
        if res.fun < best["score"] - 1e-12:
            v = np.zeros(6, dtype=complex)
            v[j], v[k] = 1.0, res.x[0] + 1j * res.x[1]
            best = {"score": float(res.fun), "source": "elementary (refined)",
                    "params": {"j": j + 1, "k": k + 1,
                               "coefficient": complex(v[k])}, "matrix": _elementary_gram(v)}

    M = _normalize(best["matrix"])
    value = float(F.evaluate(M))
    if not value < -config.tol * scale:
        return None
    payload = {"witness": form_from_matrix(M), "witness_matrix": M, "source": best["source"],
               "parameters": best["params"], "pair": value}
    return StrongCertificate(REFUTATION_WITNESS, False, payload)


# decomposition -----------------------------------------------------------


def _realify(As: np.ndarray) -> np.ndarray:
    """Stack of 6x6 complex matrices -> columns of 72 real numbers."""
    flat = As.reshape(len(As), 36)
    return np.concatenate([flat.real, flat.imag], axis=1).T


@dataclass
class NNLSConfig:
    samples: int = 2000
    seed: int = 0
    tol: float = 1e-6
    include_basis: bool = False
    refreshes: int = 1


def nnls_decompose(omega: Form, config: NNLSConfig | None = None) -> StrongCertificate | None:
    """Nonnegative combination of sampled decomposables approximating omega.

    Solves ``min |A_omega - sum w_i D_i|_F`` over ``w >= 0`` with the
    Lawson-Hanson active-set solver.  When the residual stays above
    ``tol * max(1, |A_omega|_F)`` the generators with positive weight are
    kept, fresh samples are added and the problem is solved again
    (``refreshes`` times).  Returns a ``decomposition`` certificate or None.
    A None result is not evidence against strong positivity.
    """
    config = config or NNLSConfig()
    _check_c4_22(omega)
    A = ex.to_float_array(gram_matrix(omega))
    target = np.concatenate([A.reshape(36).real, A.reshape(36).imag])
    bound = config.tol * max(1.0, float(np.linalg.norm(A)))
    history = []
    basis = _elementary_gram(np.eye(6, dtype=complex))
    if config.include_basis:
        # diagonal targets are met exactly by the six phi^l ^ conj(phi^l)
        w, _ = nnls(_realify(basis), target)
        recon = np.einsum("i,ijk->jk", w, basis)
        res = float(np.linalg.norm(A - recon))
        history.append(res)
        if res <= bound:
            return _decomposition(w, basis, recon, res, history, config)
    rng = np.random.default_rng(config.seed)
    G = sample_decomposable_gram(rng, config.samples)
    if config.include_basis:
        G = np.concatenate([basis, G])
    for attempt in range(config.refreshes + 1):
        w, _ = nnls(_realify(G), target, maxiter=50 * G.shape[0])
        recon = np.einsum("i,ijk->jk", w, G)
        res = float(np.linalg.norm(A - recon))
        history.append(res)
        if res <= bound or attempt == config.refreshes:
            break
        keep = G[w > 0]
        G = np.concatenate([keep, sample_decomposable_gram(rng, config.samples)])
    if res > bound:
        return None
    return _decomposition(w, G, recon, res, history, config)


def _decomposition(w, G, recon, res, history, config) -> StrongCertificate:
    keep = w > 0
    payload = {"weights": w[keep], "generators": [form_from_matrix(D) for D in G[keep]],
               "generator_matrices": G[keep], "residual": res, "residual_history": history,
               "reconstruction": form_from_matrix((recon + recon.conj().T) / 2),
               "samples": config.samples, "seed": config.seed}
    return StrongCertificate(DECOMPOSITION, False, payload)


# Hermitian self-duality harness -----------------------------------------


@dataclass
class DualityReport:
    trials: int
    min_pairing: float
    violations: list
    hermitian_positive: bool
    consistent: bool


def hermitian_duality_check(omega: Form, trials: int = 1000, seed: int = 0,
                            tol: float = 1e-9) -> DualityReport:
    """Pair omega against elementary forms ``beta ^ conj(beta)``.

    The trial set is ``trials`` random unit beta plus the six eigenvectors
    of the pairing matrix, which contain the minimizer.  The Hermitian cone
    is self-dual, so a violation (pairing below ``-tol``) must occur exactly
    when omega is not Hermitian positive; ``consistent`` records whether
    that agreement holds.
    """
    _check_c4_22(omega)
    F = pairing_functional(omega)
    Ff = ex.to_float_array(F.F)
    rng = np.random.default_rng(seed)
    c = (rng.standard_normal((trials, 6)) + 1j * rng.standard_normal((trials, 6))) / np.sqrt(2)
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    # c^T F conj(c) is the Rayleigh quotient of F at conj(c)
    _, V = np.linalg.eigh((Ff + Ff.conj().T) / 2)
    c = np.concatenate([c, np.conj(V.T)])
    vals = F.evaluate_batch(_elementary_gram(c))
    scale = max(1.0, float(np.max(np.abs(Ff))))
    bad = [{"trial": int(i), "pair": float(vals[i]), "coefficients": c[i]}
           for i in np.nonzero(vals < -tol * scale)[0]]
    herm = hermitian_positivity(omega).holds
    return DualityReport(len(c), float(np.min(vals)), bad, bool(herm), bool(herm) == (not bad))


# verdict -----------------------------------------------------------------


def strong_verdict(omega: Form, strict: bool = False, refute: RefuteConfig | None = None,
                   decompose: NNLSConfig | None = None) -> tuple[PositivityVerdict, StrongCertificate | None]:
    """Combine the tools: duality proof, refutation search, then NNLS.

    A duality certificate gives Certified; a refutation witness gives
    Refuted (for the strict test as well).  A successful decomposition only
    gives NumericallyPositive, and never for the strict test.
    """
    cert = certify_strong_by_duality(omega)
    if cert is not None and (cert.strict or not strict):
        return PositivityVerdict("strong", strict, Status.CERTIFIED, "duality inequality",
                                 float(cert.payload["trace_weight"]) - cert.payload["corner_mass"]), cert
    ref = refute_strong(omega, refute)
    if ref is not None:
        return PositivityVerdict("strong", strict, Status.REFUTED,
                                 f"negative pairing with {ref.payload['source']} witness",
                                 ref.payload["pair"], witness=ref.payload["witness"]), ref
    if cert is not None:   # non-strict proof, strict requested
        return PositivityVerdict("strong", strict, Status.INCONCLUSIVE,
                                 "only the non-strict duality inequality holds"), cert
    if not strict:
        dec = nnls_decompose(omega, decompose)
        if dec is not None:
            return PositivityVerdict("strong", strict, Status.NUMERICALLY_POSITIVE,
                                     "nonnegative decomposition",
                                     dec.payload["residual"]), dec
    return PositivityVerdict("strong", strict, Status.INCONCLUSIVE,
                             "no certificate and no refutation found"), None
