"""Weak positivity of real (2,2)-forms on C^4.

A real (2,2)-form Theta is weakly positive iff ``z A z^H >= 0`` for every
Plücker point z (``z1 z6 + z2 z5 + z3 z4 = 0``), A being its phi-basis
matrix.  This module provides

* :func:`screen`: the necessary matrix inequalities (diagonal, 2x2 and
  3x3 principal blocks off the antidiagonal, antidiagonal pair bounds,
  trace), exact on Gaussian-rational input;
* :func:`minimize_on_pluecker`: multistart descent of the Rayleigh quotient
  over 2-planes, a refutation tool;
* :func:`weak_verdict`: screen, witness reconstruction, then minimization;
* the Omega_a family and its closed-form classification.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import exact as ex
from .decomposability import PlueckerPoint, factorize_2form, pluecker_residual
from .exterior import (BidegreeError, Form, PHI, PHI_SIGNS, pullback, volume_coefficient)
from .quadratic import NotRealError, check_hermitian, form_from_matrix, gram_matrix, is_psd
from .verdicts import PositivityVerdict, Status

DEFAULT_TOL = 1e-9

# 1-based antidiagonal pairs j + k = 7
ANTIDIAGONAL = ((1, 6), (2, 5), (3, 4))
# triples j<k<l with no pair on the antidiagonal: one index from each pair
TRIPLES = tuple(sorted(tuple(sorted(t)) for t in itertools.product((1, 6), (2, 5), (3, 4))))
OFF_ANTIDIAGONAL_PAIRS = tuple((j, k) for j, k in itertools.combinations(range(1, 7), 2)
                               if j + k != 7)


@dataclass
class ScreenCheck:
    number: int
    name: str
    passed: bool
    entries: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [e for e in self.entries if not e["ok"]]


@dataclass
class ScreenReport:
    strict: bool
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, number: int) -> ScreenCheck:
        return next(c for c in self.checks if c.number == number)

    @property
    def failed_numbers(self) -> list[int]:
        return [c.number for c in self.checks if not c.passed]


class _Cmp:
    """Comparisons that are exact on Fractions and toleranced on floats."""

    def __init__(self, exact: bool, strict: bool, tol: float, scale: float):
        self.exact, self.strict = exact, strict
        self.slack = 0 if exact else tol * scale

    def leq(self, lhs, rhs) -> bool:
        if self.strict:
            return lhs < rhs - self.slack
        return lhs <= rhs + self.slack

    def mod_leq(self, x, bound) -> tuple[bool, bool]:
        """(|x| <= bound, |x| == bound) with the configured strictness."""
        if self.exact:
            if bound < 0:
                return False, False
            m2, b2 = ex.abs2(x), bound * bound
            ok = m2 < b2 if self.strict else m2 <= b2
            return ok, m2 == b2
        m = abs(complex(x))
        b = float(bound)
        return self.leq(m, b), abs(m - b) <= max(self.slack, 1e-15 * max(1.0, b))


def _entry(A, j, k):
    return A[j - 1, k - 1]


def _diag(A, j):
    return ex.real_part(A[j - 1, j - 1])


def screen(A, strict: bool = False, tol: float = DEFAULT_TOL) -> ScreenReport:
    """Run the necessary conditions for (strict) weak positivity on a 6x6 matrix.

    Checks, in order: (1) diagonal >= 0; (2) 2x2 blocks off the antidiagonal
    PSD; (3) the eight 3x3 blocks avoiding antidiagonal pairs PSD; (4)
    ``|a_jk +- a_lm| <= (a_jj + a_kk + a_ll + a_mm) / 2`` for antidiagonal
    entries; (5) ``|a_jk| <=`` the same half-sum; (6) positive trace unless
    A = 0; (7) ``|a_jk| <= tr / 2`` for all j != k.  ``strict`` makes every
    inequality strict and every block test definite.
    """
    A = check_hermitian(A)
    if A.shape != (6, 6):
        raise ValueError("the screen is defined for 6x6 phi-basis matrices")
    exact = A.dtype == object
    scale = 1.0 if exact else max(1.0, float(np.max(np.abs(A))))
    cmp = _Cmp(exact, strict, tol, scale)
    num = (lambda x: x) if exact else float
    checks = []

    entries = []
    for j in range(1, 7):
        d = _diag(A, j)
        ok = d > 0 if (strict and exact) else (d >= 0 if exact else cmp.leq(0.0, d))
        entries.append({"indices": (j,), "lhs": num(d), "rhs": 0, "ok": bool(ok), "tight": d == 0})
    checks.append(ScreenCheck(1, "diagonal nonnegative", all(e["ok"] for e in entries), entries))

    for number, name, blocks in ((2, "2x2 blocks off antidiagonal", OFF_ANTIDIAGONAL_PAIRS),
                                 (3, "3x3 blocks off antidiagonal", TRIPLES)):
        entries = []
        for block in blocks:
            idx = [b - 1 for b in block]
            sub = A[np.ix_(idx, idx)]
            ok = is_psd(sub, strict=strict, tol=tol)
            lam = float(np.linalg.eigvalsh(ex.to_float_array(sub))[0])
            entries.append({"indices": block, "lhs": lam, "rhs": 0, "ok": bool(ok),
                            "tight": abs(lam) <= 1e-12 * scale})
        checks.append(ScreenCheck(number, name, all(e["ok"] for e in entries), entries))

    entries = []
    for (j, k), (l, m) in itertools.combinations(ANTIDIAGONAL, 2):
        half = (_diag(A, j) + _diag(A, k) + _diag(A, l) + _diag(A, m)) / 2
        for sign in (1, -1):
            x = _entry(A, j, k) + _entry(A, l, m) * sign
            ok, tight = cmp.mod_leq(x, half)
            entries.append({"indices": ((j, k), (l, m)), "sign": sign, "lhs": abs(complex(x)),
                            "rhs": num(half), "ok": ok, "tight": tight})
    checks.append(ScreenCheck(4, "antidiagonal pair bounds", all(e["ok"] for e in entries), entries))

    entries = []
    for (j, k) in ANTIDIAGONAL:
        for (l, m) in ANTIDIAGONAL:
            if (l, m) == (j, k):
                continue
            half = (_diag(A, j) + _diag(A, k) + _diag(A, l) + _diag(A, m)) / 2
            x = _entry(A, j, k)
            ok, tight = cmp.mod_leq(x, half)
            entries.append({"indices": ((j, k), (l, m)), "lhs": abs(complex(x)), "rhs": num(half),
                            "ok": ok, "tight": tight})
    checks.append(ScreenCheck(5, "antidiagonal entry bound", all(e["ok"] for e in entries), entries))

    tr = sum((_diag(A, j) for j in range(1, 7)), 0)
    if exact:
        zero = all(ex.is_zero(x) for x in A.ravel())
    else:
        zero = float(np.max(np.abs(A))) == 0.0
    if strict:
        ok = (tr > 0) if exact else cmp.leq(0.0, tr)
    else:
        ok = zero or ((tr > 0) if exact else tr > cmp.slack)
    checks.append(ScreenCheck(6, "positive trace", bool(ok),
                              [{"indices": (), "lhs": num(tr), "rhs": 0, "ok": bool(ok),
                                "tight": False, "zero_matrix": zero}]))

    entries = []
    for j, k in itertools.combinations(range(1, 7), 2):
        ok, tight = cmp.mod_leq(_entry(A, j, k), tr / 2)
        entries.append({"indices": (j, k), "lhs": abs(complex(_entry(A, j, k))), "rhs": num(tr / 2),
                        "ok": ok, "tight": tight})
    checks.append(ScreenCheck(7, "half-trace bound", all(e["ok"] for e in entries), entries))
    return ScreenReport(strict, checks)


# witnesses ---------------------------------------------------------------


def _unit(r: int) -> np.ndarray:
    e = np.zeros(6, dtype=complex)
    e[r - 1] = 1
    return e


def _quad(A: np.ndarray, z: np.ndarray) -> float:
    return float(np.real(z @ A @ np.conj(z)))


def _affine_minimizer(A: np.ndarray, u: np.ndarray, d: np.ndarray) -> np.ndarray:
    """A point of the line ``u + t d`` where Q is smallest (or very negative)."""
    C = _quad(A, u)
    b = complex(d @ A @ np.conj(u))
    S = _quad(A, d)
    if S > 1e-14:
        t = -np.conj(b) / S
    elif abs(b) > 1e-14:
        t = -np.conj(b) * max(1.0, (abs(C) + 1) / abs(b) ** 2)
    elif S < 0:
        t = np.sqrt((abs(C) + 1) / abs(S))
    else:
        t = 0.0
    return u + t * d


def antidiagonal_test_vectors(A: np.ndarray, pair1, pair2) -> list[np.ndarray]:
    """Optimized members of the Plücker lines ``s e_j + e_l + t (e_{7-l} - e_{7-j} / s)``.

    For ``s`` in {1, -1, i, -i} these are the test vectors behind the
    antidiagonal pair bounds; each lies on the quadric for every t.
    """
    j, l = pair1[0], pair2[0]
    out = []
    for s in (1, -1, 1j, -1j):
        u = s * _unit(j) + _unit(l)
        d = _unit(7 - l) - _unit(7 - j) / s
        out.append(_affine_minimizer(A, u, d))
    return out


def _block_vector(A: np.ndarray, block) -> np.ndarray:
    idx = [b - 1 for b in block]
    w, V = np.linalg.eigh(A[np.ix_(idx, idx)])
    z = np.zeros(6, dtype=complex)
    z[idx] = np.conj(V[:, 0])
    return z


def screen_witnesses(A, report: ScreenReport) -> list[PlueckerPoint]:
    """Plücker points built from the failing checks of a screen report."""
    A = ex.to_float_array(A)
    cands = []
    for check in report.checks:
        if check.passed:
            continue
        for e in check.violations:
            if check.number == 1:
                cands.append(_unit(e["indices"][0]))
            elif check.number in (2, 3):
                cands.append(_block_vector(A, e["indices"]))
            elif check.number in (4, 5):
                cands.extend(antidiagonal_test_vectors(A, *e["indices"]))
            elif check.number == 6:
                cands.extend(_unit(j) for j in range(1, 7))
            elif check.number == 7:
                j, k = e["indices"]
                if j + k != 7:
                    cands.append(_block_vector(A, (j, k)))
                else:
                    others = [pp for pp in ANTIDIAGONAL if pp != (j, k)]
                    for pp in others:
                        cands.extend(antidiagonal_test_vectors(A, (j, k), pp))
    points = []
    for z in cands:
        n2 = float(np.vdot(z, z).real)
        if n2 == 0:
            continue
        z = z / np.sqrt(n2)
        if abs(pluecker_residual(z)) <= 1e-12:
            points.append(PlueckerPoint(z))
    return points


# multistart minimization -------------------------------------------------

_PAIRS = np.array(PHI) - 1          # phi^j = s_j omega^{a b}
_SIGNS = np.array(PHI_SIGNS, dtype=float)
# z_r = coefficient of phi^(7-r): reversed phi order
_REV = np.arange(5, -1, -1)


def _plucker(X: np.ndarray) -> np.ndarray:
    """z coordinates of mu ^ nu for X[..., 0, :] = mu, X[..., 1, :] = nu."""
    mu, nu = X[..., 0, :], X[..., 1, :]
    a, b = _PAIRS[:, 0], _PAIRS[:, 1]
    c = _SIGNS * (mu[..., a] * nu[..., b] - mu[..., b] * nu[..., a])
    return c[..., _REV]


def _orthonormalize(X: np.ndarray) -> np.ndarray:
    mu = X[..., 0, :]
    mu = mu / np.linalg.norm(mu, axis=-1, keepdims=True)
    nu = X[..., 1, :]
    nu = nu - np.sum(np.conj(mu) * nu, axis=-1, keepdims=True) * mu
    nu = nu / np.linalg.norm(nu, axis=-1, keepdims=True)
    return np.stack([mu, nu], axis=-2)


def _objective(A: np.ndarray, X: np.ndarray):
    z = _plucker(X)
    zA = z @ A
    num = np.real(np.sum(zA * np.conj(z), axis=-1))
    den = np.real(np.sum(z * np.conj(z), axis=-1))
    return num / den, z, zA, den


def _gradient(A: np.ndarray, X: np.ndarray):
    """Objective and steepest-descent directions (w.r.t. the real inner product)."""
    f, z, zA, den = _objective(A, X)
    # W_r = d f / d z_r
    W = np.conj(zA - f[..., None] * z) / den[..., None]
    Wc = W[..., _REV] * _SIGNS           # d f / d c_j
    mu, nu = X[..., 0, :], X[..., 1, :]
    gmu = np.zeros_like(mu)
    gnu = np.zeros_like(nu)
    for j, (a, b) in enumerate(_PAIRS):
        w = Wc[..., j]
        gmu[..., a] += w * nu[..., b]
        gmu[..., b] -= w * nu[..., a]
        gnu[..., b] += w * mu[..., a]
        gnu[..., a] -= w * mu[..., b]
    D = -np.conj(np.stack([gmu, gnu], axis=-2))
    return f, D


@dataclass
class MinimizeConfig:
    starts: int = 200
    seed: int = 0
    maxiter: int = 500
    tol: float = 1e-12


def _initial_planes(starts: int, seed: int) -> np.ndarray:
    seqs = np.random.SeedSequence(seed).spawn(starts)
    X = np.empty((starts, 2, 4), dtype=complex)
    for s, sq in enumerate(seqs):
        rng = np.random.default_rng(sq)
        X[s] = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    return _orthonormalize(X)


def minimize_on_pluecker(A, starts: int = 200, seed: int = 0, maxiter: int = 500,
                         tol: float = 1e-12, return_all: bool = False):
    """Minimize ``z A z^H / |z|^2`` over decomposable z = mu ^ nu.

    Each start is an independent 2-plane drawn from its own spawned seed and
    refined by gradient descent with backtracking, re-orthonormalizing
    (mu, nu) after every step.  Returns ``(min_value, PlueckerPoint)``; ties
    go to the lowest start index, so the result does not depend on how the
    starts are batched.
    """
    A = check_hermitian(ex.to_float_array(A))
    best, z, f = _minimize_cached(A.tobytes(), starts, seed, maxiter, tol)
    if return_all:
        return best, PlueckerPoint(z.copy()), f.copy()
    return best, PlueckerPoint(z.copy())


@functools.lru_cache(maxsize=64)
def _minimize_cached(key: bytes, starts: int, seed: int, maxiter: int, tol: float):
    A = np.frombuffer(key, dtype=complex).reshape(6, 6)
    X = _initial_planes(starts, seed)
    step = np.full(starts, 0.5)
    active = np.ones(starts, dtype=bool)
    trials = 0.5 ** np.arange(0, 30)
    for _ in range(maxiter):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        Xa = X[idx]
        f, D = _gradient(A, Xa)
        g2 = np.sum(np.abs(D) ** 2, axis=(-1, -2))
        done = g2 <= tol * tol
        # candidate steps t * 2^-k for every active start at once
        T = step[idx][:, None] * trials[None, :]
        Y = _orthonormalize(Xa[:, None] + T[..., None, None] * D[:, None])
        fy = _objective(A, Y)[0]
        armijo = fy <= f[:, None] - 1e-4 * 2 * T * g2[:, None]
        found = armijo.any(axis=1)
        k = np.argmax(armijo, axis=1)
        rows = np.nonzero(found & ~done)[0]
        X[idx[rows]] = Y[rows, k[rows]]
        step[idx[rows]] = np.minimum(T[rows, k[rows]] * 2.0, 1e3)
        stalled = ~found | done
        active[idx[stalled]] = False
    f = _objective(A, X)[0]
    best = int(np.argmin(f))
    z = _plucker(X[best])
    z = z / np.linalg.norm(z)
    return float(f[best]), z, f


# verdict -----------------------------------------------------------------


@dataclass
class WeakConfig:
    starts: int = 200
    seed: int = 0
    maxiter: int = 500
    tol: float = DEFAULT_TOL
    strict: bool = False


def restriction_value(theta: Form, witness: PlueckerPoint) -> float:
    """Volume coefficient of Theta restricted to the 2-plane killed by the witness's factors."""
    psi = witness.form()
    if psi.exact:
        psi = psi.to_float()
    mu1, mu2 = factorize_2form(psi, tol=1e-8)
    M = np.array([mu1, mu2])
    _, _, Vh = np.linalg.svd(M)
    W = np.conj(Vh[2:]).T            # 4 x 2, columns span ker mu1 ∩ ker mu2
    return float(np.real(volume_coefficient(pullback(theta.to_float(), W))))


def _check_c4_22(theta: Form):
    if (theta.n, theta.p, theta.q) != (4, 2, 2):
        raise BidegreeError("weak positivity tests here need a real (2,2)-form on C^4")


def detect_family(A) -> tuple[int, int, object, object] | None:
    """If A = c (I + a E_jk + conj(a) E_kj) with c > 0, return (j, k, a, c)."""
    A = np.asarray(A)
    c = A[0, 0]
    if ex.is_zero(c) or ex.real_part(c) <= 0 or not ex.is_zero(ex.imag_part(c)):
        return None
    B = A / c if A.dtype == object else A / complex(c)
    off = [(j, k) for j in range(6) for k in range(j + 1, 6) if not ex.is_zero(B[j, k])]
    if any(not (B[i, i] == 1) for i in range(6)) or len(off) > 1:
        return None
    for j in range(6):
        for k in range(6):
            if j != k and (j, k) not in off and (k, j) not in off and not ex.is_zero(B[j, k]):
                return None
    if not off:
        return 1, 6, B[0, 5], c
    j, k = off[0]
    return j + 1, k + 1, B[j, k], c


def weak_verdict(theta: Form, config: WeakConfig | None = None) -> PositivityVerdict:
    """(Strict) weak positivity of a real (2,2)-form on C^4.

    Exact Omega_a family members (up to positive scale) and the zero form
    are decided in closed form (Certified or Refuted).  Otherwise the screen
    runs first; a failure is turned into a Plücker witness.  Then the
    multistart minimizer either finds a negative value (Refuted) or reports
    the smallest value it saw (NumericallyPositive; for the strict test a
    minimum within tolerance of zero is Inconclusive).
    """
    config = config or WeakConfig()
    _check_c4_22(theta)
    try:
        A = gram_matrix(theta)
    except NotRealError:
        raise
    strict = config.strict
    Af = ex.to_float_array(A)
    norm = float(np.linalg.norm(Af, 2))
    if norm == 0.0:
        if strict:
            w = PlueckerPoint(_unit(1))
            return PositivityVerdict("weak", True, Status.REFUTED, "zero form", 0.0, witness=w)
        return PositivityVerdict("weak", strict, Status.CERTIFIED, "zero form", 0.0)
    slack = config.tol * norm

    if theta.exact:
        fam = detect_family(A)
        if fam is not None:
            j, k, a, _ = fam
            row = omega_family_verdict(j, k, a)
            holds = row.strict_weak if strict else row.weak
            prov = f"exact Omega_a family ({j},{k}), |a|^2 = {ex.abs2(a)}"
            if holds:
                return PositivityVerdict("weak", strict, Status.CERTIFIED, prov)
            w = family_weak_witness(j, k, complex(a))
            value = w.quadratic_value(Af)
            v = PositivityVerdict("weak", strict, Status.REFUTED, prov, value, witness=w)
            v.details["restriction_value"] = restriction_value(theta, w)
            return v

    report = screen(A, strict=strict, tol=config.tol)
    if not report.passed:
        cands = screen_witnesses(Af, report)
        if cands:
            vals = [c.quadratic_value(Af) for c in cands]
            best = int(np.argmin(vals))
            bad = vals[best] <= slack if strict else vals[best] < -slack
            if bad:
                v = PositivityVerdict("weak", strict, Status.REFUTED,
                                      f"screen check(s) {report.failed_numbers}",
                                      vals[best], witness=cands[best])
                v.details["screen"] = report
                v.details["restriction_value"] = restriction_value(theta, cands[best])
                return v

    m, w = minimize_on_pluecker(Af, config.starts, config.seed, config.maxiter)
    details = {"screen": report, "min_value": m}
    prov = f"multistart Plücker minimization ({config.starts} starts, seed {config.seed})"
    if m < -slack:
        v = PositivityVerdict("weak", strict, Status.REFUTED, prov, m, witness=w, details=details)
        v.details["restriction_value"] = restriction_value(theta, w)
        return v
    if strict and m <= slack:
        return PositivityVerdict("weak", strict, Status.INCONCLUSIVE, prov, m, witness=w,
                                 details=details)
    return PositivityVerdict("weak", strict, Status.NUMERICALLY_POSITIVE, prov, m, witness=w,
                             details=details)


# Omega_a family ----------------------------------------------------------


def omega_family_matrix(j: int, k: int, a):
    if not (1 <= j < k <= 6):
        raise ValueError(f"need 1 <= j < k <= 6, got ({j},{k})")
    exact = isinstance(a, (ex.GaussianRational, int, np.integer)) or type(a).__name__ == "Fraction"
    if exact:
        a = ex.gaussian(a)
        A = ex.to_exact_array(np.eye(6, dtype=int))
        A[j - 1, k - 1] = a
        A[k - 1, j - 1] = a.conjugate()
    else:
        A = np.eye(6, dtype=complex)
        A[j - 1, k - 1] = complex(a)
        A[k - 1, j - 1] = np.conj(complex(a))
    return A


def omega_family(j: int, k: int, a) -> Form:
    """``sum_l phi^l ^ conj(phi^l) + a phi^j ^ conj(phi^k) + conj(a) phi^k ^ conj(phi^j)``.

    Exact (Gaussian-rational) when ``a`` is an int, Fraction or
    GaussianRational; float otherwise.
    """
    return form_from_matrix(omega_family_matrix(j, k, a))


@dataclass(frozen=True)
class FamilyRow:
    weak: bool
    strict_weak: bool
    hermitian: bool
    strict_hermitian: bool
    strong: bool
    strict_strong: bool

    COLUMNS = ("weak", "strict_weak", "hermitian", "strict_hermitian", "strong", "strict_strong")

    def as_tuple(self) -> tuple[bool, ...]:
        return tuple(getattr(self, c) for c in self.COLUMNS)


def family_verdict_from_abs2(j: int, k: int, m2) -> FamilyRow:
    """Classification of Omega_a from ``|a|^2`` alone (exact for Fractions)."""
    if not (1 <= j < k <= 6):
        raise ValueError(f"need 1 <= j < k <= 6, got ({j},{k})")
    herm, sherm = m2 <= 1, m2 < 1
    if j + k == 7:
        weak, sweak = m2 <= 4, m2 < 4
    else:
        weak, sweak = herm, sherm
    return FamilyRow(bool(weak), bool(sweak), bool(herm), bool(sherm), bool(herm), bool(sherm))


def omega_family_verdict(j: int, k: int, a) -> FamilyRow:
    """Exact six-column classification of Omega_a (weak, Hermitian, strong; each also strict)."""
    return family_verdict_from_abs2(j, k, ex.abs2(a))


def family_weak_witness(j: int, k: int, a: complex) -> PlueckerPoint:
    """A Plücker point minimizing Q for Omega_a (float).

    Antidiagonal (j,k): ``|z_j| = |z_k| = |z_l| = |z_m| = sqrt|a|`` with
    ``a z_j conj(z_k) = -|a|^2`` and ``z_l z_m = -z_j z_k``, giving value
    ``(2 - |a|)/2`` per unit norm.  Otherwise the 2x2 block eigenvector.
    """
    r = abs(a)
    if j + k != 7:
        return PlueckerPoint(_block_vector(omega_family_matrix(j, k, a), (j, k)))
    ph = a / r if r else 1.0
    s = np.sqrt(r) if r else 1.0
    z = np.zeros(6, dtype=complex)
    z[j - 1] = s
    z[k - 1] = -s * ph
    l, m = next(pp for pp in ANTIDIAGONAL if pp != (j, k))
    # z_l z_m = -z_j z_k = s^2 ph
    z[l - 1] = s
    z[m - 1] = s * ph
    return PlueckerPoint(z / np.linalg.norm(z))
