"""Hyperplane reduction of real (p,p)-forms.

Fix a frame (v0, alpha) with ``alpha(v0) = 1`` and h = ker(alpha).  Every
(p,p)-form splits as

    Omega = Xi + alpha ^ rho(eta) + conj(alpha) ^ rho(zeta) + i alpha ^ conj(alpha) ^ rho(theta)

with ``Xi = rho(Omega|_h)``, ``eta = (i_{v0} Omega)|_h``,
``zeta = (i_{conj v0} Omega)|_h`` (equal to ``conj(eta)`` for real Omega)
and ``theta = i (i_{v0} i_{conj v0} Omega)|_h``.  Here rho extends a form
on h to V by making it vanish on v0 and conj(v0).

Positivity passes from Omega to ``Omega|_h`` and ``theta``; conversely
``rho(Xi) + i alpha ^ conj(alpha) ^ rho(Psi)`` is an interior point when Xi
and Psi are.  On a 3-dimensional h every cone is decided by the gram test.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import exact as ex
from .exterior import (ANTIHOLOMORPHIC, HOLOMORPHIC, BidegreeError, DimensionError, Form, Frame,
                       contract, is_real, multi_indices, phi_basis, pullback, restrict_to_hyperplane,
                       rho_extend, volume_coefficient, wedge)
from .quadratic import DEFAULT_EIGEN_TOL, NotRealError, eigen, gram_matrix, is_psd
from .verdicts import Status

CLASSES = ("weak", "hermitian", "strong")

# phi-indices (1-based) of the gram blocks seen by each coordinate frame
XI_VIEWS = {1: (4, 5, 6), 2: (2, 3, 6), 3: (1, 3, 5), 4: (1, 2, 4)}
THETA_VIEWS = {1: (1, 2, 3), 2: (1, 4, 5), 3: (2, 4, 6), 4: (3, 5, 6)}


class PreconditionError(ValueError):
    """An input does not meet the requirements of a construction."""


def _frame(v0, alpha=None) -> Frame:
    if isinstance(v0, Frame):
        if alpha is not None:
            raise TypeError("pass either a Frame or (v0, alpha)")
        return v0
    if alpha is None:
        raise TypeError("alpha is required when v0 is a vector")
    return Frame(v0, alpha)


def _check_class(cls: str):
    if cls not in CLASSES:
        raise ValueError(f"class must be one of {CLASSES}, got {cls!r}")


def _i(exact: bool):
    return ex.I if exact else 1j


def _covector_form(alpha: np.ndarray, conj: bool = False) -> Form:
    f = Form.covector(alpha)
    return f.conjugate() if conj else f


def wedge_alpha_alphabar(frame: Frame, a: Form) -> Form:
    """``i alpha ^ conj(alpha) ^ a``."""
    al = _covector_form(frame.alpha)
    return wedge(al, al.conjugate(), a) * _i(a.exact and frame.exact)


@dataclass(frozen=True)
class HyperplaneSplit:
    """Components of a form relative to a frame; ``*_h`` live on h = C^(n-1)."""

    frame: Frame
    xi_h: Form
    eta_h: Form
    zeta_h: Form
    theta_h: Form

    @property
    def xi(self) -> Form:
        return rho_extend(self.xi_h, self.frame)

    @property
    def theta(self) -> Form:
        return rho_extend(self.theta_h, self.frame)

    @property
    def eta(self) -> Form:
        return rho_extend(self.eta_h, self.frame)

    @property
    def eta_is_zero(self) -> bool:
        return self.eta_h.is_zero() and self.zeta_h.is_zero()

    def pieces(self) -> dict[str, Form]:
        """The four summands of the decomposition, as forms on V."""
        al = _covector_form(self.frame.alpha)
        return {
            "xi": self.xi,
            "alpha_eta": wedge(al, rho_extend(self.eta_h, self.frame)),
            "alphabar_zeta": wedge(al.conjugate(), rho_extend(self.zeta_h, self.frame)),
            "alpha_alphabar_theta": wedge_alpha_alphabar(self.frame, self.theta),
        }

    def reconstruct(self) -> Form:
        p = self.pieces()
        return p["xi"] + p["alpha_eta"] + p["alphabar_zeta"] + p["alpha_alphabar_theta"]


def split(omega: Form, v0, alpha=None) -> HyperplaneSplit:
    """Split ``omega`` along the frame ``(v0, alpha)`` (or a :class:`Frame`).

    Raises ValueError when ``alpha(v0) != 1``; the frame is never rescaled.
    """
    frame = _frame(v0, alpha)
    if omega.n != frame.n:
        raise DimensionError("form and frame live on different spaces")
    if omega.p != omega.q or omega.p < 1:
        raise BidegreeError(f"split needs a (p,p)-form with p >= 1, got ({omega.p},{omega.q})")
    v = frame.v0
    xi_h = restrict_to_hyperplane(omega, frame)
    eta_h = restrict_to_hyperplane(contract(v, omega, HOLOMORPHIC), frame)
    zeta_h = restrict_to_hyperplane(contract(v, omega, ANTIHOLOMORPHIC), frame)
    tt = contract(v, contract(v, omega, ANTIHOLOMORPHIC), HOLOMORPHIC)
    theta_h = restrict_to_hyperplane(tt, frame) * _i(tt.exact)
    return HyperplaneSplit(frame, xi_h, eta_h, zeta_h, theta_h)


def coordinate_frames(n: int = 4, exact: bool = False) -> list[Frame]:
    return [Frame.coordinate(j, n, exact=exact) for j in range(1, n + 1)]


# gram views --------------------------------------------------------------


def submatrix_views(A) -> dict[str, np.ndarray]:
    """The eight 3x3 principal blocks seen by coordinate-frame splits.

    Keys ``xi1..xi4`` (indices 456, 236, 135, 124) and ``theta1..theta4``
    (123, 145, 246, 356).
    """
    A = np.asarray(A)
    if A.shape != (6, 6):
        raise ValueError("expected a 6 x 6 matrix")
    out = {}
    for name, table in (("xi", XI_VIEWS), ("theta", THETA_VIEWS)):
        for j, idx in table.items():
            s = [i - 1 for i in idx]
            out[f"{name}{j}"] = A[np.ix_(s, s)]
    return out


def view_basis(j: int, kind: str, exact: bool = False) -> list[Form]:
    """Bases on h for the coordinate frame j in which the views are the gram matrices.

    ``xi``: the restrictions of the phi^l avoiding index j.  ``theta``: the
    restrictions of ``i_{e_j} phi^l`` for the phi^l containing j.
    """
    frame = Frame.coordinate(j, 4, exact=exact)
    phi = phi_basis(exact=exact)
    e = np.zeros(4, dtype=int)
    e[j - 1] = 1
    e = ex.to_exact_array(e) if exact else e.astype(complex)
    if kind == "xi":
        return [restrict_to_hyperplane(phi[l - 1], frame) for l in XI_VIEWS[j]]
    if kind == "theta":
        return [restrict_to_hyperplane(contract(e, phi[l - 1]), frame) for l in THETA_VIEWS[j]]
    raise ValueError("kind must be 'xi' or 'theta'")


# class tests on h --------------------------------------------------------


def _gram_h(a: Form) -> np.ndarray:
    if a.p == 0:
        return np.array([[a.coeffs[0, 0]]], dtype=a.coeffs.dtype)
    return gram_matrix(a)


def class_test_h(a: Form, strict: bool = False, tol: float = DEFAULT_EIGEN_TOL) -> tuple[bool, np.ndarray]:
    """Gram PSD (PD if strict) test, deciding every cone when h has dimension <= 3.

    In higher dimension this is the Hermitian test only.  Returns
    ``(passed, eigenvalues)``.
    """
    A = _gram_h(a)
    return is_psd(A, strict=strict, tol=tol), eigen(A).eigenvalues


@dataclass
class TransferReport:
    cls: str
    strict: bool
    precondition: str
    vacuous: bool
    xi_ok: bool
    theta_ok: bool
    xi_eigenvalues: list
    theta_eigenvalues: list
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.vacuous or (self.xi_ok and self.theta_ok)

    @property
    def findings(self) -> list[str]:
        """Violations of the transfer property for a form meeting the precondition."""
        if self.vacuous:
            return []
        out = []
        if not self.xi_ok:
            out.append("restriction to h fails the class test")
        if not self.theta_ok:
            out.append("theta fails the class test")
        return out


def _precondition(omega: Form, cls: str, strict: bool) -> str:
    """'verified', 'failed' or 'unknown' for membership of omega in the class."""
    from .quadratic import hermitian_positivity
    if cls == "hermitian":
        v = hermitian_positivity(omega, strict=strict)
    elif (omega.n, omega.p) == (4, 2):
        if cls == "weak":
            from .weak import WeakConfig, weak_verdict
            v = weak_verdict(omega, WeakConfig(strict=strict))
        else:
            from .strong import strong_verdict
            v = strong_verdict(omega, strict=strict)[0]
    elif omega.p in (1, omega.n - 1):
        # all (1,0)- and (n-1,0)-forms are decomposable: the cones coincide
        v = hermitian_positivity(omega, strict=strict)
    else:
        return "unknown"
    if v.status in (Status.CERTIFIED, Status.NUMERICALLY_POSITIVE):
        return "verified"
    if v.status == Status.REFUTED:
        return "failed"
    return "unknown"


def check_positivity_transfer(omega: Form, v0, alpha=None, cls: str = "weak",
                              strict: bool = False, assume: bool = False,
                              tol: float = DEFAULT_EIGEN_TOL) -> TransferReport:
    """Check that ``omega|_h`` and theta pass the class test on h.

    The precondition (omega in the class) is verified with the library's
    own tests unless ``assume`` is set.  When it fails or cannot be
    established the report is vacuous: the tests still run, but a failure is
    not a finding.
    """
    _check_class(cls)
    if not is_real(omega):
        raise NotRealError("positivity transfer needs a real form")
    frame = _frame(v0, alpha)
    pre = "assumed" if assume else _precondition(omega, cls, strict)
    s = split(omega, frame)
    xi_ok, xi_eigs = class_test_h(s.xi_h, strict, tol)
    th_ok, th_eigs = class_test_h(s.theta_h, strict, tol)
    notes = []
    if omega.n - 1 > 3 and cls != "hermitian":
        notes.append("h has dimension > 3: only the Hermitian test is applied on h")
    return TransferReport(cls, strict, pre, pre not in ("verified", "assumed"), bool(xi_ok),
                          bool(th_ok), list(map(float, xi_eigs)), list(map(float, th_eigs)), notes)


# interior construction ---------------------------------------------------


def build_interior(xi_h: Form, psi_h: Form, v0, alpha=None, cls: str = "hermitian",
                   tol: float = DEFAULT_EIGEN_TOL) -> Form:
    """``rho(Xi) + i alpha ^ conj(alpha) ^ rho(Psi)`` for strictly positive Xi, Psi on h.

    Xi is a (p,p)-form and Psi a (p-1,p-1)-form on h, both required to pass
    the strict gram test (which decides every class on a 3-dimensional h).
    Raises :class:`PreconditionError` otherwise.
    """
    _check_class(cls)
    frame = _frame(v0, alpha)
    if xi_h.n != frame.n - 1 or psi_h.n != frame.n - 1:
        raise DimensionError("Xi and Psi must be forms on the hyperplane")
    if xi_h.p != xi_h.q or psi_h.p != psi_h.q or psi_h.p != xi_h.p - 1:
        raise BidegreeError("need Xi of bidegree (p,p) and Psi of bidegree (p-1,p-1)")
    for name, f in (("Xi", xi_h), ("Psi", psi_h)):
        if not is_real(f):
            raise PreconditionError(f"{name} is not real")
        ok, eigs = class_test_h(f, strict=True, tol=tol)
        if not ok:
            raise PreconditionError(
                f"{name} is not strictly positive on h (smallest gram eigenvalue {min(eigs):.3g})")
    if frame.n - 1 > 3 and cls != "hermitian":
        raise PreconditionError("strictness on h of dimension > 3 is only decided for the Hermitian class")
    return rho_extend(xi_h, frame) + wedge_alpha_alphabar(frame, rho_extend(psi_h, frame))


def assembled_basis(frame: Frame, p: int) -> list[Form]:
    """``{rho(b)} + {alpha ^ rho(c)}`` for standard bases b of Lambda^{p,0}h, c of Lambda^{p-1,0}h."""
    m = frame.n - 1
    exact = frame.exact
    top = [Form.from_terms(m, p, 0, {(I, ()): 1}, exact=exact) for I in multi_indices(m, p)]
    low = [Form.from_terms(m, p - 1, 0, {(I, ()): 1}, exact=exact) for I in multi_indices(m, p - 1)]
    al = _covector_form(frame.alpha)
    out = [rho_extend(b, frame) for b in top]
    out += [wedge(al, rho_extend(c, frame)) for c in low]
    return out


# boundary ----------------------------------------------------------------


@dataclass
class ImageCheck:
    name: str
    bidegree: tuple
    rank: int
    size: int
    nonstrict_ok: bool
    strict_fails: bool
    evidence: str

    @property
    def passed(self) -> bool:
        return self.nonstrict_ok and self.strict_fails


@dataclass
class BoundaryReport:
    cls: str
    images: list

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.images)


def _plane_volume(form: Form, columns: np.ndarray):
    return volume_coefficient(pullback(form, columns))


def _image_check(name: str, image: Form, frame: Frame, cls: str, through_v0: bool,
                 tol: float) -> ImageCheck:
    A = gram_matrix(image)
    dec = eigen(A, tol)
    size = A.shape[0]
    psd = is_psd(A, strict=False, tol=tol)
    n, p = image.n, image.p
    if cls == "weak":
        # a p-plane on which the image vanishes identically
        H = frame.basis
        cols = [H[:, i] for i in range(p - 1)] + [frame.v0] if through_v0 else \
            [H[:, i] for i in range(p)]
        W = np.stack(cols, axis=1)
        vol = _plane_volume(image, W)
        zero = ex.is_zero(vol) if image.exact else abs(complex(vol)) <= tol * max(1.0, image.norm())
        if (n, p) == (4, 2):
            from .weak import WeakConfig, weak_verdict
            ok = weak_verdict(image, WeakConfig()).status != Status.REFUTED
        else:
            ok = psd
        where = "a p-plane through v0" if through_v0 else "a p-plane inside h"
        return ImageCheck(name, (p, p), dec.rank, size, bool(ok), bool(zero),
                          f"restriction to {where} vanishes: {zero}")
    if cls == "strong":
        evidence = "gram eigendecomposition on h: every (p,0)-form on C^3 is decomposable"
    else:
        evidence = "gram PSD"
    return ImageCheck(name, (p, p), dec.rank, size, bool(psd), dec.rank < size,
                      f"{evidence}; gram rank {dec.rank} < {size}")


def boundary_check(a: Form, v0, alpha=None, cls: str = "hermitian",
                   tol: float = DEFAULT_EIGEN_TOL) -> BoundaryReport:
    """Check that ``rho(a)`` and ``i alpha ^ conj(alpha) ^ rho(a)`` are boundary points.

    Each image must pass the non-strict class test on V and fail the strict
    one: by rank deficiency of the gram (Hermitian and strong classes) or by
    a p-plane on which the image vanishes (weak class).
    """
    _check_class(cls)
    frame = _frame(v0, alpha)
    if a.n != frame.n - 1 or a.p != a.q:
        raise BidegreeError("a must be a (q,q)-form on the hyperplane")
    ok, eigs = class_test_h(a, strict=False, tol=tol)
    if not ok:
        raise PreconditionError(f"a is not in the cone on h (smallest gram eigenvalue {min(eigs):.3g})")
    images = []
    ra = rho_extend(a, frame)
    if 1 <= a.p:
        images.append(_image_check("rho(a)", ra, frame, cls, True, tol))
    if a.p + 1 <= frame.n - 1:
        images.append(_image_check("i alpha ^ conj(alpha) ^ rho(a)",
                                   wedge_alpha_alphabar(frame, ra), frame, cls, False, tol))
    return BoundaryReport(cls, images)
