from fractions import Fraction

import numpy as np
import pytest

import oracle as o
from conftest import random_hermitian
from posforms import exact as ex
from posforms.decomposability import sample_decomposable, sample_decomposable_gram
from posforms.exterior import BidegreeError, Form
from posforms.quadratic import NotRealError, form_from_matrix, gram_matrix, hermitian_positivity
from posforms.strong import (DECOMPOSITION, DUALITY_INEQUALITY, REFUTATION_WITNESS, NNLSConfig,
                             RefuteConfig, StrongCertificate, certify_strong_by_duality,
                             hermitian_duality_check, nnls_decompose, pair, pairing_functional,
                             refute_strong, strong_verdict)
from posforms.verdicts import Status
from posforms.weak import WeakConfig, omega_family, weak_verdict

FAST = WeakConfig(starts=60, maxiter=300)


class TestPairing:
    def test_symmetric_and_bilinear(self):
        rng = np.random.default_rng(1)
        A, B, C = (random_hermitian(rng) for _ in range(3))
        fa, fb, fc = map(form_from_matrix, (A, B, C))
        assert np.isclose(pair(fa, fb), pair(fb, fa))
        assert np.isclose(pair(fa, fb * 2.5 + fc), 2.5 * pair(fa, fb) + pair(fa, fc))

    def test_matches_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            A, B = random_hermitian(rng), random_hermitian(rng)
            direct = o.volume_coefficient(o.wedge(o.from_matrix(A), o.from_matrix(B)), 4)
            assert abs(direct.imag) < 1e-12
            assert np.isclose(pair(form_from_matrix(A), form_from_matrix(B)), direct.real)

    def test_family_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = complex(*rng.standard_normal(2)) * 2
            A = random_hermitian(rng)
            expected = np.trace(A).real + 2 * (a * np.conj(A[0, 5])).real
            assert abs(pair(omega_family(1, 6, a), form_from_matrix(A)) - expected) < 1e-12

    def test_exact(self):
        v = pair(omega_family(1, 6, 2), omega_family(1, 6, -2))
        assert v == -2 and isinstance(v, Fraction)
        assert pair(omega_family(1, 6, 0), omega_family(1, 6, 0)) == 6

    def test_errors(self):
        with pytest.raises(BidegreeError):
            pair(Form.zero(4, 2, 2), Form.zero(4, 1, 1))
        with pytest.raises(BidegreeError):
            pair(Form.zero(4, 2, 2), Form.zero(3, 1, 1))
        bad = Form.from_terms(4, 2, 2, {((1, 2), (3, 4)): 1})
        with pytest.raises(NotRealError):
            pair(bad, Form.zero(4, 2, 2))

    def test_functional(self):
        rng = np.random.default_rng(4)
        om = form_from_matrix(random_hermitian(rng))
        F = pairing_functional(om)
        assert np.allclose(F.F, F.F.conj().T)
        B = random_hermitian(rng)
        assert np.isclose(F(form_from_matrix(B)), pair(om, form_from_matrix(B)))
        assert np.isclose(F.evaluate_batch(np.stack([B, 2 * B]))[1], 2 * F.evaluate(B))
        other = pairing_functional(form_from_matrix(B))
        assert np.allclose((F + other).F, pairing_functional(om + form_from_matrix(B)).F)
        # F is the antidiagonal reflection of the matrix of omega
        J = np.eye(6)[::-1]
        assert np.allclose(F.F, J @ gram_matrix(om) @ J)

    def test_functional_exact(self):
        F = pairing_functional(omega_family(1, 6, Fraction(1, 3)))
        assert F.trace_weight == 1
        assert F.off_diagonal() == {(1, 6): ex.gaussian(Fraction(1, 3))}


MODULI = [k / 4 for k in range(11)]
PHASES = [np.exp(2j * np.pi * t / 8) for t in range(8)]


class TestCertifyRefute:
    @pytest.mark.parametrize("m", MODULI)
    def test_exclusive_and_matches_table(self, m):
        cfg = RefuteConfig(samples=200)
        for ph in PHASES:
            om = omega_family(1, 6, m * ph)
            cert = certify_strong_by_duality(om)
            ref = refute_strong(om, cfg)
            assert (cert is None) != (ref is None)
            assert (cert is not None) == (m <= 1)
            if cert is not None:
                assert cert.strict == (m < 1)

    def test_exact_thresholds(self):
        assert certify_strong_by_duality(omega_family(1, 6, Fraction(1, 2))).strict
        c = certify_strong_by_duality(omega_family(1, 6, 1))
        assert c.kind == DUALITY_INEQUALITY and not c.strict and c.payload["exact_comparison"]
        assert certify_strong_by_duality(omega_family(1, 6, 1 + Fraction(1, 10 ** 12))) is None

    @pytest.mark.parametrize("a", [1.2, 1.8 * 1j, 2.5 * np.exp(0.4j), 2.0])
    def test_witness_is_weakly_positive(self, a):
        om = omega_family(1, 6, a)
        ref = refute_strong(om)
        assert ref.kind == REFUTATION_WITNESS and not ref.certifies
        theta = ref.payload["witness"]
        assert np.isclose(np.trace(ref.payload["witness_matrix"]).real, 2)
        assert pair(om, theta) < -1e-9
        assert np.isclose(pair(om, theta), ref.payload["pair"])
        assert not weak_verdict(theta, FAST).refuted

    def test_family_witness_value(self):
        for m in (1.5, 2.0, 3.0):
            a = m * np.exp(0.9j)
            theta = omega_family(1, 6, -2 * a / abs(a))
            assert np.isclose(pair(omega_family(1, 6, a), theta), 6 - 4 * m)

    def test_other_corners(self):
        # off-antidiagonal corners with |a| slightly above 1
        for j, k in [(1, 2), (2, 4), (3, 6)]:
            om = omega_family(j, k, 1.1)
            assert certify_strong_by_duality(om) is None
            assert refute_strong(om, RefuteConfig(samples=100)) is not None
            assert certify_strong_by_duality(omega_family(j, k, 0.9)) is not None

    def test_certificate_json(self):
        c = certify_strong_by_duality(omega_family(1, 6, Fraction(1, 2)))
        js = c.to_json()
        assert js["kind"] == DUALITY_INEQUALITY and js["strict"] is True


class TestDecomposition:
    def test_half_family(self):
        cert = nnls_decompose(omega_family(1, 6, 0.5))
        assert cert.kind == DECOMPOSITION and cert.certifies
        p = cert.payload
        assert p["residual"] <= 1e-6 and np.all(p["weights"] > 0)
        recon = sum((g * w for g, w in zip(p["generators"], p["weights"])), Form.zero(4, 2, 2))
        assert np.allclose(gram_matrix(recon), gram_matrix(p["reconstruction"]), atol=1e-12)

    def test_deterministic(self):
        a = nnls_decompose(omega_family(1, 6, 0.5), NNLSConfig(seed=3))
        b = nnls_decompose(omega_family(1, 6, 0.5), NNLSConfig(seed=3))
        assert np.array_equal(a.payload["weights"], b.payload["weights"])

    def test_basis_shortcut(self):
        cert = nnls_decompose(omega_family(1, 6, 0), NNLSConfig(include_basis=True))
        assert np.allclose(cert.payload["weights"], 1) and len(cert.payload["weights"]) == 6

    def test_not_strong_gives_none(self):
        assert nnls_decompose(omega_family(1, 6, 1.5), NNLSConfig(samples=300)) is None

    def test_soundness_chain(self):
        rng = np.random.default_rng(8)
        A = sample_decomposable_gram(rng, 12).sum(axis=0) / 4
        cert = nnls_decompose(form_from_matrix(A), NNLSConfig(seed=5))
        recon = cert.payload["reconstruction"]
        assert weak_verdict(recon, FAST).holds is not False
        assert hermitian_positivity(recon).holds
        trials = [form_from_matrix(G) for G in random_psd(rng, 450)]
        trials += [omega_family(1, 6, 2 * np.exp(1j * t)) for t in np.linspace(0, 6, 50)]
        F = pairing_functional(recon)
        assert min(F(t) for t in trials) >= -1e-9


def random_psd(rng, count):
    X = rng.standard_normal((count, 6, 3)) + 1j * rng.standard_normal((count, 6, 3))
    return X @ np.conj(np.transpose(X, (0, 2, 1)))


class TestDualityHarness:
    def test_positive(self):
        rep = hermitian_duality_check(omega_family(1, 6, 0.8))
        assert rep.hermitian_positive and not rep.violations and rep.consistent
        assert rep.trials == 1006

    def test_negative(self):
        rep = hermitian_duality_check(omega_family(1, 6, 1.2))
        assert not rep.hermitian_positive and rep.violations and rep.consistent
        assert rep.min_pairing < 0

    def test_random(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            rep = hermitian_duality_check(form_from_matrix(np.eye(6) + random_hermitian(rng) / 2),
                                          trials=200)
            assert rep.consistent


class TestVerdict:
    def test_branches(self):
        v, c = strong_verdict(omega_family(1, 6, Fraction(1, 2)), strict=True)
        assert v.status is Status.CERTIFIED and c.strict
        v, c = strong_verdict(omega_family(1, 6, 1), strict=True, refute=RefuteConfig(samples=100))
        assert v.status is Status.INCONCLUSIVE and c.kind == DUALITY_INEQUALITY
        v, c = strong_verdict(omega_family(1, 6, 1.5), refute=RefuteConfig(samples=100))
        assert v.status is Status.REFUTED and v.value < 0 and c.kind == REFUTATION_WITNESS

    def test_numerically_positive(self):
        rng = np.random.default_rng(10)
        om = omega_family(1, 6, 0) + sample_decomposable(rng, 2, 4) * 5
        v, c = strong_verdict(om, refute=RefuteConfig(samples=200), decompose=NNLSConfig())
        assert v.status in (Status.CERTIFIED, Status.NUMERICALLY_POSITIVE)
        A = sample_decomposable_gram(rng, 8).sum(axis=0)
        v, c = strong_verdict(form_from_matrix(A), refute=RefuteConfig(samples=200))
        assert v.status is Status.NUMERICALLY_POSITIVE and c.kind == DECOMPOSITION
        v_strict, _ = strong_verdict(form_from_matrix(A), strict=True, refute=RefuteConfig(samples=200))
        assert v_strict.status is Status.INCONCLUSIVE

    def test_bidegree(self):
        with pytest.raises(BidegreeError):
            strong_verdict(Form.zero(3, 1, 1))
