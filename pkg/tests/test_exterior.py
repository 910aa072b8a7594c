import numpy as np
import pytest

import oracle as o
from conftest import random_form, random_real_form
from posforms import exact as ex
from posforms.exterior import (ANTIHOLOMORPHIC, BidegreeError, DimensionError, Form, Frame,
                               conjugate, contract, is_real, phi_basis, pullback,
                               restrict_to_hyperplane, rho_extend, volume_coefficient,
                               volume_form, wedge)
from posforms.reduction import wedge_alpha_alphabar
from posforms.weak import omega_family


def om(*idx, n=4, exact=True):
    return Form.from_terms(n, len(idx), 0, {(idx, ()): 1}, exact=exact)


def e(j, n=4):
    v = np.zeros(n, dtype=complex)
    v[j - 1] = 1
    return v


class TestWedge:
    def test_disjoint_blocks(self):
        assert wedge(om(1, 2), om(3, 4)) == om(1, 2, 3, 4)

    def test_repeated_index_vanishes(self):
        assert wedge(om(1, 2), om(1, 3)).is_zero()

    def test_phi_pairing_table(self):
        phi = phi_basis(exact=True)
        for j in range(6):
            for k in range(6):
                prod = wedge(phi[j], phi[k])
                if j + k == 5:
                    top = wedge(prod, prod.conjugate())
                    assert top == volume_form(4, exact=True)
                else:
                    assert prod.is_zero()

    def test_matches_oracle(self, rng):
        for _ in range(20):
            p1, q1, p2, q2 = (int(x) for x in rng.integers(0, 3, 4))
            a = random_form(rng, 4, p1, q1)
            b = random_form(rng, 4, p2, q2)
            assert o.same(o.from_form(wedge(a, b)), o.wedge(o.from_form(a), o.from_form(b)), 1e-11)

    def test_graded_commutative(self, rng):
        for _ in range(20):
            p1, q1, p2, q2 = (int(x) for x in rng.integers(0, 3, 4))
            a = random_form(rng, 4, p1, q1)
            b = random_form(rng, 4, p2, q2)
            sign = (-1) ** ((p1 + q1) * (p2 + q2))
            assert wedge(a, b).allclose(wedge(b, a) * sign, 1e-14)

    def test_associative_and_bilinear_exact(self, rng):
        a, b, c = (random_form(rng, 4, 1, 1, exact=True) for _ in range(3))
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
        d = random_form(rng, 4, 1, 1, exact=True)
        assert wedge(a + d, b) == wedge(a, b) + wedge(d, b)
        assert wedge(a * ex.I, b) == wedge(a, b) * ex.I

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            wedge(om(1, n=3), om(1, n=4))


class TestConjugate:
    def test_examples(self):
        assert conjugate(om(1, 2)) == Form.from_terms(4, 0, 2, {((), (1, 2)): 1}, exact=True)
        w11 = Form.from_terms(4, 1, 1, {((1,), (1,)): ex.I}, exact=True)
        assert conjugate(w11) == w11
        phi = phi_basis(exact=True)
        assert conjugate(wedge(phi[0], phi[5].conjugate())) == wedge(phi[5], phi[0].conjugate())

    def test_involution_and_oracle(self, rng):
        for p, q in [(1, 2), (2, 2), (3, 1), (0, 2)]:
            a = random_form(rng, 4, p, q, exact=True)
            assert conjugate(conjugate(a)) == a
            assert o.same(o.from_form(conjugate(a)), o.conj(o.from_form(a)))

    def test_multiplicative(self, rng):
        a = random_form(rng, 4, 1, 2)
        b = random_form(rng, 4, 2, 1)
        assert conjugate(wedge(a, b)).allclose(wedge(conjugate(a), conjugate(b)))


class TestReality:
    def test_examples(self):
        assert is_real(omega_family(1, 6, 0.7))
        phi = phi_basis()
        assert not is_real(wedge(phi[0], phi[5].conjugate()))
        al = Form.covector([1, 2j, 0, -1])
        assert is_real(wedge(al, al.conjugate()) * 1j)

    def test_bidegree_error(self):
        with pytest.raises(BidegreeError):
            is_real(om(1, 2))

    def test_tolerance_is_relative(self):
        f = omega_family(1, 6, 0.5) * 1e6
        g = f + Form.from_terms(4, 2, 2, {((1, 2), (3, 4)): 1e-8})
        assert is_real(g)
        assert not is_real(g, tol=1e-16)


class TestContract:
    def test_examples(self):
        assert contract(e(1), om(1, 2, exact=False)).allclose(om(2, exact=False))
        assert contract(e(3), om(1, 2, exact=False)).is_zero()

    def test_double_contraction_example(self):
        i = 1j
        a = Form.from_terms(4, 1, 1, {((1,), (1,)): i})
        b = Form.from_terms(4, 1, 1, {((2,), (2,)): i})
        got = contract(e(1), contract(e(1), wedge(a, b), ANTIHOLOMORPHIC))
        # the graded interior product gives omega^2 ^ conj(omega^2) with coefficient 1
        oracle = o.contract([1, 0, 0, 0], o.contract([1, 0, 0, 0], o.from_form(wedge(a, b)), True))
        assert o.same(o.from_form(got), oracle)
        assert got.allclose(Form.from_terms(4, 1, 1, {((2,), (2,)): 1}))

    def test_matches_oracle(self, rng):
        for slot, anti in [("holomorphic", False), (ANTIHOLOMORPHIC, True)]:
            for _ in range(10):
                a = random_form(rng, 4, 2, 2)
                v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
                assert o.same(o.from_form(contract(v, a, slot)), o.contract(v, o.from_form(a), anti),
                              1e-11)

    def test_degree_underflow(self):
        with pytest.raises(BidegreeError):
            contract(e(1), conjugate(om(1, 2, exact=False)))
        with pytest.raises(BidegreeError):
            contract(e(1), om(1, 2, exact=False), ANTIHOLOMORPHIC)

    def test_linear(self, rng):
        a = random_form(rng, 4, 2, 1)
        v, w = rng.standard_normal(4), rng.standard_normal(4) * 1j
        assert contract(v + w, a).allclose(contract(v, a) + contract(w, a))


class TestHyperplane:
    def test_restriction_examples(self):
        f = Frame.coordinate(1, 4, exact=True)
        assert restrict_to_hyperplane(om(1), f).is_zero()
        r = restrict_to_hyperplane(om(2, 3), f)
        assert r == Form.from_terms(3, 2, 0, {((1, 2), ()): 1}, exact=True)

    def test_restriction_of_family_member(self):
        f = Frame.coordinate(1, 4, exact=True)
        phi = phi_basis(exact=True)
        got = restrict_to_hyperplane(omega_family(1, 6, 3), f)
        want = Form.zero(4, 2, 2, exact=True)
        for l in (3, 4, 5):
            want = want + wedge(phi[l], phi[l].conjugate())
        assert got == restrict_to_hyperplane(want, f)

    def test_rho_left_inverse_and_annihilation(self, rng):
        for exact in (True, False):
            for _ in range(25):
                n = int(rng.integers(3, 6))
                frame = Frame.coordinate(int(rng.integers(1, n + 1)), n, exact=True) if exact \
                    else Frame.random(rng, n)
                p, q = int(rng.integers(0, 3)), int(rng.integers(0, 3))
                a = random_form(rng, n - 1, p, q, exact=exact)
                ext = rho_extend(a, frame)
                back = restrict_to_hyperplane(ext, frame)
                assert back == a if exact else back.allclose(a, 1e-13)
                if p:
                    assert contract(frame.v0, ext).norm() <= 1e-13
                if q:
                    assert contract(frame.v0, ext, ANTIHOLOMORPHIC).norm() <= 1e-13

    def test_rho_extend_zero(self):
        f = Frame.coordinate(2, 4)
        assert rho_extend(Form.zero(3, 1, 1), f).is_zero()

    def test_volume_from_hyperplane_volume(self, rng):
        # i alpha ^ conj(alpha) ^ rho(Vol_h) = Vol_V for coordinate frames; in general the
        # induced coframe on h scales it by |det[basis | v0]|^-2
        for j in range(1, 5):
            f = Frame.coordinate(j, 4, exact=True)
            assert wedge_alpha_alphabar(f, rho_extend(volume_form(3, True), f)) == volume_form(4, True)
        f = Frame.random(rng, 4)
        c = volume_coefficient(wedge_alpha_alphabar(f, rho_extend(volume_form(3), f)))
        M = np.column_stack([f.basis, f.v0])
        assert abs(c - abs(np.linalg.det(M)) ** -2) < 1e-12

    def test_frame_validation(self):
        with pytest.raises(ValueError, match="alpha\\(v0\\) = 0"):
            Frame(e(1), e(2))
        with pytest.raises(ValueError, match="normalize"):
            Frame(2 * e(1), e(1))
        with pytest.raises(DimensionError):
            restrict_to_hyperplane(om(1, n=3, exact=False), Frame.coordinate(1, 4))

    def test_pullback_functorial(self, rng):
        a = random_form(rng, 4, 1, 1)
        L1 = rng.standard_normal((4, 3))
        L2 = rng.standard_normal((3, 2))
        assert pullback(pullback(a, L1), L2).allclose(pullback(a, L1 @ L2))


class TestVolume:
    def test_examples(self):
        assert volume_coefficient(volume_form(4, True)) == 1
        phi = phi_basis(exact=True)
        assert volume_coefficient(wedge(phi[0], phi[5], phi[0].conjugate(), phi[5].conjugate())) == 1

    def test_wrong_bidegree(self):
        with pytest.raises(BidegreeError):
            volume_coefficient(omega_family(1, 6, 0))

    def test_decomposable_squares_are_nonnegative(self, rng):
        for _ in range(50):
            mu = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
            psi = wedge(Form.covector(mu[0]), Form.covector(mu[1]))
            nu = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
            chi = wedge(Form.covector(nu[0]), Form.covector(nu[1]))
            top = wedge(psi, psi.conjugate(), chi, chi.conjugate())
            c = volume_coefficient(top)
            assert abs(c.imag) < 1e-10 and c.real >= -1e-10

    def test_phi_basis_signs(self):
        phi = phi_basis(exact=True)
        assert phi[4].coeff((2, 4)) == -1
        with pytest.raises(DimensionError):
            phi_basis(3)


def test_random_real_forms_are_real(rng):
    for n, p in [(3, 1), (4, 2), (5, 2), (6, 3)]:
        assert is_real(random_real_form(rng, n, p))


def test_dimension_cap():
    with pytest.raises(DimensionError):
        Form.zero(9, 1, 1)
