import numpy as np
import pytest

from bivector_spectra import oracle
from bivector_spectra.algebra import Multivector, Signature, reverse
from bivector_spectra.errors import GradeError
from bivector_spectra.sampling import random_bivector
from bivector_spectra.spectral import (char_poly, elementary_symmetric, m_operator, outer_exp,
                                       outer_norm_sq, spectrum, w_ladder)

from conftest import assert_mv_close, mv

ALL_PAIRS = "e12+e13+e14+e23+e24+e34"


def pairs_close(got, expect, tol=1e-10):
    assert len(got) == len(expect), got
    for (mu, m), (mu2, m2) in zip(got, expect):
        assert m == m2 and abs(mu - mu2) <= tol, (got, expect)


class TestLadder:
    def test_worked_example(self):
        L = w_ladder(mv("e12 + 2e34"))
        assert L.k == 2 and L.effective_dimension == 4
        assert_mv_close(L.W[2], mv("2e1234"))
        assert L.Wk_squared == pytest.approx(4.0)

    def test_simple_and_zero(self):
        assert w_ladder(mv("3e13")).k == 1
        assert w_ladder(mv("0")).k == 0

    def test_rejects_non_bivector(self):
        with pytest.raises(GradeError):
            w_ladder(mv("e1 + e12"))

    def test_outer_exp(self):
        assert_mv_close(outer_exp(mv("e12 + 2e34")), mv("1 + e12 + 2e34 + 2e1234"))

    def test_outer_norm_is_q_at_one(self, rng):
        # |Lambda^B|^2 = M_{-1} ~M_{-1} = Q_k(1) = prod(1 - mu_j^2)
        for sig in (Signature(4), Signature(3, 2), Signature(6)):
            B = random_bivector(sig, rng)
            cp = char_poly(B)
            assert outer_norm_sq(B) == pytest.approx(np.polyval(cp.q, 1.0), rel=1e-10, abs=1e-10)


class TestCharPoly:
    def test_worked_example(self):
        cp = char_poly(mv("e12 + 2e34"))
        np.testing.assert_allclose(cp.c, [1, -5, 4])
        np.testing.assert_allclose(cp.q, [1, 5, 4])
        np.testing.assert_allclose(cp.p, [1, 0, 5, 0, 4])

    def test_q_is_monic_for_odd_k(self):
        cp = char_poly(mv("e12 + 2e34 + 3e56", "6,0,0"))
        # (lam + 1)(lam + 4)(lam + 9)
        np.testing.assert_allclose(cp.q, [1, 14, 49, 36])

    def test_square_root_relation(self, rng):
        B = random_bivector(Signature(3, 2), rng)
        L = w_ladder(B)
        cp = char_poly(B, ladder=L)
        for mu in (0.3 + 0.7j, -1.1, 2.0j):
            M = m_operator(L, mu)
            prod = M * reverse(M)
            assert_mv_close(prod, cp(mu), 1e-9 * max(1.0, M.norm() ** 2))

    def test_coefficients_are_elementary_symmetric(self, rng):
        for sig in (Signature(4), Signature(2, 3), Signature(5, 1)):
            B = random_bivector(sig, rng)
            L = w_ladder(B)
            lams = oracle.squared_pairs(oracle.adjoint_matrix(B), L.k)
            e = np.array(elementary_symmetric(lams))
            np.testing.assert_allclose(char_poly(B).c, e, rtol=1e-9, atol=1e-9)


def test_elementary_symmetric():
    np.testing.assert_allclose(elementary_symmetric([1, 2, 3]), [1, 6, 11, 6])


class TestSpectrum:
    def test_worked_example(self):
        s = spectrum(mv("e12 + 2e34"))
        pairs_close(s.pairs, [(1j, 1), (2j, 1)])
        assert not s.is_pseudo_null
        assert sorted(s.eigenvalues(), key=lambda z: (z.imag, z.real)) == \
            pytest.approx([-2j, -1j, 1j, 2j])

    def test_isoclinic_is_double(self):
        pairs_close(spectrum(mv("e12 + e34")).pairs, [(1j, 2)])

    def test_triple_root(self):
        pairs_close(spectrum(mv("e12 + e34 + e56", "6,0,0")).pairs, [(1j, 3)], 1e-9)

    def test_all_pairs_split_signature(self):
        pairs_close(spectrum(mv(ALL_PAIRS, "2,2,0")).pairs, [(1.0, 2)])

    def test_boost(self):
        pairs_close(spectrum(mv("e14", "3,1,0")).pairs, [(1.0, 1)])

    def test_pseudo_null(self):
        s = spectrum(mv("e12 + e35", "4,0,1"))
        assert s.is_pseudo_null and s.k == 2
        pairs_close(s.pairs, [(0j, 1), (1j, 1)])
        s = spectrum(mv("e14", "3,0,1"))
        assert s.is_pseudo_null and s.k == 1

    def test_complex_conjugate_lambdas(self, rng):
        # a generic bivector of R_{2,2} often has mu^2 off the real axis
        for _ in range(20):
            B = random_bivector(Signature(2, 2), rng)
            s = spectrum(B)
            for mu, _ in s.pairs:
                assert mu.imag >= 0
            values = np.linalg.eigvals(oracle.adjoint_matrix(B))
            for mu in s.eigenvalues():
                assert np.min(np.abs(values - mu)) < 1e-8

    def test_branch_convention(self):
        for mu, _ in spectrum(mv("e12 + 2e34 + e56", "6,0,0")).pairs:
            assert mu.imag > 0 or (mu.imag == 0 and mu.real >= 0)

    def test_negated_flips_representatives(self):
        s = spectrum(mv("e12 + 2e34"))
        assert [mu for mu, _ in s.negated().pairs] == [-mu for mu, _ in s.pairs]

    def test_random_matches_oracle(self, rng):
        for sig in (Signature(4, 4), Signature(8), Signature(2, 6), Signature(3, 3, 1)):
            B = random_bivector(sig, rng)
            s = spectrum(B)
            values = list(np.linalg.eigvals(oracle.adjoint_matrix(B)))
            for mu in s.eigenvalues():
                i = int(np.argmin([abs(v - mu) for v in values]))
                assert abs(values.pop(i) - mu) < 1e-7 * max(1, abs(mu))

    def test_rejects_complex_input(self):
        with pytest.raises(GradeError):
            spectrum(mv("1i*e12"))

    def test_zero(self):
        s = spectrum(mv("0"))
        assert s.pairs == () and s.k == 0
