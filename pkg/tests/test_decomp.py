import itertools

import numpy as np
import pytest

from bivector_spectra.algebra import Multivector, Signature, commutator, dot, wedge
from bivector_spectra.decomp import (EIGEN_PAIRING, NULL_LIMIT, OUTER_TANGENT, beta_from_pair,
                                     decompose, decompose_tangent, eigen_pairs, null_limit_part,
                                     outer_cos, outer_power, outer_sin, outer_tan)
from bivector_spectra.errors import (GradeError, JordanesqueError, NonInvertible,
                                     RequiresEigenPairing, Unsupported)
from bivector_spectra.sampling import commuting_pair, random_bivector
from bivector_spectra.spectral import outer_exp, spectrum, w_ladder

from conftest import assert_mv_close, mv

ALL_PAIRS = "e12+e13+e14+e23+e24+e34"


def check_contract(B, dec, tol=1e-9):
    scale = max(B.max_abs(), 1.0)
    total = Multivector.zero(B.sig)
    for p in dec.parts:
        total = total + p.b
        sq = p.b * p.b
        assert (sq - sq.scalar_part).max_abs() <= tol * max(1, p.b.norm() ** 2)
        if p.method == NULL_LIMIT:
            assert abs(sq.scalar_part) <= tol * max(1, p.b.norm() ** 2)
        else:
            assert abs(sq.scalar_part - p.mu ** 2) <= tol * max(1, abs(p.mu) ** 2)
    assert (total - B).max_abs() <= tol * scale
    for p, q in itertools.combinations(dec.parts, 2):
        assert commutator(p.b, q.b).max_abs() <= tol * max(1, p.b.norm() * q.b.norm())
    assert len(dec.parts) <= B.sig.n // 2


class TestOuterTrig:
    def test_zero(self):
        assert_mv_close(outer_cos(mv("0")), 1.0)
        assert_mv_close(outer_sin(mv("0")), 0.0)

    def test_isoclinic_cosine_is_zero_divisor(self):
        c = outer_cos(mv("-1i*e12 - 1i*e34"))
        assert_mv_close(c, mv("1 - e1234"))
        with pytest.raises(NonInvertible, match="eigenvector pairing"):
            outer_tan(mv("-1i*e12 - 1i*e34"))

    def test_matches_outer_exponential(self, rng):
        B = random_bivector(Signature(6), rng)
        plus, minus = outer_exp(B), outer_exp(-B)
        assert_mv_close(outer_cos(B), (plus + minus) * 0.5)
        assert_mv_close(outer_sin(B), (plus - minus) * 0.5)

    def test_grades(self, rng):
        B = random_bivector(Signature(8), rng)
        assert outer_cos(B).grades_present <= {0, 4, 8}
        assert outer_sin(B).grades_present <= {2, 6}

    @pytest.mark.parametrize("sig", [Signature(4), Signature(3, 3), Signature(7)])
    def test_pythagoras_with_wedge(self, sig, rng):
        B = random_bivector(sig, rng)
        c, s = outer_cos(B), outer_sin(B)
        lhs = outer_power(c, 2) - outer_power(s, 2)
        assert_mv_close(lhs, 1.0, 1e-10 * max(1.0, c.norm() ** 2))

    def test_tangent_of_simple_is_itself(self):
        b = mv("0.7e13")
        assert_mv_close(outer_tan(b), b)

    def test_worked_example_tangents(self):
        B = mv("e12 + 2e34")
        assert_mv_close(outer_tan(B * (1 / 1j)) * 1j, mv("e12"))
        assert_mv_close(outer_tan(B * (1 / 2j)) * 2j, mv("2e34"))

    def test_tangent_is_anti_self_reverse(self, rng):
        T = outer_tan(random_bivector(Signature(6), rng))
        assert_mv_close(~T, -T, 1e-10 * max(1.0, T.norm()))

    def test_addition_formulas_with_wedge(self, rng):
        for sig in (Signature(6), Signature(4, 2)):
            b1, b2 = commuting_pair(sig, rng, simple=False)
            c1, s1, c2, s2 = outer_cos(b1), outer_sin(b1), outer_cos(b2), outer_sin(b2)
            assert_mv_close(outer_cos(b1 + b2), wedge(c1, c2) + wedge(s1, s2), 1e-10)
            assert_mv_close(outer_sin(b1 + b2), wedge(s1, c2) + wedge(c1, s2), 1e-10)

    def test_addition_formulas_with_geometric_product(self, rng):
        # disjoint supports: B1 B2 = B1 ^ B2, so <B1 B2>_0 = 0
        b1, b2 = commuting_pair(Signature(6), rng, simple=False)
        assert abs((b1 * b2).scalar_part) < 1e-14
        c1, s1, c2, s2 = outer_cos(b1), outer_sin(b1), outer_cos(b2), outer_sin(b2)
        assert_mv_close(outer_cos(b1 + b2), c1 * c2 + s1 * s2, 1e-10)
        assert_mv_close(outer_sin(b1 + b2), s1 * c2 + c1 * s2, 1e-10)

    def test_commuting_only_gives_wedge_product_law(self):
        # e12 + e34 commutes with e12 but <(e12 + e34) e12>_0 = -1
        b1, b2 = mv("e12 + e34"), mv("e12")
        assert_mv_close(outer_exp(b1 + b2), wedge(outer_exp(b1), outer_exp(b2)))
        assert (outer_exp(b1 + b2) - outer_exp(b1) * outer_exp(b2)).max_abs() > 0.5

    def test_unit_eigenvalue_criterion(self, rng):
        B = mv("e14 + 2e23", "3,1,0")   # spectrum +-1, +-2i
        c, s = outer_cos(B), outer_sin(B)
        assert_mv_close(c * c, s * s)
        B = random_bivector(Signature(3, 1), rng)
        c, s = outer_cos(B), outer_sin(B)
        assert (c * c - s * s).max_abs() > 1e-3

    def test_perturbation_keeps_unit_eigenvalue(self, rng):
        sig = Signature(4, 1)
        b1 = mv("e15", "4,1,0")             # tan^(b1)^2 = 1
        coeffs = np.zeros(sig.dim)
        for a, c in itertools.combinations((1, 2, 3), 2):
            coeffs[(1 << a) | (1 << c)] = rng.normal()
        b2 = Multivector(sig, coeffs)       # avoids e1 and e5, so b1 b2 = b1 ^ b2
        assert_mv_close(b1 * b2, wedge(b1, b2))
        c, s = outer_cos(b1 + b2), outer_sin(b1 + b2)
        assert_mv_close(c * c, s * s, 1e-10)


class TestTangentRoute:
    def test_worked_example(self):
        dec = decompose_tangent(mv("e12 + 2e34"))
        assert [p.method for p in dec.parts] == [OUTER_TANGENT, OUTER_TANGENT]
        assert_mv_close(dec.parts[0].b, mv("e12"))
        assert_mv_close(dec.parts[1].b, mv("2e34"))

    def test_simple(self):
        dec = decompose_tangent(mv("0.3e13 - 2e14"))
        assert len(dec.parts) == 1
        assert_mv_close(dec.parts[0].b, mv("0.3e13 - 2e14"))

    def test_isoclinic_requires_pairing(self):
        with pytest.raises(RequiresEigenPairing) as info:
            decompose_tangent(mv("e12 + e34"))
        assert isinstance(info.value.__cause__, NonInvertible)

    def test_with_null_part(self):
        B = mv("e12 + 3e45 + e35", "4,0,1")
        dec = decompose_tangent(B)
        assert [p.method for p in dec.parts][-1] == NULL_LIMIT
        check_contract(B, dec)


class TestNullLimit:
    def test_worked_example(self):
        L = w_ladder(mv("e12 + e35", "4,0,1"))
        part = null_limit_part(L)
        assert_mv_close(part.b, mv("e35", "4,0,1"))
        assert abs((part.b * part.b).scalar_part) <= 1e-12

    def test_simple_null(self):
        B = mv("e14", "3,0,1")
        assert_mv_close(null_limit_part(w_ladder(B)).b, B)

    def test_lightlike_in_nondegenerate(self):
        B = mv("e12 - e23", "2,1,0")
        dec = decompose(B)
        assert dec.parts[0].method == NULL_LIMIT
        assert_mv_close(dec.parts[0].b, B)

    def test_non_invertible_denominator(self):
        # null pair with multiplicity 2: W_1 is not invertible
        B = mv("e15 + e26", "2,0,4")
        with pytest.raises(Unsupported):
            decompose(B)


class TestEigenPairs:
    def test_single_plane(self):
        B = mv("e12", "2,0,0")
        (pair,) = eigen_pairs(B)
        for v, s in ((pair.v_plus, 1), (pair.v_minus, -1)):
            assert_mv_close(commutator(B, v), v * (s * pair.mu))
            assert abs((v * v).scalar_part) < 1e-12
        assert abs(pair.pairing_value) > 0.5
        assert_mv_close(beta_from_pair(pair).b, B)

    def test_isoclinic_pairs_are_valid(self):
        B = mv("e12 + e34")
        pairs = eigen_pairs(B)
        assert len(pairs) == 2
        for pair in pairs:
            assert abs(pair.pairing_value) > 1e-3
            beta = wedge(pair.v_plus, pair.v_minus) * (1 / pair.pairing_value)
            assert_mv_close(beta * beta, 1.0, 1e-10)
            assert_mv_close(dot(beta, pair.v_plus), pair.v_plus, 1e-10)
            assert_mv_close(dot(beta, pair.v_minus), -pair.v_minus, 1e-10)
        # the two pairs must be mutually orthogonal
        a, b = pairs
        assert abs(dot(a.v_plus, b.v_minus).scalar_part) < 1e-10

    def test_bad_pairing_has_zero_value(self):
        # e1 + i e2 (eigenvalue +i) against e3 - i e4 (eigenvalue -i) pair to zero
        sig = Signature(4)
        u = Multivector.vector(sig, [1, 1j, 0, 0])
        w = Multivector.vector(sig, [0, 0, 1, -1j])
        assert dot(u, w).scalar_part == 0

    def test_jordanesque(self):
        B = mv(ALL_PAIRS, "2,2,0")
        with pytest.raises(JordanesqueError) as info:
            eigen_pairs(B)
        err = info.value
        assert err.spectrum == [(1.0, 2)]
        assert list(err.eigenvector_counts.values()) == [(1, 1, 2)]
        assert "out of scope" in err.note

    def test_triple_isoclinic(self):
        B = mv("e12 + e34 + e56", "6,0,0")
        dec = decompose(B)
        assert [p.method for p in dec.parts] == [EIGEN_PAIRING] * 3
        assert all(p.is_real for p in dec.parts)
        check_contract(B, dec)


class TestDispatcher:
    def test_worked_example(self):
        dec = decompose(mv("e12 + 2e34"))
        assert [p.method for p in dec.parts] == [OUTER_TANGENT] * 2
        assert_mv_close(dec.parts[0].b, mv("e12"), 1e-10)
        assert_mv_close(dec.parts[1].b, mv("2e34"), 1e-10)

    def test_isoclinic(self):
        B = mv("e12 + e34")
        dec = decompose(B)
        assert [p.method for p in dec.parts] == [EIGEN_PAIRING] * 2
        for p in dec.parts:
            assert p.is_real
            assert (p.b * p.b).scalar_part == pytest.approx(-1.0)
        check_contract(B, dec)

    def test_mixed_methods(self):
        B = mv("e12 + e34 + 3e56", "6,0,0")
        dec = decompose(B)
        assert sorted(p.method for p in dec.parts) == [EIGEN_PAIRING, EIGEN_PAIRING, OUTER_TANGENT]
        check_contract(B, dec)

    def test_rotated_isoclinic(self, rng):
        # conjugating e12 + e34 by a random rotor keeps it isoclinic
        from bivector_spectra.rotor import exp_bivector
        R = exp_bivector(random_bivector(Signature(4), rng)).value
        B = (R * mv("e12 + e34") * ~R).real
        B = Multivector(B.sig, np.where(np.abs(B.coeffs) < 1e-15, 0, B.coeffs))
        dec = decompose(B)
        check_contract(B, dec)
        assert all(p.is_real for p in dec.parts)

    def test_jordanesque(self):
        with pytest.raises(JordanesqueError):
            decompose(mv(ALL_PAIRS, "2,2,0"))

    def test_pseudo_null(self):
        B = mv("e12 + e35", "4,0,1")
        dec = decompose(B)
        assert [p.method for p in dec.parts] == [OUTER_TANGENT, NULL_LIMIT]
        assert_mv_close(dec.parts[1].b, mv("e35", "4,0,1"))

    def test_rejects_non_bivector(self):
        with pytest.raises(GradeError):
            decompose(mv("1 + e12"))

    @pytest.mark.parametrize("sig", [Signature(4), Signature(5), Signature(3, 1), Signature(4, 4),
                                     Signature(8), Signature(3, 0, 1), Signature(5, 0, 1),
                                     Signature(2, 3, 1), Signature(6, 2)])
    def test_random_contract(self, sig, rng):
        for _ in range(5):
            B = random_bivector(sig, rng)
            check_contract(B, decompose(B))

    def test_complex_conjugate_parts(self, rng):
        # mu^2 off the real axis: parts come as a complex-conjugate pair
        for _ in range(40):
            B = random_bivector(Signature(2, 2), rng)
            s = spectrum(B)
            if all(abs((mu * mu).imag) < 1e-9 for mu, _ in s.pairs):
                continue
            dec = decompose(B, spec=s)
            a, b = dec.parts
            assert not a.is_real and not b.is_real
            assert_mv_close(a.b, b.b.conj(), 1e-9)
            check_contract(B, dec)
            return
        pytest.skip("no complex spectrum drawn")

    def test_sign_invariance(self, rng):
        for B in (mv("e12 + 2e34"), mv("e12 + e34"), mv("e12 + e35", "4,0,1"),
                  random_bivector(Signature(3, 2), rng)):
            s = spectrum(B)
            a = decompose(B, spec=s)
            b = decompose(B, spec=s.negated())
            for p, q in zip(a.parts, b.parts):
                assert_mv_close(p.b, q.b, 1e-9)

    def test_parts_of_sum_of_commuting_blades(self, rng):
        b1, b2 = commuting_pair(Signature(6), rng)
        B = b1 + b2
        dec = decompose(B)
        got = sorted((p.b for p in dec.parts), key=lambda x: x.norm())
        want = sorted((b1, b2), key=lambda x: x.norm())
        for g, w in zip(got, want):
            assert_mv_close(g, w, 1e-9)


def test_lemma_grade_by_grade(rng):
    # W_{2j+1} = beta ^ W_{2j} + beta . W_{2j+2} for the ladder of B / mu
    for sig in (Signature(4), Signature(6), Signature(3, 2)):
        B = random_bivector(sig, rng)
        for p in decompose(B).parts:
            beta = p.b * (1 / p.mu)
            W = list(w_ladder(B * (1 / p.mu)).W) + [Multivector.zero(sig)] * 3
            for j in range(len(W) // 2 - 1):
                rhs = wedge(beta, W[2 * j]) + dot(beta, W[2 * j + 2])
                assert_mv_close(W[2 * j + 1], rhs, 1e-9 * max(1, W[2 * j + 1].norm()))
