"""Monomial evaluation, family assembly, products, and canonicalization."""

import numpy as np
import pytest

from romeq.affine import (AffineFamily, ThetaDomainError, add_families,
                          affine_product, assemble, canonicalize_monomials,
                          evaluate_theta, transpose_family)

from helpers import family, mono


class TestEvaluateTheta:
    def test_negative_exponent(self):
        assert evaluate_theta(mono(1.0, -2), [2.0]) == pytest.approx(0.25)

    def test_two_components(self):
        assert evaluate_theta(mono(1.0, 1, 1), [2.0, 3.0]) == pytest.approx(6.0)

    def test_constant(self):
        for mu in ([0.3], [5.0], [-2.0]):
            assert evaluate_theta(mono(1.0, 0), mu) == 1.0

    def test_zero_with_negative_exponent_raises(self):
        with pytest.raises(ThetaDomainError):
            evaluate_theta(mono(1.0, -1), [0.0])

    def test_wrong_length_raises(self):
        with pytest.raises(ValueError):
            evaluate_theta(mono(1.0, 1, 2), [1.0])


class TestAssemble:
    def test_constant_identity(self):
        F = family([((0,), np.eye(2))])
        for mu in ([0.5], [3.0]):
            np.testing.assert_array_equal(assemble(F, mu), np.eye(2))

    def test_both_theta_one_at_mu_1(self):
        rng = np.random.default_rng(0)
        A1, A2 = rng.standard_normal((2, 3, 3))
        F = family([((-1,), A1), ((-2,), A2)])
        np.testing.assert_allclose(assemble(F, [1.0]), A1 + A2)

    def test_two_parameter_combination(self):
        rng = np.random.default_rng(1)
        A1, A2, A3 = rng.standard_normal((3, 2, 2))
        F = family([((1, 0), A1), ((-1, 0), A2), ((0, 1), A3)], d=2)
        np.testing.assert_allclose(assemble(F, [2.0, 3.0]),
                                   2.0 * A1 + 0.5 * A2 + 3.0 * A3)


class TestAffineProduct:
    def test_scalar_constants(self):
        F = family([((0,), [[2.0]])])
        G = family([((0,), [[3.0]])])
        P = affine_product(F, G)
        assert len(P.terms) == 1
        np.testing.assert_allclose(P.terms[0][1], [[6.0]])

    def test_exponents_cancel_and_merge(self):
        F = family([((1,), np.eye(2))])
        G = family([((-1,), np.eye(2))])
        P = affine_product(F, G)
        assert [t.exponents for t in P.monomials] == [(0,)]
        np.testing.assert_allclose(P.terms[0][1], np.eye(2))

    def test_quadratic_expansion_monomials(self):
        # M = (1/mu) M1 + M2 gives M^T M terms with monomials 1/mu^2, 1/mu, 1
        rng = np.random.default_rng(2)
        M1, M2 = rng.standard_normal((2, 1, 4))
        M = family([((-1,), M1), ((0,), M2)])
        Q = affine_product(transpose_family(M), M)
        assert [t.exponents for t in Q.monomials] == [(-2,), (-1,), (0,)]
        np.testing.assert_allclose(Q.terms[0][1], M1.T @ M1)
        np.testing.assert_allclose(Q.terms[1][1], M1.T @ M2 + M2.T @ M1)
        np.testing.assert_allclose(Q.terms[2][1], M2.T @ M2)
        for mu in rng.uniform(0.3, 2.0, 5):
            Mm = assemble(M, [mu])
            np.testing.assert_allclose(assemble(Q, [mu]), Mm.T @ Mm,
                                       rtol=1e-12, atol=1e-12)

    def test_shape_mismatch(self):
        F = family([((0,), np.ones((2, 3)))])
        with pytest.raises(ValueError):
            affine_product(F, F)

    def test_product_soundness_random(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            F = family([((int(rng.integers(-2, 3)),), rng.standard_normal((3, 4))),
                        ((int(rng.integers(-2, 3)),), rng.standard_normal((3, 4)))])
            G = family([((int(rng.integers(-2, 3)),), rng.standard_normal((4, 2))),
                        ((int(rng.integers(-2, 3)),), rng.standard_normal((4, 2)))])
            mu = [float(rng.uniform(0.3, 2.0))]
            left = assemble(affine_product(F, G), mu)
            right = assemble(F, mu) @ assemble(G, mu)
            scale = max(np.linalg.norm(right), 1e-300)
            assert np.linalg.norm(left - right) <= 1e-12 * scale


class TestTranspose:
    def test_single_term(self):
        F = family([((0,), [[1.0, 2.0], [3.0, 4.0]])])
        np.testing.assert_array_equal(transpose_family(F).terms[0][1],
                                      [[1.0, 3.0], [2.0, 4.0]])

    def test_symmetric_fixed_point(self):
        S = np.array([[2.0, 1.0], [1.0, 5.0]])
        F = family([((1,), S)])
        np.testing.assert_array_equal(transpose_family(F).terms[0][1], S)

    def test_commutes_with_assembly(self):
        rng = np.random.default_rng(4)
        F = family([((0,), rng.standard_normal((3, 2))),
                    ((2,), rng.standard_normal((3, 2)))])
        for mu in rng.uniform(0.5, 2.0, 5):
            np.testing.assert_allclose(assemble(transpose_family(F), [mu]),
                                       assemble(F, [mu]).T)


class TestCanonicalization:
    def test_merge_by_exponent(self):
        terms = [(mono(2.0, 1), np.eye(2)), (mono(3.0, 1), np.eye(2))]
        F = AffineFamily.from_terms(terms)
        assert len(F.terms) == 1
        np.testing.assert_allclose(F.terms[0][1], 5.0 * np.eye(2))
        assert F.terms[0][0].coefficient == 1.0

    def test_exact_cancellation_dropped(self):
        terms = [(mono(1.0, 1), np.eye(2)), (mono(-1.0, 1), np.eye(2)),
                 (mono(1.0, 0), np.eye(2))]
        F = AffineFamily.from_terms(terms)
        assert [t.exponents for t in F.monomials] == [(0,)]

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        F = family([((1,), rng.standard_normal((2, 2))),
                    ((0,), rng.standard_normal((2, 2))),
                    ((1,), rng.standard_normal((2, 2)))])
        G = AffineFamily.from_terms(F.terms, shape=F.shape, d=F.d)
        assert len(F.terms) == len(G.terms)
        for (ta, Ma), (tb, Mb) in zip(F.terms, G.terms):
            assert ta == tb
            np.testing.assert_array_equal(Ma, Mb)

    def test_monomial_list_merge(self):
        merged = canonicalize_monomials(
            [mono(2.0, 1), mono(0.5, 1), mono(1.0, 0)])
        assert [(m.coefficient, m.exponents) for m in merged] == \
            [(1.0, (0,)), (2.5, (1,))]

    def test_addition_linearity(self):
        rng = np.random.default_rng(6)
        F = family([((0,), rng.standard_normal((2, 2))),
                    ((1,), rng.standard_normal((2, 2)))])
        G = family([((1,), rng.standard_normal((2, 2))),
                    ((-1,), rng.standard_normal((2, 2)))])
        S = add_families(F, G)
        for mu in rng.uniform(0.4, 2.0, 5):
            np.testing.assert_allclose(assemble(S, [mu]),
                                       assemble(F, [mu]) + assemble(G, [mu]),
                                       rtol=1e-12, atol=1e-14)
