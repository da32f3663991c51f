"""Structure of the built-in benchmark families."""

import numpy as np
import pytest

from romeq.affine import assemble
from romeq.benchmarks import BENCH_DEFAULTS, FAMILY_BUILDERS, benchmark_problem
from romeq.fom import fom_solve
from romeq.problems import validate
from romeq.vecform import relative_residual


class TestPaleCt:
    def test_matrices_at_small_n(self):
        p = benchmark_problem("pale-ct", n=4)
        (t1, A1), (t2, A2) = p.A_families[0].terms
        assert (t1.exponents, t2.exponents) == ((-2,), (-1,))
        np.testing.assert_array_equal(A2, [[5.0, 0.3, 0.3, 0.0],
                                           [0.0, 5.0, 0.3, 0.3],
                                           [0.0, 0.0, 5.0, 0.3],
                                           [0.0, 0.0, 0.0, 5.0]])
        np.testing.assert_array_equal(A1, [[0.0, 0.0, 0.0, 0.0],
                                           [0.2, 0.0, 0.0, 0.0],
                                           [0.2, 0.2, 0.0, 0.0],
                                           [0.0, 0.2, 0.2, 0.0]])
        (m1, M1), (m2, M2) = p.M_families[0].terms
        np.testing.assert_array_equal(M1, [[0.2, 0.0, 0.0, 0.2]])
        np.testing.assert_array_equal(M2, [[0.0, 0.2, 0.2, 0.0]])
        assert p.domain == ((0.1, 2.0),)

    def test_solvable_across_domain(self):
        p = benchmark_problem("pale-ct", n=16)
        for mu in (0.1, 0.7, 2.0):
            x = fom_solve(p, [mu])
            assert relative_residual(p, [mu], x) <= 1e-10


class TestPaleDt:
    def test_matrices_at_small_n(self):
        p = benchmark_problem("pale-dt", n=5)
        terms = dict((t.exponents, M) for t, M in p.A_families[0].terms)
        np.testing.assert_array_equal(terms[(1, 0)], 15.0 * np.eye(5))
        np.testing.assert_array_equal(terms[(-1, 0)],
                                      np.diag([1.0] * 4, 1) + np.diag([0.5] * 4, -1))
        np.testing.assert_array_equal(terms[(0, 1)],
                                      np.diag([1.0] * 3, 2) + np.diag([0.5] * 3, -2))
        m_terms = dict((t.exponents, M) for t, M in p.M_families[0].terms)
        np.testing.assert_array_equal(m_terms[(1, 0)],
                                      [[0.1, 0.1, 0.1, 0.1, -0.9]])
        np.testing.assert_array_equal(m_terms[(0, 0)], [[0.0, 0.0, 0.0, 0.0, 1.0]])
        assert p.domain == ((2.0, 6.0), (2.0, 6.0))

    def test_solvable_on_grid_corners(self):
        p = benchmark_problem("pale-dt", n=12)
        for mu in ([2.0, 2.0], [6.0, 2.0], [2.0, 6.0], [6.0, 6.0]):
            x = fom_solve(p, mu)
            assert relative_residual(p, mu, x) <= 1e-10


class TestPaleCoupled:
    def test_coupling_signs(self):
        p = benchmark_problem("pale-coupled", n=4)
        np.testing.assert_array_equal(p.coupling, [[-1.0, 1.0], [1.0, -1.0]])

    def test_second_block_scales_first(self):
        p = benchmark_problem("pale-coupled", n=4)
        m2 = dict((t.exponents, M) for t, M in p.M_families[1].terms)
        np.testing.assert_array_equal(m2[(-1,)], [[2.0, 0.0, 0.0, 0.0]])
        np.testing.assert_array_equal(m2[(0,)], [[0.0, 0.0, 0.0, 2.0]])

    def test_tridiagonal_terms(self):
        p = benchmark_problem("pale-coupled", n=4)
        a1 = dict((t.exponents, M) for t, M in p.A_families[0].terms)
        np.testing.assert_array_equal(a1[(-1,)], 10.0 * np.eye(4))
        np.testing.assert_array_equal(a1[(-2,)],
                                      np.diag([2.0] * 3, 1) + np.diag([3.0] * 3, -1))
        a2 = dict((t.exponents, M) for t, M in p.A_families[1].terms)
        np.testing.assert_array_equal(a2[(1,)], 8.0 * np.eye(4))
        np.testing.assert_array_equal(a2[(2,)],
                                      np.diag([1.0] * 3, 1) + np.diag([2.0] * 3, -1))


class TestPareCt:
    def test_matrices_at_small_n(self):
        p = benchmark_problem("pare-ct", n=4)
        terms = dict((t.exponents, M) for t, M in p.A_families[0].terms)
        np.testing.assert_array_equal(
            terms[(-1,)], -30.0 * np.eye(4) + np.diag([-3.0] * 3, 1)
            + np.diag([2.0] * 3, -1))
        np.testing.assert_array_equal(
            terms[(-2,)], np.diag([-3.0] * 3, 1) + np.diag([-4.0] * 2, 2)
            + np.diag([2.0] * 3, -1) + np.diag([2.0] * 2, -2))
        np.testing.assert_array_equal(p.B_family.terms[0][1],
                                      0.2 * np.ones((4, 1)))
        np.testing.assert_array_equal(p.M_families[0].terms[0][1],
                                      0.1 * np.ones((1, 4)))

    def test_stable_over_domain(self):
        p = benchmark_problem("pare-ct", n=24)
        assert validate(p) == []
        for mu in (0.1, 1.0, 5.0):
            A = assemble(p.A_families[0], [mu])
            assert np.max(np.linalg.eigvals(A).real) < 0


class TestRegistry:
    def test_defaults_cover_all_families(self):
        assert set(BENCH_DEFAULTS) == set(FAMILY_BUILDERS)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            benchmark_problem("nope")

    def test_minimum_order_guard(self):
        with pytest.raises(ValueError):
            benchmark_problem("pale-ct", n=2)
