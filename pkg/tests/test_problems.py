"""Problem declarations, theta-group derivation, and diagnostics."""

import numpy as np
import pytest

from romeq.benchmarks import benchmark_problem
from romeq.problems import (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI,
                            COUPLED_LYAPUNOV, KINDS, ProblemDefinition,
                            derive_theta_groups, validate)
from romeq.intrusive import intrusive_rom
from romeq.rom import reduced_operators_at
from romeq.vecform import vectorized_residual
from romeq.vectorize import sym_square, vec

from helpers import family, random_problem, symmetric_span_basis


class TestProblemDefinition:
    def test_full_dimension(self):
        p = benchmark_problem("pale-coupled", n=4)
        assert p.N == 2 * 16

    def test_riccati_requires_b(self):
        p = benchmark_problem("pare-ct", n=4)
        with pytest.raises(ValueError):
            ProblemDefinition(kind=CONTINUOUS_RICCATI, n=4, s=1, d=1,
                              A_families=p.A_families, M_families=p.M_families,
                              domain=p.domain)

    def test_b_rejected_elsewhere(self):
        p = benchmark_problem("pale-ct", n=4)
        b = benchmark_problem("pare-ct", n=4).B_family
        with pytest.raises(ValueError):
            ProblemDefinition(kind=CONTINUOUS_LYAPUNOV, n=4, s=1, d=1,
                              A_families=p.A_families, M_families=p.M_families,
                              B_family=b, domain=p.domain)

    def test_coupled_requires_coupling(self):
        p = benchmark_problem("pale-coupled", n=4)
        with pytest.raises(ValueError):
            ProblemDefinition(kind=COUPLED_LYAPUNOV, n=4, s=2, d=1,
                              A_families=p.A_families, M_families=p.M_families,
                              domain=p.domain)

    def test_shape_checks(self):
        p = benchmark_problem("pale-ct", n=4)
        bad_m = (family([((0,), np.ones((1, 5)))]),)
        with pytest.raises(ValueError):
            ProblemDefinition(kind=CONTINUOUS_LYAPUNOV, n=4, s=1, d=1,
                              A_families=p.A_families, M_families=bad_m,
                              domain=p.domain)


class TestDeriveThetaGroups:
    def test_continuous_benchmark(self):
        g = derive_theta_groups(benchmark_problem("pale-ct", n=6))
        assert [m.exponents for m in g.theta_C1] == [(-2,), (-1,), (0,)]
        assert [m.exponents for m in g.theta_C0] == [(-2,), (-1,), (0,)]
        assert g.theta_C2 == ()

    def test_riccati_benchmark(self):
        g = derive_theta_groups(benchmark_problem("pare-ct", n=6))
        assert [m.exponents for m in g.theta_C2] == [(2,)]
        assert [m.exponents for m in g.theta_C1] == [(-2,), (-1,), (0,)]
        assert [m.exponents for m in g.theta_C0] == [(-2,)]

    def test_discrete_pairwise_products(self):
        g = derive_theta_groups(benchmark_problem("pale-dt", n=6))
        assert [m.exponents for m in g.theta_C1] == \
            [(-2, 0), (-1, 1), (0, 0), (0, 2), (1, 1), (2, 0)]

    def test_constant_problem(self):
        rng = np.random.default_rng(0)
        p = ProblemDefinition(
            kind=CONTINUOUS_LYAPUNOV, n=3, s=1, d=1,
            A_families=(family([((0,), rng.standard_normal((3, 3)))]),),
            M_families=(family([((0,), rng.standard_normal((1, 3)))]),),
            domain=((0.5, 2.0),))
        g = derive_theta_groups(p)
        assert [m.exponents for m in g.theta_C2] == []
        assert [m.exponents for m in g.theta_C1] == [(0,)]
        assert [m.exponents for m in g.theta_C0] == [(0,)]

    def test_shift_always_present(self):
        for kind in KINDS:
            p = random_problem(kind, 4, np.random.default_rng(1))
            g = derive_theta_groups(p)
            assert (0,) in [m.exponents for m in g.theta_C1]


class TestValidate:
    def test_stable_riccati_clean(self):
        assert validate(benchmark_problem("pare-ct", n=8)) == []

    def test_unstable_riccati_flagged(self):
        n = 4
        p = ProblemDefinition(
            kind=CONTINUOUS_RICCATI, n=n, s=1, d=1,
            A_families=(family([((0,), np.eye(n))]),),
            M_families=(family([((0,), np.ones((1, n)))]),),
            B_family=family([((0,), np.ones((n, 1)))]),
            domain=((0.5, 2.0),))
        findings = validate(p)
        assert any("unstable A" in f for f in findings)

    def test_domain_contains_zero_flagged(self):
        p = ProblemDefinition(
            kind=CONTINUOUS_LYAPUNOV, n=3, s=1, d=1,
            A_families=(family([((-1,), -np.eye(3))]),),
            M_families=(family([((0,), np.ones((1, 3)))]),),
            domain=((-1.0, 1.0),))
        findings = validate(p)
        assert any("contains 0" in f for f in findings)


class TestVectorizedConsistency:
    """The fixed-point operators reproduce the matrix-equation residual."""

    @pytest.mark.parametrize("kind", KINDS)
    def test_identity_basis_residual(self, kind):
        rng = np.random.default_rng(7)
        n = 4
        p = random_problem(kind, n, rng)
        model = intrusive_rom(p, np.eye(p.N))
        for _ in range(20):
            mu = rng.uniform(0.6, 1.9, 1)
            x = symmetric_span_basis(n, 1, rng)[:, 0]
            if p.s == 2:
                x = np.concatenate([x, symmetric_span_basis(n, 1, rng)[:, 0]])
            C2, C1, C0 = reduced_operators_at(model, mu)
            fixed_point_residual = C2 @ sym_square(x) + (C1 - np.eye(p.N)) @ x + C0
            direct = vectorized_residual(p, mu, x)
            scale = max(np.linalg.norm(direct), np.linalg.norm(C0), 1.0)
            assert np.linalg.norm(fixed_point_residual - direct) <= 1e-12 * scale
