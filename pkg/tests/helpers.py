"""Shared builders for randomized test problems."""

import numpy as np

from romeq.affine import AffineFamily, ThetaMonomial
from romeq.problems import (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI,
                            COUPLED_LYAPUNOV, DISCRETE_LYAPUNOV,
                            ProblemDefinition)
from romeq.vectorize import vec


def mono(coefficient, *exponents):
    return ThetaMonomial(coefficient, tuple(exponents))


def family(term_specs, d=1, shape=None):
    return AffineFamily.from_terms(
        [(mono(1.0, *np.atleast_1d(e)), M) for e, M in term_specs],
        d=d, shape=shape)


def random_stable(n, rng, margin=1.0):
    A = rng.standard_normal((n, n))
    return A - (np.max(np.linalg.eigvals(A).real) + margin) * np.eye(n)


def random_contraction(n, rng, radius=0.8):
    A = rng.standard_normal((n, n))
    return A * (radius / max(np.max(np.abs(np.linalg.eigvals(A))), 1e-12))


def random_problem(kind, n, rng, l=2):
    """A well-posed random instance of one equation kind with two monomials."""
    if kind == CONTINUOUS_LYAPUNOV:
        A = family([((0,), random_stable(n, rng)),
                    ((-1,), 0.2 * rng.standard_normal((n, n)))])
        M = family([((0,), rng.standard_normal((l, n))),
                    ((1,), rng.standard_normal((l, n)))])
        return ProblemDefinition(kind=kind, n=n, s=1, d=1, A_families=(A,),
                                 M_families=(M,), domain=((0.5, 2.0),))
    if kind == DISCRETE_LYAPUNOV:
        A = family([((0,), random_contraction(n, rng, 0.6)),
                    ((1,), random_contraction(n, rng, 0.1))])
        M = family([((0,), rng.standard_normal((l, n))),
                    ((1,), rng.standard_normal((l, n)))])
        return ProblemDefinition(kind=kind, n=n, s=1, d=1, A_families=(A,),
                                 M_families=(M,), domain=((0.5, 2.0),))
    if kind == COUPLED_LYAPUNOV:
        A1 = family([((0,), random_stable(n, rng, margin=2.0)),
                     ((-1,), 0.2 * rng.standard_normal((n, n)))])
        A2 = family([((0,), random_stable(n, rng, margin=2.0)),
                     ((1,), 0.2 * rng.standard_normal((n, n)))])
        M1 = family([((0,), rng.standard_normal((l, n)))])
        M2 = family([((1,), rng.standard_normal((l, n)))])
        Pi = np.array([[-1.0, 0.5], [0.5, -1.0]])
        return ProblemDefinition(kind=kind, n=n, s=2, d=1,
                                 A_families=(A1, A2), M_families=(M1, M2),
                                 coupling=Pi, domain=((0.5, 2.0),))
    if kind == CONTINUOUS_RICCATI:
        A = family([((0,), random_stable(n, rng, margin=2.0)),
                    ((-1,), 0.2 * rng.standard_normal((n, n)))])
        M = family([((0,), rng.standard_normal((l, n)))])
        B = family([((1,), rng.standard_normal((n, 1)))])
        return ProblemDefinition(kind=kind, n=n, s=1, d=1, A_families=(A,),
                                 M_families=(M,), B_family=B,
                                 domain=((0.5, 2.0),))
    raise ValueError(kind)


def symmetric_span_basis(n, r, rng):
    """Orthonormal columns that are vecs of symmetric n x n matrices."""
    cols = []
    for _ in range(r):
        S = rng.standard_normal((n, n))
        cols.append(vec(S + S.T))
    Q, _ = np.linalg.qr(np.column_stack(cols))
    return Q


def exact_span_problem(n=8, seed=42):
    """Constant-A problem whose solution manifold is exactly five-dimensional.

    With A constant and Q(mu) carrying five independent monomial terms, the
    solutions x(mu) = -L^{-1} c0(mu) stay in the span of the five responses
    L^{-1} vec(Q_t), so a rank-5 basis reconstructs every snapshot exactly.
    """
    rng = np.random.default_rng(seed)
    A = random_stable(n, rng)
    M_terms = [((e,), rng.standard_normal((1, n))) for e in range(3)]
    return ProblemDefinition(
        kind=CONTINUOUS_LYAPUNOV, n=n, s=1, d=1,
        A_families=(family([((0,), A)]),),
        M_families=(family(M_terms),),
        domain=((0.5, 2.0),), name="exact-span-5")
