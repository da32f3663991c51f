"""Assembly of the vectorized block form of the matrix equations.

The stacked system reads  C2(mu) x^2 + Cbar1(mu) x + C0(mu) = 0  with
x = [vec(X_1); ...; vec(X_s)].  The fixed-point operators used by the reduced
models shift the linear part by the identity: C1(mu) = Cbar1(mu) + I.  Dense
operators are materialized only below a dimension guard; everywhere else the
operator actions are realized directly from the affine data.
"""

import numpy as np

from .affine import affine_product, assemble, transpose_family
from .problems import (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI,
                       DISCRETE_LYAPUNOV, derive_theta_groups)
from .vectorize import unvec, vec

# Largest stacked dimension for which N x N operators are materialized.
DENSE_GUARD = 4096


def split_blocks(problem, x):
    """The s symmetric matrices packed in a stacked state vector."""
    n, n2 = problem.n, problem.n ** 2
    x = np.asarray(x, dtype=float)
    if x.size != problem.N:
        raise ValueError(f"state length {x.size} != N = {problem.N}")
    return [unvec(x[i * n2:(i + 1) * n2], n, n) for i in range(problem.s)]


def stack_blocks(mats):
    """Inverse of split_blocks: stack vec(X_i) in block order."""
    return np.concatenate([vec(X) for X in mats])


def assembled_data(problem, mu):
    """Constant matrices of the equation at mu: A_i, Q_i = M_i^T M_i, and G."""
    A = [assemble(fam, mu) for fam in problem.A_families]
    Q = []
    for fam in problem.M_families:
        M = assemble(fam, mu)
        Q.append(M.T @ M)
    G = None
    if problem.kind == CONTINUOUS_RICCATI:
        B = assemble(problem.B_family, mu)
        G = B @ B.T
    return A, Q, G


def constant_term(problem, mu):
    """C0(mu): the stacked vectors vec(Q_i(mu))."""
    _, Q, _ = assembled_data(problem, mu)
    return np.concatenate([vec(Qi) for Qi in Q])


def quadratic_term(problem, mu, x):
    """C2(mu) x^2 evaluated through the matrix form (-vec(X G X) for Riccati)."""
    if problem.kind != CONTINUOUS_RICCATI:
        return np.zeros(problem.N)
    _, _, G = assembled_data(problem, mu)
    X = unvec(np.asarray(x, dtype=float), problem.n, problem.n)
    return -vec(X @ G @ X)


def linear_term(problem, mu, x):
    """Cbar1(mu) x without materializing the operator."""
    Xs = split_blocks(problem, x)
    A, _, _ = assembled_data(problem, mu)
    if problem.kind in (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI):
        return vec(A[0].T @ Xs[0] + Xs[0] @ A[0])
    if problem.kind == DISCRETE_LYAPUNOV:
        return vec(A[0].T @ Xs[0] @ A[0] - Xs[0])
    Pi = problem.coupling
    out = []
    for i in range(problem.s):
        R = A[i].T @ Xs[i] + Xs[i] @ A[i]
        for j in range(problem.s):
            R = R + Pi[i, j] * Xs[j]
        out.append(vec(R))
    return np.concatenate(out)


def vectorized_residual(problem, mu, x):
    """Residual of the stacked system: C2(mu) x^2 + Cbar1(mu) x + C0(mu)."""
    return (quadratic_term(problem, mu, x)
            + linear_term(problem, mu, x)
            + constant_term(problem, mu))


def residual_scale(problem, mu, x):
    """Unsigned sum of the residual summand norms, for relative residuals."""
    Xs = split_blocks(problem, x)
    A, Q, G = assembled_data(problem, mu)
    scale = sum(np.linalg.norm(Qi) for Qi in Q)
    if problem.kind in (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI):
        scale += np.linalg.norm(A[0].T @ Xs[0]) + np.linalg.norm(Xs[0] @ A[0])
        if G is not None:
            scale += np.linalg.norm(Xs[0] @ G @ Xs[0])
    elif problem.kind == DISCRETE_LYAPUNOV:
        scale += np.linalg.norm(A[0].T @ Xs[0] @ A[0]) + np.linalg.norm(Xs[0])
    else:
        Pi = problem.coupling
        for i in range(problem.s):
            scale += np.linalg.norm(A[i].T @ Xs[i]) + np.linalg.norm(Xs[i] @ A[i])
            scale += sum(abs(Pi[i, j]) * np.linalg.norm(Xs[j])
                         for j in range(problem.s))
    return max(scale, np.finfo(float).tiny)


def relative_residual(problem, mu, x):
    """Norm of the stacked residual over the summand-norm scale."""
    r = vectorized_residual(problem, mu, x)
    return float(np.linalg.norm(r) / residual_scale(problem, mu, x))


def _check_dense_guard(problem):
    if problem.N > DENSE_GUARD:
        raise ValueError(
            f"dense assembly limited to N <= {DENSE_GUARD}, got N = {problem.N}")


def dense_linear_operator(problem, mu):
    """Cbar1(mu) as an explicit N x N matrix (small problems only)."""
    _check_dense_guard(problem)
    n = problem.n
    I = np.eye(n)
    A, _, _ = assembled_data(problem, mu)
    if problem.kind in (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI):
        return np.kron(I, A[0].T) + np.kron(A[0].T, I)
    if problem.kind == DISCRETE_LYAPUNOV:
        return np.kron(A[0].T, A[0].T) - np.eye(problem.N)
    n2 = n * n
    out = np.kron(problem.coupling, np.eye(n2))
    for i in range(problem.s):
        sl = slice(i * n2, (i + 1) * n2)
        out[sl, sl] += np.kron(I, A[i].T) + np.kron(A[i].T, I)
    return out


def c0_constant_blocks(problem, groups=None):
    """Constant vectors of the affine decomposition of C0, one row per monomial."""
    groups = groups or derive_theta_groups(problem)
    n2 = problem.n ** 2
    out = np.zeros((len(groups.theta_C0), problem.N))
    index = {m.exponents: t for t, m in enumerate(groups.theta_C0)}
    for i, M_fam in enumerate(problem.M_families):
        q_fam = affine_product(transpose_family(M_fam), M_fam)
        for theta, Mat in q_fam.terms:
            out[index[theta.exponents], i * n2:(i + 1) * n2] += vec(Mat)
    return out


def _columns_as_matrices(problem, V):
    """Reshape each block of each column of V into an n x n matrix stack."""
    n, n2 = problem.n, problem.n ** 2
    r = V.shape[1]
    return [V[i * n2:(i + 1) * n2, :].reshape((n, n, r), order="F")
            for i in range(problem.s)]


def _flatten_stack(Y):
    n = Y.shape[0]
    return Y.reshape((n * n, Y.shape[2]), order="F")


def c1_block_matvecs(problem, V, groups=None):
    """Products C1_t @ V of the shifted linear operator blocks with a basis.

    C1 = Cbar1 + I; the identity lands in the constant-monomial block (for the
    discrete kind it cancels the -I of the Stein form exactly).  Works at any
    N because the Kronecker actions are applied column-wise.
    """
    groups = groups or derive_theta_groups(problem)
    V = np.asarray(V, dtype=float)
    squeeze = V.ndim == 1
    if squeeze:
        V = V[:, None]
    if V.shape[0] != problem.N:
        raise ValueError(f"basis row count {V.shape[0]} != N = {problem.N}")
    index = {m.exponents: t for t, m in enumerate(groups.theta_C1)}
    zero_e = (0,) * problem.d
    out = [np.zeros_like(V) for _ in groups.theta_C1]
    Ys = _columns_as_matrices(problem, V)
    n2 = problem.n ** 2

    if problem.kind in (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI):
        Y = Ys[0]
        for theta, Ae in problem.A_families[0].terms:
            acted = (np.einsum("ab,bcr->acr", Ae.T, Y)
                     + np.einsum("abr,bc->acr", Y, Ae))
            out[index[theta.exponents]] += _flatten_stack(acted)
        out[index[zero_e]] += V
    elif problem.kind == DISCRETE_LYAPUNOV:
        Y = Ys[0]
        for t1, A1 in problem.A_families[0].terms:
            for t2, A2 in problem.A_families[0].terms:
                e = tuple(a + b for a, b in zip(t1.exponents, t2.exponents))
                acted = np.einsum("ab,bcr,cd->adr", A2.T, Y, A1)
                out[index[e]] += _flatten_stack(acted)
        # the -I of the Stein form and the fixed-point shift cancel exactly
    else:
        Pi = problem.coupling
        for i in range(problem.s):
            sl = slice(i * n2, (i + 1) * n2)
            for theta, Ae in problem.A_families[i].terms:
                acted = (np.einsum("ab,bcr->acr", Ae.T, Ys[i])
                         + np.einsum("abr,bc->acr", Ys[i], Ae))
                out[index[theta.exponents]][sl, :] += _flatten_stack(acted)
            block = out[index[zero_e]]
            block[sl, :] += V[sl, :]
            for j in range(problem.s):
                if Pi[i, j] != 0.0:
                    block[sl, :] += Pi[i, j] * V[j * n2:(j + 1) * n2, :]
    if squeeze:
        out = [W[:, 0] for W in out]
    return out


def c1_constant_blocks_dense(problem, groups=None):
    """Dense N x N blocks of the shifted linear operator (small problems only)."""
    _check_dense_guard(problem)
    groups = groups or derive_theta_groups(problem)
    mats = c1_block_matvecs(problem, np.eye(problem.N), groups)
    return groups.theta_C1, mats


def g_constant_terms(problem):
    """Affine terms (monomial, G_t) of G = B B^T for the Riccati kind."""
    if problem.kind != CONTINUOUS_RICCATI:
        raise ValueError("G terms exist only for the Riccati kind")
    g_fam = affine_product(problem.B_family, transpose_family(problem.B_family))
    return list(g_fam.terms)
