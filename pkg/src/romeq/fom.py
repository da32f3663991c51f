"""High-fidelity solvers for the four matrix-equation classes, plus dense oracles.

The Lyapunov solves are delegated to the Schur-based LAPACK paths exposed by
scipy (Bartels-Stewart for the continuous form, the bilinear transformation
for the Stein form); the coupled and Riccati solvers are built on top of them.
``kronecker_oracle_solve`` provides an independent dense route through the
vectorized system for cross-validation, and ``hamiltonian_riccati_oracle``
an invariant-subspace route for the Riccati equation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import vecform
from .problems import (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI,
                       COUPLED_LYAPUNOV, DISCRETE_LYAPUNOV)
from .vectorize import unvec, vec

_TINY = np.finfo(float).tiny


class SolverError(RuntimeError):
    """A full-order solve failed or produced an unacceptable residual."""


@dataclass(frozen=True, eq=False)
class FomSolution:
    """Solution blocks of one full-order solve with its residual record."""

    X_blocks: tuple
    residual_norm: float
    iterations: int


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    X: np.ndarray
    iterations: int
    residual_history: tuple


def _sym(X):
    return 0.5 * (X + X.T)


def solve_continuous_lyapunov(A, Q):
    """Solve the continuous Lyapunov equation A^T X + X A + Q = 0.

    Parameters
    ----------
    A : (n, n) ndarray
        Coefficient matrix; A and -A must share no eigenvalues.
    Q : (n, n) ndarray
        Symmetric right-hand side term.

    Returns
    -------
    X : (n, n) ndarray
        Symmetric solution, symmetrized after the Schur-based solve.
    """
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    X = la.solve_continuous_lyapunov(A.T, -Q)
    X = _sym(X)
    res = np.linalg.norm(A.T @ X + X @ A + Q)
    scale = (np.linalg.norm(A) * np.linalg.norm(X) + np.linalg.norm(Q) + _TINY)
    if not np.isfinite(res) or res > 1e-10 * scale:
        w = np.linalg.eigvals(A)
        sums = np.add.outer(w, w)
        closest = np.min(np.abs(sums))
        raise SolverError(
            "continuous Lyapunov solve failed: relative residual "
            f"{res / scale:.3e}; min |lambda_i + lambda_j| = {closest:.3e}")
    return X


def solve_discrete_lyapunov(A, Q):
    """Solve the discrete (Stein) equation A^T X A - X + Q = 0.

    Uses the bilinear transformation to a continuous Lyapunov equation, which
    is valid whenever no pair of eigenvalues of A has product 1.
    """
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    X = la.solve_discrete_lyapunov(A.T, Q, method="bilinear")
    X = _sym(X)
    res = np.linalg.norm(A.T @ X @ A - X + Q)
    scale = (np.linalg.norm(A) ** 2 * np.linalg.norm(X) + np.linalg.norm(X)
             + np.linalg.norm(Q) + _TINY)
    if not np.isfinite(res) or res > 1e-10 * scale:
        w = np.linalg.eigvals(A)
        prods = np.multiply.outer(w, w)
        closest = np.min(np.abs(prods - 1.0))
        raise SolverError(
            "discrete Lyapunov solve failed: relative residual "
            f"{res / scale:.3e}; min |lambda_i * lambda_j - 1| = {closest:.3e}")
    return X


def _coupled_residual(A_list, Pi, Q_list, X):
    num, den = 0.0, _TINY
    s = len(A_list)
    for i in range(s):
        R = A_list[i].T @ X[i] + X[i] @ A_list[i] + Q_list[i]
        den += (np.linalg.norm(A_list[i].T @ X[i])
                + np.linalg.norm(X[i] @ A_list[i]) + np.linalg.norm(Q_list[i]))
        for j in range(s):
            R = R + Pi[i, j] * X[j]
            den += abs(Pi[i, j]) * np.linalg.norm(X[j])
        num += np.linalg.norm(R) ** 2
    return float(np.sqrt(num) / den)


def solve_coupled_lyapunov(A_list, Pi, Q_list, tol=1e-10, max_sweeps=100):
    """Solve the coupled continuous Lyapunov system by Gauss-Seidel sweeps.

    Equation i is solved as a continuous Lyapunov equation with the coupling
    terms of the other blocks folded into the right-hand side; the diagonal
    coupling entry is absorbed as a shift A_i + (pi_ii / 2) I.  Falls back to
    one dense solve of the stacked system when the sweeps stall.

    Returns
    -------
    X_list : list of (n, n) ndarray
        Symmetric solution blocks.
    sweeps : int
        Number of Gauss-Seidel sweeps performed (0 for the dense fallback).
    """
    A_list = [np.asarray(A, dtype=float) for A in A_list]
    Q_list = [np.asarray(Q, dtype=float) for Q in Q_list]
    Pi = np.asarray(Pi, dtype=float)
    s = len(A_list)
    n = A_list[0].shape[0]
    I = np.eye(n)
    X = [np.zeros((n, n)) for _ in range(s)]
    history = []
    for sweep in range(1, max_sweeps + 1):
        for i in range(s):
            rhs = Q_list[i].copy()
            for j in range(s):
                if j != i and Pi[i, j] != 0.0:
                    rhs += Pi[i, j] * X[j]
            A_shift = A_list[i] + 0.5 * Pi[i, i] * I
            X[i] = solve_continuous_lyapunov(A_shift, rhs)
        history.append(_coupled_residual(A_list, Pi, Q_list, X))
        if history[-1] <= tol:
            return X, sweep
        if len(history) >= 4 and history[-1] > 0.25 * history[-4]:
            break  # stalling: less than 4x reduction over three sweeps
    # dense fallback on the stacked system
    N = s * n * n
    if N > vecform.DENSE_GUARD:
        raise SolverError(
            f"coupled sweeps did not converge (residual history {history}) "
            f"and N = {N} exceeds the dense fallback guard")
    op = np.kron(Pi, np.eye(n * n))
    for i in range(s):
        sl = slice(i * n * n, (i + 1) * n * n)
        op[sl, sl] += np.kron(I, A_list[i].T) + np.kron(A_list[i].T, I)
    rhs = -np.concatenate([vec(Q) for Q in Q_list])
    try:
        x = np.linalg.solve(op, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"coupled block operator is singular: {exc}") from exc
    X = [_sym(unvec(x[i * n * n:(i + 1) * n * n], n)) for i in range(s)]
    res = _coupled_residual(A_list, Pi, Q_list, X)
    if res > 1e-9:
        raise SolverError(
            f"coupled dense fallback residual {res:.3e} exceeds tolerance "
            f"(sweep history {history})")
    return X, 0


def _riccati_residual(A, G, Q, X):
    R = A.T @ X + X @ A - X @ G @ X + Q
    den = (np.linalg.norm(A.T @ X) + np.linalg.norm(X @ A)
           + np.linalg.norm(X @ G @ X) + np.linalg.norm(Q) + _TINY)
    return float(np.linalg.norm(R) / den)


def newton_kleinman(A, G, Q, tol=1e-11, max_iter=100):
    """Newton's method for A^T X + X A - X G X + Q = 0 from the zero matrix.

    Each step solves the continuous Lyapunov equation
    (A - G X_k)^T X_{k+1} + X_{k+1} (A - G X_k) + Q + X_k G X_k = 0.
    Requires A stable so that the zero start is stabilizing.

    Returns (X, residual_history).
    """
    A = np.asarray(A, dtype=float)
    G = np.asarray(G, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n = A.shape[0]
    X = np.zeros((n, n))
    history = []
    for _ in range(max_iter):
        A_cl = A - G @ X
        rhs = Q + X @ G @ X
        X = solve_continuous_lyapunov(A_cl, rhs)
        lam_min = float(np.min(np.linalg.eigvalsh(X)))
        if lam_min < -1e-8 * max(np.linalg.norm(X, 2), _TINY):
            raise SolverError(
                f"indefinite Newton iterate (min eigenvalue {lam_min:.3e}); aborted")
        history.append(_riccati_residual(A, G, Q, X))
        if history[-1] <= tol:
            return X, history
        if len(history) >= 2 and history[-1] >= 0.99 * history[-2]:
            # stagnation at the floating-point floor
            if history[-1] <= np.sqrt(tol):
                return X, history
            break
    raise SolverError(
        f"Newton iteration did not converge; residual history {history}")


def solve_continuous_riccati(A, G, Q, tol=1e-11, max_iter=100):
    """Solve A^T X + X A - X G X + Q = 0 for the symmetric PSD solution.

    A must be stable (all eigenvalue real parts negative), which makes the
    zero initial guess stabilizing; the iteration is Newton's method with a
    continuous Lyapunov solve per step.
    """
    A = np.asarray(A, dtype=float)
    max_re = float(np.max(np.linalg.eigvals(A).real))
    if max_re >= 0.0:
        raise SolverError(
            f"A is not stable (max Re(lambda) = {max_re:.3e}); "
            "the zero-start Newton iteration requires a stable A")
    X, history = newton_kleinman(A, G, Q, tol=tol, max_iter=max_iter)
    res = _riccati_residual(A, G, Q, X)
    if res > 1e-9:
        raise SolverError(f"Riccati relative residual {res:.3e} above tolerance")
    return RiccatiSolution(X=X, iterations=len(history),
                           residual_history=tuple(history))


def hamiltonian_riccati_oracle(A, G, Q):
    """Riccati solution from the stable invariant subspace of the Hamiltonian.

    Builds H = [[A, -G], [-Q, -A^T]], computes an ordered real Schur form with
    the stable eigenvalues leading, and recovers X = U2 U1^{-1} from the
    leading invariant-subspace basis.  Independent of the Newton iteration.
    """
    A = np.asarray(A, dtype=float)
    G = np.asarray(G, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n = A.shape[0]
    H = np.block([[A, -G], [-Q, -A.T]])
    _, Z, k = la.schur(H, output="real", sort="lhp")
    if k != n:
        raise SolverError(
            f"Hamiltonian has {k} stable eigenvalues, expected {n}")
    U1 = Z[:n, :n]
    U2 = Z[n:, :n]
    X = _sym(np.linalg.solve(U1.T, U2.T).T)
    return X


def kronecker_oracle_solve(problem, mu, tol=1e-12, max_iter=50):
    """Independent dense solve of the vectorized system (small N only).

    Linear kinds solve Cbar1(mu) x = -C0(mu) directly; the Riccati kind runs
    a damped Newton iteration on the vectorized residual with the explicit
    Kronecker Jacobian.
    """
    if problem.N > vecform.DENSE_GUARD:
        raise ValueError(
            f"oracle limited to N <= {vecform.DENSE_GUARD}, got {problem.N}")
    C1bar = vecform.dense_linear_operator(problem, mu)
    c0 = vecform.constant_term(problem, mu)
    if problem.kind != CONTINUOUS_RICCATI:
        try:
            x = np.linalg.solve(C1bar, -c0)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular vectorized operator: {exc}") from exc
        rel = vecform.relative_residual(problem, mu, x)
        if rel > 1e-10:
            raise SolverError(f"oracle relative residual {rel:.3e} above 1e-10")
        return x

    n = problem.n
    _, _, G = vecform.assembled_data(problem, mu)
    I_n = np.eye(n)

    def residual(xv):
        X = _sym(unvec(xv, n))
        return C1bar @ xv + c0 - vec(X @ G @ X)

    x = np.zeros(problem.N)
    r = residual(x)
    for _ in range(max_iter):
        scale = (np.linalg.norm(c0) + np.linalg.norm(C1bar @ x)
                 + np.linalg.norm(r - C1bar @ x - c0) + _TINY)
        if np.linalg.norm(r) <= tol * scale:
            break
        XG = _sym(unvec(x, n)) @ G
        J = C1bar - (np.kron(XG, I_n) + np.kron(I_n, XG))
        try:
            delta = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular oracle Jacobian: {exc}") from exc
        step = 1.0
        base = np.linalg.norm(r)
        for _ in range(30):
            x_try = x + step * delta
            r_try = residual(x_try)
            if np.linalg.norm(r_try) < base:
                break
            step *= 0.5
        x, r = x_try, r_try
    rel = vecform.relative_residual(problem, mu, vec(_sym(unvec(x, n))))
    if rel > 1e-10:
        raise SolverError(f"oracle Newton residual {rel:.3e} above 1e-10")
    return vec(_sym(unvec(x, n)))


def solve_problem(problem, mu):
    """Dispatch on the equation kind and solve at one parameter value."""
    A, Q, G = vecform.assembled_data(problem, mu)
    iterations = 0
    if problem.kind == CONTINUOUS_LYAPUNOV:
        blocks = [solve_continuous_lyapunov(A[0], Q[0])]
    elif problem.kind == DISCRETE_LYAPUNOV:
        blocks = [solve_discrete_lyapunov(A[0], Q[0])]
    elif problem.kind == COUPLED_LYAPUNOV:
        blocks, iterations = solve_coupled_lyapunov(A, problem.coupling, Q)
    elif problem.kind == CONTINUOUS_RICCATI:
        sol = solve_continuous_riccati(A[0], G, Q[0])
        blocks, iterations = [sol.X], sol.iterations
    else:  # pragma: no cover - guarded by ProblemDefinition
        raise ValueError(f"unknown kind {problem.kind!r}")
    x = vecform.stack_blocks(blocks)
    residual = vecform.relative_residual(problem, mu, x)
    return FomSolution(X_blocks=tuple(blocks), residual_norm=residual,
                       iterations=iterations)


def fom_solve(problem, mu):
    """Full-order state vector x(mu): the stacked vec(X_i(mu))."""
    return vecform.stack_blocks(solve_problem(problem, mu).X_blocks)
