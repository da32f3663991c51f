"""Learning reduced operators from projected snapshots by regularized regression."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .affine import theta_vector
from .problems import ThetaGroups, derive_theta_groups
from .vectorize import sym_square, sym_square_len

# Default hyperparameter grid: zero plus a coarse log sweep.
DEFAULT_LAMBDA_GRID = (0.0,) + tuple(10.0 ** e for e in range(-12, 5, 2))

# Singular values below max-dim * sigma_1 * this factor count as rank loss.
RANK_THRESHOLD_FACTOR = 1e-12


class RankDeficiencyError(ValueError):
    """The unregularized regression matrix does not determine the operators."""


class TrainingError(RuntimeError):
    """No hyperparameter candidate produced a solvable reduced model."""


@dataclass(eq=False)
class TrainingData:
    """Projected states, compressed squares, and theta samples, row per parameter."""

    Xhat: np.ndarray        # (k, r)
    Xhat2: np.ndarray       # (k, q(r))
    Theta_C2: np.ndarray    # (k, n_C2)
    Theta_C1: np.ndarray    # (k, n_C1)
    Theta_C0: np.ndarray    # (k, n_C0)
    parameters: np.ndarray  # (k, d)
    theta_groups: ThetaGroups

    @property
    def k(self):
        return self.Xhat.shape[0]

    @property
    def r(self):
        return self.Xhat.shape[1]

    @property
    def p(self):
        r = self.r
        return (sym_square_len(r) * self.Theta_C2.shape[1]
                + r * self.Theta_C1.shape[1] + self.Theta_C0.shape[1])


@dataclass(eq=False)
class ReducedModel:
    """Inferred (or projected) reduced operators with their monomial groups."""

    C2_ops: tuple           # n_C2 arrays, each (r, q(r))
    C1_ops: tuple           # n_C1 arrays, each (r, r)
    C0_ops: tuple           # n_C0 arrays, each (r,)
    theta_groups: ThetaGroups
    r: int
    lam: tuple
    basis_ref: str = ""
    method: str = "opinf"
    training_mse: float | None = None

    @property
    def p(self):
        r = self.r
        return (sym_square_len(r) * len(self.C2_ops)
                + r * len(self.C1_ops) + len(self.C0_ops))


def assemble_training(problem, basis, snapshots, groups=None):
    """Project snapshots and evaluate the monomial groups at each parameter."""
    groups = groups or derive_theta_groups(problem)
    V = basis.V
    if V.shape[0] != snapshots.states.shape[0]:
        raise ValueError(
            f"basis rows {V.shape[0]} != snapshot rows {snapshots.states.shape[0]}")
    Xhat = (V.T @ snapshots.states).T
    Xhat2 = np.array([sym_square(row) for row in Xhat]) if Xhat.shape[0] else \
        np.zeros((0, sym_square_len(V.shape[1])))
    params = snapshots.parameters
    k = params.shape[0]

    def theta_block(monomials):
        if not monomials:
            return np.zeros((k, 0))
        return np.array([theta_vector(monomials, mu) for mu in params])

    return TrainingData(Xhat=Xhat, Xhat2=Xhat2,
                        Theta_C2=theta_block(groups.theta_C2),
                        Theta_C1=theta_block(groups.theta_C1),
                        Theta_C0=theta_block(groups.theta_C0),
                        parameters=params, theta_groups=groups)


def assemble_data_matrix(td):
    """Data matrix D with row i = [theta_C2 (x) xhat2 | theta_C1 (x) xhat | theta_C0].

    Blocks are monomial-major: for each quadratic monomial a q(r)-wide block,
    then for each linear monomial an r-wide block, then the constant block.
    """
    k = td.k
    d2 = np.einsum("kj,kq->kjq", td.Theta_C2, td.Xhat2).reshape(k, -1)
    d1 = np.einsum("kj,kr->kjr", td.Theta_C1, td.Xhat).reshape(k, -1)
    return np.hstack([d2, d1, td.Theta_C0])


def solve_regularized_lsq(D, Xhat, lam1, lam2, n_quad_cols=0):
    """Minimize ||D O - Xhat||_F^2 + ||Lambda O||_F^2 over stacked operators.

    Lambda is diagonal: lam2 weights the first `n_quad_cols` coefficients
    (the quadratic blocks), lam1 the remaining linear and constant blocks.
    Solved through a QR factorization of the stacked system [D; Lambda]
    rather than the normal equations.

    Returns the stacked operator matrix of shape (p, r).
    """
    if lam1 < 0 or lam2 < 0:
        raise ValueError("regularization weights must be nonnegative")
    D = np.asarray(D, dtype=float)
    Xhat = np.asarray(Xhat, dtype=float)
    k, p = D.shape
    if p == 0:
        raise ValueError("empty data matrix")
    weights = np.concatenate([np.full(n_quad_cols, float(lam2)),
                              np.full(p - n_quad_cols, float(lam1))])
    stacked = np.vstack([D, np.diag(weights)])
    rhs = np.vstack([Xhat, np.zeros((p, Xhat.shape[1]))])
    Q, R = la.qr(stacked, mode="economic")
    diag = np.abs(np.diag(R))
    if np.min(diag) <= max(stacked.shape) * np.max(diag) * np.finfo(float).eps:
        raise RankDeficiencyError(
            "regression matrix is rank-deficient; use a positive smallest "
            "lambda or add training samples")
    return la.solve_triangular(R, Q.T @ rhs)


def unpack_stacked(O, r, n_c2, n_c1, n_c0):
    """Split a stacked (p, r) operator matrix into the per-monomial operators."""
    q = sym_square_len(r)
    C2 = tuple(O[i * q:(i + 1) * q, :].T.copy() for i in range(n_c2))
    off = q * n_c2
    C1 = tuple(O[off + i * r:off + (i + 1) * r, :].T.copy() for i in range(n_c1))
    off += r * n_c1
    C0 = tuple(O[off + i, :].copy() for i in range(n_c0))
    return C2, C1, C0


def pack_operators(C2_ops, C1_ops, C0_ops):
    """Inverse of unpack_stacked: stack the operators into a (p, r) matrix."""
    rows = [op.T for op in C2_ops] + [op.T for op in C1_ops] \
        + [op.reshape(1, -1) for op in C0_ops]
    return np.vstack(rows)


def model_from_stacked(td, O, lam, basis_ref="", method="opinf",
                       training_mse=None):
    groups = td.theta_groups
    C2, C1, C0 = unpack_stacked(O, td.r, *groups.counts)
    return ReducedModel(C2_ops=C2, C1_ops=C1, C0_ops=C0, theta_groups=groups,
                        r=td.r, lam=tuple(lam), basis_ref=basis_ref,
                        method=method, training_mse=training_mse)


def _numerical_rank(M):
    """Numerical rank after column equilibration.

    Columns are scaled to unit norm first: the factors mix the snapshot
    singular-value scales into the columns, and rank loss from scaling alone
    would flag every fast-decaying instance as deficient.  Exact (structural)
    dependencies survive equilibration.
    """
    if min(M.shape) == 0:
        return 0
    norms = np.linalg.norm(M, axis=0)
    nonzero = norms > 0.0
    if not np.any(nonzero):
        return 0
    scaled = M[:, nonzero] / norms[nonzero]
    sv = np.linalg.svd(scaled, compute_uv=False)
    return int(np.sum(sv > max(M.shape) * sv[0] * RANK_THRESHOLD_FACTOR))


@dataclass(eq=False)
class RankDiagnostics:
    """Numerical ranks of the data matrix and its factors (advisory only)."""

    k: int
    p: int
    entries: dict

    @property
    def samples_exceed_p(self):
        return self.k > self.p

    @property
    def all_full_rank(self):
        return all(full for _, _, full in self.entries.values())

    def summary(self):
        return {
            "k": self.k,
            "p": self.p,
            "samples_exceed_p": self.samples_exceed_p,
            "entries": {name: {"rank": rank, "columns": cols, "full": full}
                        for name, (rank, cols, full) in self.entries.items()},
        }


def rank_diagnostics(td, D=None):
    """Report the column ranks needed for a unique unregularized solution."""
    if D is None:
        D = assemble_data_matrix(td)
    factors = {
        "D": D,
        "Theta_C2": td.Theta_C2,
        "Theta_C1": td.Theta_C1,
        "Theta_C0": td.Theta_C0,
        "Xhat2": td.Xhat2,
        "Xhat": td.Xhat,
    }
    entries = {}
    for name, M in factors.items():
        rank = _numerical_rank(M)
        cols = M.shape[1]
        entries[name] = (rank, cols, rank == cols)
    return RankDiagnostics(k=td.k, p=D.shape[1], entries=entries)


def training_mean_squared_error(model, td, rom_solver):
    """Mean squared gap between projected data and the candidate model states."""
    total = 0.0
    for i in range(td.k):
        xbar = rom_solver(model, td.parameters[i])
        total += float(np.sum((td.Xhat[i] - xbar) ** 2))
    return total / td.k


def _default_rom_solver(model, mu):
    from .rom import rom_solve
    report = rom_solve(model, mu)
    if not report.converged:
        raise TrainingError(f"candidate model did not converge at mu = {mu}")
    return report.xhat


def select_hyperparameters(grid1, grid2, td, rom_solver=None, basis_ref=""):
    """Exhaustive grid search minimizing the mean squared training error.

    Candidates whose regression or reduced solve fails at any training
    parameter score infinity; ties break to the lexicographically smallest
    (lam1, lam2).
    """
    grid1 = sorted(float(g) for g in grid1)
    grid2 = sorted(float(g) for g in grid2)
    if not grid1 or not grid2:
        raise ValueError("hyperparameter grids must be nonempty")
    if td.Theta_C2.shape[1] == 0:
        # lam2 multiplies nothing; the lexicographic tie-break would pick the
        # smallest value anyway
        grid2 = [grid2[0]]
    rom_solver = rom_solver or _default_rom_solver
    D = assemble_data_matrix(td)
    n_quad = sym_square_len(td.r) * td.Theta_C2.shape[1]
    best = (None, None, np.inf)
    for lam1 in grid1:
        for lam2 in grid2:
            try:
                O = solve_regularized_lsq(D, td.Xhat, lam1, lam2, n_quad)
                model = model_from_stacked(td, O, (lam1, lam2), basis_ref)
                mse = training_mean_squared_error(model, td, rom_solver)
            except Exception:
                mse = np.inf
            if mse < best[2]:
                best = (lam1, lam2, mse)
    if best[0] is None or not np.isfinite(best[2]):
        raise TrainingError("every hyperparameter candidate failed")
    return best


def train_from_data(td, grid1=None, grid2=None, basis_ref="", rom_solver=None):
    """Search the grids, solve at the winner, and unpack the reduced model."""
    grid1 = DEFAULT_LAMBDA_GRID if grid1 is None else grid1
    grid2 = DEFAULT_LAMBDA_GRID if grid2 is None else grid2
    lam1, lam2, mse = select_hyperparameters(grid1, grid2, td,
                                             rom_solver=rom_solver,
                                             basis_ref=basis_ref)
    D = assemble_data_matrix(td)
    n_quad = sym_square_len(td.r) * td.Theta_C2.shape[1]
    O = solve_regularized_lsq(D, td.Xhat, lam1, lam2, n_quad)
    return model_from_stacked(td, O, (lam1, lam2), basis_ref,
                              training_mse=mse)


def train(problem, basis, snapshots, grid1=None, grid2=None):
    """End-to-end operator learning from a basis and a snapshot set."""
    td = assemble_training(problem, basis, snapshots)
    basis_ref = f"{basis.method}:r={basis.r}"
    if problem.name:
        basis_ref += f":problem={problem.name}"
    return train_from_data(td, grid1=grid1, grid2=grid2, basis_ref=basis_ref)
