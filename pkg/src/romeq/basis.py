"""Snapshot collection and reduced-basis construction."""

from dataclasses import dataclass

import numpy as np

from .fom import SolverError, fom_solve
from .util import parallel_map

# Singular values below max(N, k) * sigma_1 * this factor count as rank loss.
RANK_THRESHOLD_FACTOR = 1e-12


@dataclass(eq=False)
class SnapshotSet:
    """Full-order states column by column with their parameters."""

    states: np.ndarray          # (N, k)
    parameters: np.ndarray      # (k, d)
    problem_ref: str = ""

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float)
        self.parameters = np.atleast_2d(np.asarray(self.parameters, dtype=float))
        if self.states.shape[1] != self.parameters.shape[0]:
            raise ValueError(
                f"{self.states.shape[1]} snapshot columns but "
                f"{self.parameters.shape[0]} parameters")

    @property
    def k(self):
        return self.states.shape[1]


@dataclass(eq=False)
class PodBasis:
    """Orthonormal basis columns plus the snapshot singular spectrum."""

    V: np.ndarray
    singular_values: np.ndarray
    method: str = "pod"

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=float)
        self.singular_values = np.asarray(self.singular_values, dtype=float)

    @property
    def r(self):
        return self.V.shape[1]


def build_snapshots(problem, training_params, workers=None):
    """Solve the full-order model at each parameter; columns keep input order."""
    params = np.atleast_2d(np.asarray(training_params, dtype=float))
    if params.shape[1] != problem.d:
        raise ValueError(
            f"parameters have {params.shape[1]} components, problem has d = {problem.d}")

    def solve_one(mu):
        try:
            return fom_solve(problem, mu)
        except Exception as exc:
            raise SolverError(f"full-order solve failed at mu = {mu}: {exc}") from exc

    columns = parallel_map(solve_one, list(params), workers=workers)
    return SnapshotSet(states=np.column_stack(columns), parameters=params,
                       problem_ref=problem.name)


def pod_basis(snapshots, r=None, energy=None):
    """Leading left singular vectors, truncated by rank or by energy.

    In energy mode the rank is the smallest r whose leading singular values
    capture at least a 1 - energy share of the total squared spectrum, so the
    squared relative reconstruction error is at most `energy`.
    """
    if (r is None) == (energy is None):
        raise ValueError("pass exactly one of r or energy")
    X = snapshots.states
    U, sv, _ = np.linalg.svd(X, full_matrices=False)
    if energy is not None:
        if not 0.0 <= energy < 1.0:
            raise ValueError(f"energy tolerance must lie in [0, 1), got {energy}")
        squared = sv ** 2
        cum = np.cumsum(squared)
        total = cum[-1]
        if total == 0.0:
            raise ValueError("zero snapshot matrix has no POD basis")
        r = int(np.argmax(cum >= (1.0 - energy) * total)) + 1
    else:
        r = int(r)
        if not 1 <= r <= snapshots.k:
            raise ValueError(f"rank {r} outside 1..{snapshots.k}")
        threshold = max(X.shape) * sv[0] * RANK_THRESHOLD_FACTOR
        numerical_rank = int(np.sum(sv > threshold))
        if r > numerical_rank:
            raise ValueError(
                f"rank {r} exceeds the numerical snapshot rank {numerical_rank}")
    return PodBasis(V=U[:, :r].copy(), singular_values=sv, method="pod")


def greedy_basis(snapshots, r):
    """Residual-maximizing column selection with orthonormalization.

    Picks the largest-norm column first, then the column with the largest
    residual after projection onto the current span; ties break to the lowest
    column index.
    """
    X = snapshots.states
    if not 1 <= r <= snapshots.k:
        raise ValueError(f"rank {r} outside 1..{snapshots.k}")
    init_max = float(np.max(np.linalg.norm(X, axis=0)))
    V = np.zeros((X.shape[0], 0))
    for _ in range(r):
        R = X - V @ (V.T @ X)
        norms = np.linalg.norm(R, axis=0)
        pick = int(np.argmax(norms))
        if norms[pick] <= 1e-12 * init_max:
            raise ValueError(
                f"greedy selection exhausted the snapshot rank at {V.shape[1]} columns")
        v = R[:, pick]
        v = v - V @ (V.T @ v)  # second orthogonalization pass
        V = np.column_stack([V, v / np.linalg.norm(v)])
    sv = np.linalg.svd(X, compute_uv=False)
    return PodBasis(V=V, singular_values=sv, method="greedy")


def randomized_basis(snapshots, r, seed):
    """Uniform sampling of r distinct columns, orthonormalized; seeded."""
    X = snapshots.states
    if not 1 <= r <= snapshots.k:
        raise ValueError(f"rank {r} outside 1..{snapshots.k}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(snapshots.k, size=r, replace=False)
    Q, R = np.linalg.qr(X[:, idx])
    diag = np.abs(np.diag(R))
    if np.min(diag) <= 1e-12 * max(np.max(diag), np.finfo(float).tiny):
        raise ValueError("sampled columns are rank-deficient below the requested rank")
    return PodBasis(V=Q, singular_values=np.linalg.svd(X, compute_uv=False),
                    method=f"randomized(seed={seed})")


def project(V, x):
    """Reduced coordinates V^T x (x may be a vector or a column stack)."""
    V = getattr(V, "V", V)
    return V.T @ x


def lift(V, xhat):
    """Full-order reconstruction V xhat."""
    V = getattr(V, "V", V)
    return V @ xhat


def pod_reconstruction_error(snapshots, basis):
    """Frobenius norm of X - V V^T X (for direct comparison against the spectrum)."""
    X = snapshots.states
    V = basis.V
    return float(np.linalg.norm(X - V @ (V.T @ X)))
