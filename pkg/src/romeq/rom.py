"""Solving and evaluating the learned reduced fixed-point system."""

import warnings
from dataclasses import dataclass

import numpy as np

from .affine import theta_vector
from .fom import fom_solve
from .opinf import ReducedModel
from .util import parallel_map
from .vectorize import sym_square, sym_square_jacobian, sym_square_len


class RomSolveError(RuntimeError):
    """The reduced solve hit a singular system."""


@dataclass(eq=False)
class RomSolveReport:
    xhat: np.ndarray
    iterations: int
    residual_norm: float
    converged: bool
    residual_history: tuple


def reduced_operators_at(model, mu):
    """Theta-weighted operator sums (C2(mu), C1(mu), C0(mu)) at one parameter."""
    r = model.r
    groups = model.theta_groups
    C2 = np.zeros((r, sym_square_len(r)))
    for w, op in zip(theta_vector(groups.theta_C2, mu), model.C2_ops):
        C2 += w * op
    C1 = np.zeros((r, r))
    for w, op in zip(theta_vector(groups.theta_C1, mu), model.C1_ops):
        C1 += w * op
    C0 = np.zeros(r)
    for w, op in zip(theta_vector(groups.theta_C0, mu), model.C0_ops):
        C0 += w * op
    return C2, C1, C0


def rom_solve(model, mu, tol=1e-12, max_iter=100):
    """Solve xhat = C2(mu) xhat^2 + C1(mu) xhat + C0(mu) from a zero start.

    Without a quadratic part this is one linear solve; otherwise a damped
    Newton iteration on R(x) = C2 x^2 + (C1 - I) x + C0 with step halving
    whenever the residual norm fails to decrease.  Non-convergence within
    max_iter is reported, not raised.
    """
    C2, C1, C0 = reduced_operators_at(model, mu)
    r = model.r
    I = np.eye(r)
    threshold = tol * (1.0 + np.linalg.norm(C0))

    if not np.any(C2):
        try:
            xhat = np.linalg.solve(I - C1, C0)
        except np.linalg.LinAlgError as exc:
            raise RomSolveError(f"singular linear reduced system: {exc}") from exc
        res = float(np.linalg.norm(C1 @ xhat + C0 - xhat))
        return RomSolveReport(xhat=xhat, iterations=0, residual_norm=res,
                              converged=bool(res <= max(threshold, 1e-12)),
                              residual_history=(res,))

    def residual(x):
        return C2 @ sym_square(x) + (C1 - I) @ x + C0

    x = np.zeros(r)
    R = residual(x)
    history = [float(np.linalg.norm(R))]
    iterations = 0
    for _ in range(max_iter):
        if history[-1] <= threshold:
            break
        J = C2 @ sym_square_jacobian(x) + C1 - I
        try:
            delta = np.linalg.solve(J, -R)
        except np.linalg.LinAlgError as exc:
            raise RomSolveError(f"singular reduced Jacobian: {exc}") from exc
        step = 1.0
        accepted = False
        for _ in range(31):
            x_try = x + step * delta
            R_try = residual(x_try)
            if np.linalg.norm(R_try) < history[-1]:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # stagnated line search: report as non-converged
        x, R = x_try, R_try
        history.append(float(np.linalg.norm(R)))
        iterations += 1
    return RomSolveReport(xhat=x, iterations=iterations,
                          residual_norm=history[-1],
                          converged=bool(history[-1] <= threshold),
                          residual_history=tuple(history))


def truncate(model, w):
    """Restrict a model to its first w modes.

    Keeps the first w rows of the constant operators, the leading w x w block
    of the linear operators, and the first w rows and w(w+1)/2 columns of the
    quadratic operators (the compressed-square layout puts every pair from
    the first w coordinates in those columns).
    """
    if not 1 <= w < model.r:
        raise ValueError(f"truncation size must satisfy 1 <= w < {model.r}, got {w}")
    qw = sym_square_len(w)
    return ReducedModel(
        C2_ops=tuple(op[:w, :qw].copy() for op in model.C2_ops),
        C1_ops=tuple(op[:w, :w].copy() for op in model.C1_ops),
        C0_ops=tuple(op[:w].copy() for op in model.C0_ops),
        theta_groups=model.theta_groups,
        r=w,
        lam=model.lam,
        basis_ref=f"{model.basis_ref}|truncated={w}",
        method=model.method,
        training_mse=None,
    )


def predict_full(model, basis, mu, tol=1e-12, max_iter=100):
    """Lifted surrogate state V xhat(mu); raises if the reduced solve fails."""
    V = getattr(basis, "V", basis)
    if model.r > V.shape[1]:
        raise ValueError(f"model dimension {model.r} exceeds basis width {V.shape[1]}")
    V = V[:, :model.r]
    report = rom_solve(model, mu, tol=tol, max_iter=max_iter)
    if not report.converged:
        raise RomSolveError(
            f"reduced solve did not converge at mu = {mu} "
            f"(residual {report.residual_norm:.3e})")
    return V @ report.xhat


@dataclass(eq=False)
class EvalRecord:
    mu: np.ndarray
    rel_error: float
    iterations: int
    converged: bool
    excluded: bool = False


def avg_relative_error(model, basis, problem, test_params, workers=None):
    """Mean over test parameters of ||x - V xhat|| / ||x||.

    Returns (er_avg, records); non-converged reduced solves and zero-norm
    full-order solutions are excluded from the mean with a warning and kept
    in the records for reporting.
    """
    V = getattr(basis, "V", basis)
    if model.r > V.shape[1]:
        raise ValueError(f"model dimension {model.r} exceeds basis width {V.shape[1]}")
    V = V[:, :model.r]
    params = np.atleast_2d(np.asarray(test_params, dtype=float))
    truths = parallel_map(lambda mu: fom_solve(problem, mu), list(params),
                          workers=workers)
    records = []
    errors = []
    for mu, x in zip(params, truths):
        report = rom_solve(model, mu)
        norm_x = float(np.linalg.norm(x))
        if not report.converged:
            warnings.warn(f"reduced solve did not converge at mu = {mu}; "
                          "sample excluded from the average")
            records.append(EvalRecord(mu=mu, rel_error=float("nan"),
                                      iterations=report.iterations,
                                      converged=False, excluded=True))
            continue
        if norm_x == 0.0:
            warnings.warn(f"zero-norm full-order solution at mu = {mu}; "
                          "relative error undefined, sample excluded")
            records.append(EvalRecord(mu=mu, rel_error=float("nan"),
                                      iterations=report.iterations,
                                      converged=True, excluded=True))
            continue
        err = float(np.linalg.norm(x - V @ report.xhat) / norm_x)
        records.append(EvalRecord(mu=mu, rel_error=err,
                                  iterations=report.iterations, converged=True))
        errors.append(err)
    er_avg = float(np.mean(errors)) if errors else float("nan")
    return er_avg, records
