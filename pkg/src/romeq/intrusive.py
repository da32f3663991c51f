"""Galerkin projection baseline built from the assembled full-order operators.

This is the path the surrogate learning avoids at scale: it needs the
full-order operator actions explicitly, so it carries dimension guards and is
meant for small-scale comparisons and as the consistency oracle for the
learned operators.
"""

import numpy as np

from . import vecform
from .opinf import ReducedModel
from .problems import CONTINUOUS_RICCATI, derive_theta_groups
from .vectorize import sym_square_len, unvec, vec

# Full-state bound for the linear projections (operator actions, not dense).
LINEAR_GUARD_N = 65536
# Matrix-order bound for the quadratic projection (r * q(r) basis-pair products).
QUADRATIC_GUARD_n = 64


def project_linear_ops(problem, V, groups=None):
    """Projected constant blocks of the shifted linear and constant operators.

    Returns (C1_ops, C0_ops) in the monomial order of the problem's theta
    groups; the identity shift of the fixed-point form is included.
    """
    if problem.N > LINEAR_GUARD_N:
        raise ValueError(
            f"intrusive projection limited to N <= {LINEAR_GUARD_N}, got {problem.N}")
    V = np.asarray(getattr(V, "V", V), dtype=float)
    groups = groups or derive_theta_groups(problem)
    matvecs = vecform.c1_block_matvecs(problem, V, groups)
    C1_ops = tuple(V.T @ W for W in matvecs)
    c0 = vecform.c0_constant_blocks(problem, groups)
    C0_ops = tuple(V.T @ c0[t] for t in range(c0.shape[0]))
    return C1_ops, C0_ops


def quadratic_galerkin_operator(G, V):
    """The r x q(r) operator h with V^T vec(X G X) = h @ sym_square(V^T x).

    The defining property holds whenever x = V xhat and X = unvec(x) is
    symmetric.  Columns are built from basis-pair products: position (a, b)
    with b < a carries vec(X_a G X_b + X_b G X_a), the diagonal position
    (a, a) carries vec(X_a G X_a), matching the plain-product compressed
    layout.
    """
    V = np.asarray(V, dtype=float)
    N, r = V.shape
    n = int(round(np.sqrt(N)))
    if n * n != N:
        raise ValueError(f"basis rows {N} are not a square matrix dimension")
    Xc = [unvec(V[:, a], n) for a in range(r)]
    GX = [G @ X for X in Xc]
    out = np.empty((r, sym_square_len(r)))
    pos = 0
    for a in range(r):
        for b in range(a + 1):
            if a == b:
                S = Xc[a] @ GX[a]
            else:
                S = Xc[a] @ GX[b] + Xc[b] @ GX[a]
            out[:, pos] = V.T @ vec(S)
            pos += 1
    return out


def project_quadratic_op(problem, V, groups=None):
    """Projected quadratic blocks for the Riccati kind, one per G monomial.

    The equation's quadratic part is -X G X, so each block is the negated
    Galerkin operator of the corresponding constant G term.
    """
    if problem.kind != CONTINUOUS_RICCATI:
        raise ValueError("quadratic projection applies to the Riccati kind only")
    if problem.n > QUADRATIC_GUARD_n:
        raise ValueError(
            f"quadratic projection limited to n <= {QUADRATIC_GUARD_n}, got {problem.n}")
    V = np.asarray(getattr(V, "V", V), dtype=float)
    groups = groups or derive_theta_groups(problem)
    terms = vecform.g_constant_terms(problem)
    by_exponent = {theta.exponents: Gt for theta, Gt in terms}
    ops = []
    for theta in groups.theta_C2:
        Gt = by_exponent[theta.exponents]
        ops.append(-quadratic_galerkin_operator(Gt, V))
    return tuple(ops)


def intrusive_rom(problem, basis):
    """Reduced model from direct Galerkin projection of the full operators."""
    V = np.asarray(getattr(basis, "V", basis), dtype=float)
    groups = derive_theta_groups(problem)
    C1_ops, C0_ops = project_linear_ops(problem, V, groups)
    if problem.kind == CONTINUOUS_RICCATI:
        C2_ops = project_quadratic_op(problem, V, groups)
    else:
        C2_ops = ()
    method = getattr(basis, "method", "basis")
    ref = f"{method}:r={V.shape[1]}"
    if problem.name:
        ref += f":problem={problem.name}"
    return ReducedModel(C2_ops=C2_ops, C1_ops=C1_ops, C0_ops=C0_ops,
                        theta_groups=groups, r=V.shape[1], lam=(0.0, 0.0),
                        basis_ref=ref, method="intrusive")
