"""The four benchmark equation families at configurable matrix order."""

import numpy as np

from .affine import AffineFamily, ThetaMonomial
from .problems import (CONTINUOUS_LYAPUNOV, CONTINUOUS_RICCATI,
                       COUPLED_LYAPUNOV, DISCRETE_LYAPUNOV, ProblemDefinition)


def _band(n, offset, value):
    return np.diag(np.full(n - abs(offset), value), offset)


def _family(term_specs, d):
    return AffineFamily.from_terms(
        [(ThetaMonomial(1.0, exps), M) for exps, M in term_specs], d=d)


def pale_ct_problem(n=128):
    """Continuous Lyapunov family on [0.1, 2] with banded triangular data."""
    if n < 3:
        raise ValueError("this family needs n >= 3")
    A1 = 5.0 * np.eye(n) + _band(n, 1, 0.3) + _band(n, 2, 0.3)
    A2 = _band(n, -1, 0.2) + _band(n, -2, 0.2)
    M1 = np.zeros((1, n))
    M1[0, 0] = M1[0, -1] = 0.2
    M2 = np.full((1, n), 0.2)
    M2[0, 0] = M2[0, -1] = 0.0
    return ProblemDefinition(
        kind=CONTINUOUS_LYAPUNOV, n=n, s=1, d=1,
        A_families=(_family([((-1,), A1), ((-2,), A2)], d=1),),
        M_families=(_family([((-1,), M1), ((0,), M2)], d=1),),
        domain=((0.1, 2.0),),
        name=f"pale-ct-n{n}")


def pale_dt_problem(n=64):
    """Discrete Lyapunov family on the two-parameter box [2, 6]^2."""
    if n < 3:
        raise ValueError("this family needs n >= 3")
    A1 = 15.0 * np.eye(n)
    A2 = _band(n, 1, 1.0) + _band(n, -1, 0.5)
    A3 = _band(n, 2, 1.0) + _band(n, -2, 0.5)
    M1 = np.full((1, n), 0.1)
    M1[0, -1] = -0.9
    M2 = np.zeros((1, n))
    M2[0, -1] = 1.0
    return ProblemDefinition(
        kind=DISCRETE_LYAPUNOV, n=n, s=1, d=2,
        A_families=(_family([((1, 0), A1), ((-1, 0), A2), ((0, 1), A3)], d=2),),
        M_families=(_family([((1, 0), M1), ((0, 0), M2)], d=2),),
        domain=((2.0, 6.0), (2.0, 6.0)),
        name=f"pale-dt-n{n}")


def pale_coupled_problem(n=16):
    """Two coupled continuous Lyapunov equations on [1, 2]."""
    if n < 2:
        raise ValueError("this family needs n >= 2")
    A11 = 10.0 * np.eye(n)
    A12 = _band(n, 1, 2.0) + _band(n, -1, 3.0)
    A21 = 8.0 * np.eye(n)
    A22 = _band(n, 1, 1.0) + _band(n, -1, 2.0)
    M11 = np.zeros((1, n))
    M11[0, 0] = 1.0
    M12 = np.zeros((1, n))
    M12[0, -1] = 1.0
    # coupling: equation 1 carries -X1 + X2, equation 2 carries X1 - X2
    Pi = np.array([[-1.0, 1.0], [1.0, -1.0]])
    return ProblemDefinition(
        kind=COUPLED_LYAPUNOV, n=n, s=2, d=1,
        A_families=(_family([((-1,), A11), ((-2,), A12)], d=1),
                    _family([((1,), A21), ((2,), A22)], d=1)),
        M_families=(_family([((1,), M11), ((0,), M12)], d=1),
                    _family([((-1,), 2.0 * M11), ((0,), 2.0 * M12)], d=1)),
        coupling=Pi,
        domain=((1.0, 2.0),),
        name=f"pale-coupled-n{n}")


def pare_ct_problem(n=64):
    """Continuous Riccati family on [0.1, 5] with a stable banded A."""
    if n < 3:
        raise ValueError("this family needs n >= 3")
    A1 = -30.0 * np.eye(n) + _band(n, 1, -3.0) + _band(n, -1, 2.0)
    A2 = _band(n, 1, -3.0) + _band(n, 2, -4.0) + _band(n, -1, 2.0) + _band(n, -2, 2.0)
    B1 = np.full((n, 1), 0.2)
    M1 = np.full((1, n), 0.1)
    return ProblemDefinition(
        kind=CONTINUOUS_RICCATI, n=n, s=1, d=1,
        A_families=(_family([((-1,), A1), ((-2,), A2)], d=1),),
        M_families=(_family([((-1,), M1)], d=1),),
        B_family=_family([((1,), B1)], d=1),
        domain=((0.1, 5.0),),
        name=f"pare-ct-n{n}")


FAMILY_BUILDERS = {
    "pale-ct": pale_ct_problem,
    "pale-dt": pale_dt_problem,
    "pale-coupled": pale_coupled_problem,
    "pare-ct": pare_ct_problem,
}

# Default sizes for the bench pipeline, chosen to run in minutes on a laptop.
BENCH_DEFAULTS = {
    "pale-ct": {"n": 128, "r_values": (4, 8), "train_count": 200,
                "test_count": 1000, "sampling": "log"},
    "pale-dt": {"n": 64, "r_values": (3, 6), "train_count": 196,
                "test_count": 1000, "sampling": "grid"},
    "pale-coupled": {"n": 16, "r_values": (8,), "train_count": 100,
                     "test_count": 200, "sampling": "log"},
    # uniform spacing here: log spacing under-samples the slow large-mu end
    # and roughly triples the average test error at r = 6
    "pare-ct": {"n": 64, "r_values": (4, 6), "train_count": 200,
                "test_count": 1000, "sampling": "grid"},
}


def benchmark_problem(family, n=None):
    """Build one of the named benchmark families at the given (or default) n."""
    if family not in FAMILY_BUILDERS:
        raise ValueError(
            f"unknown family {family!r}; expected one of {sorted(FAMILY_BUILDERS)}")
    if n is None:
        n = BENCH_DEFAULTS[family]["n"]
    return FAMILY_BUILDERS[family](n)
