"""Column-major vectorization and the duplicate-free symmetric Kronecker square."""

from functools import lru_cache

import numpy as np


def vec(X):
    """Column-major stacking of a matrix into a vector."""
    return np.asarray(X, dtype=float).ravel(order="F")


def unvec(x, p, q=None):
    """Inverse of vec: reshape a length-p*q vector into a p x q matrix."""
    q = p if q is None else q
    x = np.asarray(x, dtype=float)
    if x.size != p * q:
        raise ValueError(f"cannot reshape length {x.size} into ({p}, {q})")
    return x.reshape((p, q), order="F")


def sym_square_len(t):
    """Length of the compressed square of a length-t vector: t(t+1)/2."""
    return t * (t + 1) // 2


def pair_index(i, j):
    """1-based position of the product x_i*x_j (j <= i) in the compressed square."""
    if not 1 <= j <= i:
        raise ValueError(f"need 1 <= j <= i, got (i, j) = ({i}, {j})")
    return i * (i - 1) // 2 + j


@lru_cache(maxsize=None)
def _tril_pairs(t):
    i, j = np.tril_indices(t)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def sym_square(x):
    """Duplicate-free quadratic terms: entry pair_index(i, j) is x_i * x_j."""
    x = np.asarray(x, dtype=float)
    i, j = _tril_pairs(x.size)
    return x[i] * x[j]


def sym_square_jacobian(x):
    """Jacobian of sym_square: row (i, j) has x_j at column i and x_i at column j."""
    x = np.asarray(x, dtype=float)
    t = x.size
    i, j = _tril_pairs(t)
    m = i.size
    J = np.zeros((m, t))
    rows = np.arange(m)
    np.add.at(J, (rows, i), x[j])
    np.add.at(J, (rows, j), x[i])
    return J
