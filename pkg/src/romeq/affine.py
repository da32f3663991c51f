"""Affine parameter dependence: signed monomial functions and matrix families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Merged coefficients below this relative size are treated as exact
# cancellation of floating-point products and dropped.
MERGE_RTOL = 1e-14


class ThetaDomainError(ValueError):
    """A monomial with a negative exponent was evaluated at a zero component."""


@dataclass(frozen=True)
class ThetaMonomial:
    """Signed monomial  mu -> coefficient * prod_j mu_j ** exponents[j]."""

    coefficient: float
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficient", float(self.coefficient))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))

    @property
    def d(self):
        return len(self.exponents)

    def __call__(self, mu):
        return evaluate_theta(self, mu)


def constant_monomial(d):
    """The function theta == 1 on a d-dimensional parameter space."""
    return ThetaMonomial(1.0, (0,) * d)


def evaluate_theta(theta, mu):
    """Evaluate coefficient * prod_j mu_j**e_j at the parameter vector mu."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if mu.shape != (theta.d,):
        raise ValueError(
            f"expected a parameter of length {theta.d}, got shape {mu.shape}")
    value = theta.coefficient
    for m, e in zip(mu, theta.exponents):
        if e == 0:
            continue
        if m == 0.0 and e < 0:
            raise ThetaDomainError(
                f"parameter component is zero but exponent {e} is negative")
        value *= float(m) ** e
    return float(value)


def theta_product(a, b):
    """Product of two monomials: coefficients multiply, exponents add."""
    if a.d != b.d:
        raise ValueError("parameter dimensions differ")
    return ThetaMonomial(a.coefficient * b.coefficient,
                         tuple(x + y for x, y in zip(a.exponents, b.exponents)))


def canonicalize_monomials(monomials):
    """Merge equal exponent vectors, drop cancelled terms, sort lexicographically."""
    merged: dict[tuple, float] = {}
    for m in monomials:
        merged[m.exponents] = merged.get(m.exponents, 0.0) + m.coefficient
    if merged:
        scale = max(abs(c) for c in merged.values())
        merged = {e: c for e, c in merged.items()
                  if scale > 0.0 and abs(c) > MERGE_RTOL * scale}
    return tuple(ThetaMonomial(c, e) for e, c in sorted(merged.items()))


def dedup_exponents(monomials):
    """Unit-coefficient monomials over the distinct exponent vectors, sorted."""
    return tuple(ThetaMonomial(1.0, e)
                 for e in sorted({m.exponents for m in monomials}))


def theta_vector(monomials, mu):
    """Evaluate a monomial list at mu, returned as a 1-D array."""
    return np.array([evaluate_theta(m, mu) for m in monomials], dtype=float)


@dataclass(frozen=True, eq=False)
class AffineFamily:
    """Matrix family  mu -> sum_j theta_j(mu) * M_j  of fixed shape.

    Term lists are canonical: one term per exponent vector (coefficients are
    folded into the constant matrices, so every stored monomial carries
    coefficient 1), ordered lexicographically by exponent vector.  Instances
    are immutable and safe to share across workers.
    """

    terms: tuple
    shape: tuple[int, int]
    d: int

    @classmethod
    def from_terms(cls, terms, shape=None, d=None):
        """Build a canonical family from (ThetaMonomial, matrix) pairs."""
        items = []
        for theta, M in terms:
            M = np.asarray(M, dtype=float)
            if M.ndim != 2:
                raise ValueError("term matrices must be 2-D")
            if shape is None:
                shape = M.shape
            elif M.shape != tuple(shape):
                raise ValueError(
                    f"term matrix shape {M.shape} differs from family shape {tuple(shape)}")
            if d is None:
                d = theta.d
            elif theta.d != d:
                raise ValueError("inconsistent parameter dimension across terms")
            items.append((theta, M))
        if shape is None or d is None:
            raise ValueError("an empty family needs an explicit shape and d")

        merged: dict[tuple, np.ndarray] = {}
        for theta, M in items:
            scaled = theta.coefficient * M
            e = theta.exponents
            merged[e] = merged[e] + scaled if e in merged else scaled
        if merged:
            scale = max(np.max(np.abs(M)) for M in merged.values())
            merged = {e: M for e, M in merged.items()
                      if scale > 0.0 and np.max(np.abs(M)) > MERGE_RTOL * scale}
        out = []
        for e in sorted(merged):
            M = merged[e]
            M.setflags(write=False)
            out.append((ThetaMonomial(1.0, e), M))
        return cls(terms=tuple(out), shape=tuple(shape), d=int(d))

    @property
    def monomials(self):
        return tuple(theta for theta, _ in self.terms)

    def __call__(self, mu):
        return assemble(self, mu)


def assemble(family, mu):
    """Evaluate the family at mu: sum_j theta_j(mu) * M_j."""
    out = np.zeros(family.shape)
    for theta, M in family.terms:
        out += evaluate_theta(theta, mu) * M
    return out


def transpose_family(F):
    """Family of the transposed matrices; assemble commutes with transpose."""
    return AffineFamily.from_terms(
        [(theta, M.T) for theta, M in F.terms],
        shape=(F.shape[1], F.shape[0]), d=F.d)


def affine_product(F, G):
    """Family of the matrix product: terms are all pairwise products, merged.

    assemble(affine_product(F, G), mu) == assemble(F, mu) @ assemble(G, mu)
    for every valid mu.
    """
    if F.shape[1] != G.shape[0]:
        raise ValueError(f"inner dimensions differ: {F.shape} x {G.shape}")
    if F.d != G.d:
        raise ValueError("parameter dimensions differ")
    terms = [(theta_product(tf, tg), Mf @ Mg)
             for tf, Mf in F.terms for tg, Mg in G.terms]
    return AffineFamily.from_terms(terms, shape=(F.shape[0], G.shape[1]), d=F.d)


def add_families(F, G):
    """Sum of two families of equal shape (term concatenation + canonicalize)."""
    if F.shape != G.shape:
        raise ValueError(f"shapes differ: {F.shape} vs {G.shape}")
    if F.d != G.d:
        raise ValueError("parameter dimensions differ")
    return AffineFamily.from_terms(list(F.terms) + list(G.terms),
                                   shape=F.shape, d=F.d)
