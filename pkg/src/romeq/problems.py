"""The four matrix-equation classes with their affine data and parameter domains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .affine import (AffineFamily, ThetaDomainError, affine_product, assemble,
                     constant_monomial, dedup_exponents, theta_product,
                     transpose_family)

CONTINUOUS_LYAPUNOV = "continuous-lyapunov"
DISCRETE_LYAPUNOV = "discrete-lyapunov"
COUPLED_LYAPUNOV = "coupled-lyapunov"
CONTINUOUS_RICCATI = "continuous-riccati"
KINDS = (CONTINUOUS_LYAPUNOV, DISCRETE_LYAPUNOV, COUPLED_LYAPUNOV,
         CONTINUOUS_RICCATI)


@dataclass(frozen=True, eq=False)
class ProblemDefinition:
    """One matrix-equation class with its affine data and parameter domain.

    The unknowns are s symmetric n x n matrices; the stacked state vector has
    dimension N = s * n**2.  A coupling matrix is required exactly for the
    coupled kind, an input family exactly for the Riccati kind.
    """

    kind: str
    n: int
    s: int
    d: int
    A_families: tuple
    M_families: tuple
    domain: tuple
    B_family: AffineFamily | None = None
    coupling: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "A_families", tuple(self.A_families))
        object.__setattr__(self, "M_families", tuple(self.M_families))
        object.__setattr__(self, "domain",
                           tuple((float(lo), float(hi)) for lo, hi in self.domain))
        if self.s < 1:
            raise ValueError("s must be at least 1")
        if self.kind != COUPLED_LYAPUNOV and self.s != 1:
            raise ValueError(f"kind {self.kind} requires s = 1")
        if len(self.A_families) != self.s or len(self.M_families) != self.s:
            raise ValueError("need one A family and one M family per block")
        for fam in self.A_families:
            if fam.shape != (self.n, self.n):
                raise ValueError(f"A family shape {fam.shape} != ({self.n}, {self.n})")
        for fam in self.M_families:
            if fam.shape[1] != self.n:
                raise ValueError(f"M family must have {self.n} columns, got {fam.shape}")
        for fam in self.A_families + self.M_families:
            if fam.d != self.d:
                raise ValueError("family parameter dimension differs from problem d")
        if self.kind == CONTINUOUS_RICCATI:
            if self.B_family is None:
                raise ValueError("the Riccati kind requires B_family")
            if self.B_family.shape[0] != self.n or self.B_family.d != self.d:
                raise ValueError(f"B family shape {self.B_family.shape} incompatible")
        elif self.B_family is not None:
            raise ValueError(f"B_family is only valid for kind {CONTINUOUS_RICCATI}")
        if self.kind == COUPLED_LYAPUNOV:
            if self.coupling is None:
                raise ValueError("the coupled kind requires a coupling matrix")
            Pi = np.asarray(self.coupling, dtype=float)
            if Pi.shape != (self.s, self.s):
                raise ValueError(f"coupling shape {Pi.shape} != ({self.s}, {self.s})")
            Pi.setflags(write=False)
            object.__setattr__(self, "coupling", Pi)
        elif self.coupling is not None:
            raise ValueError(f"coupling is only valid for kind {COUPLED_LYAPUNOV}")
        if len(self.domain) != self.d:
            raise ValueError(f"domain needs {self.d} intervals, got {len(self.domain)}")
        for lo, hi in self.domain:
            if not lo <= hi:
                raise ValueError(f"empty domain interval [{lo}, {hi}]")

    @property
    def N(self):
        """Full-order state dimension s * n**2."""
        return self.s * self.n * self.n

    def all_families(self):
        fams = list(self.A_families) + list(self.M_families)
        if self.B_family is not None:
            fams.append(self.B_family)
        return tuple(fams)


@dataclass(frozen=True)
class ThetaGroups:
    """Canonical monomial lists for the quadratic/linear/constant operators."""

    theta_C2: tuple
    theta_C1: tuple
    theta_C0: tuple

    @property
    def counts(self):
        return (len(self.theta_C2), len(self.theta_C1), len(self.theta_C0))


def derive_theta_groups(problem):
    """Monomial groups of the vectorized fixed-point operators.

    The constant group collects the monomials of every M_i^T M_i expansion.
    The linear group depends on the kind: monomials of A for the continuous
    kinds, pairwise products of A monomials for the discrete kind, the union
    over blocks for the coupled kind; the constant monomial is always present
    (it carries the identity shift of the fixed-point form).  The quadratic
    group is empty except for the Riccati kind, where it holds the monomials
    of B B^T.
    """
    one = constant_monomial(problem.d)

    c0 = []
    for M_fam in problem.M_families:
        q_fam = affine_product(transpose_family(M_fam), M_fam)
        c0.extend(q_fam.monomials)
    theta_c0 = dedup_exponents(c0)

    a_monos = [t for fam in problem.A_families for t in fam.monomials]
    if problem.kind == DISCRETE_LYAPUNOV:
        pairs = [theta_product(a, b) for a in a_monos for b in a_monos]
        theta_c1 = dedup_exponents(pairs + [one])
    else:
        theta_c1 = dedup_exponents(a_monos + [one])

    if problem.kind == CONTINUOUS_RICCATI:
        g_fam = affine_product(problem.B_family, transpose_family(problem.B_family))
        theta_c2 = dedup_exponents(g_fam.monomials)
    else:
        theta_c2 = ()
    return ThetaGroups(theta_C2=theta_c2, theta_C1=theta_c1, theta_C0=theta_c0)


def _negative_exponent_components(problem):
    out = set()
    for fam in problem.all_families():
        for theta in fam.monomials:
            for j, e in enumerate(theta.exponents):
                if e < 0:
                    out.add(j)
    return out


def _sample_domain(domain, count):
    fracs = (np.arange(count) + 0.5) / count
    cols = [lo + (hi - lo) * fracs for lo, hi in domain]
    return np.column_stack(cols)


def validate(problem, samples=10):
    """Spot-check the checkable well-posedness assumptions; returns findings.

    The checks never raise and never mutate: an empty list means nothing
    suspicious was found at the sampled parameters.
    """
    findings = []
    negative = _negative_exponent_components(problem)
    for j, (lo, hi) in enumerate(problem.domain):
        if j in negative and lo <= 0.0 <= hi:
            findings.append(
                f"domain component {j + 1} contains 0 but a theta exponent is negative")
    if problem.kind == CONTINUOUS_RICCATI:
        for mu in _sample_domain(problem.domain, samples):
            try:
                A = assemble(problem.A_families[0], mu)
            except ThetaDomainError:
                continue
            max_re = float(np.max(np.linalg.eigvals(A).real))
            if max_re >= 0.0:
                findings.append(
                    f"unstable A at mu={np.array2string(mu, precision=4)}: "
                    f"max Re(lambda) = {max_re:.3e}")
    return findings
