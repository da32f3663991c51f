"""Parameter sampling for training and test sets."""

import numpy as np


def log_spaced(domain, count):
    """Logarithmically spaced points over a 1-D positive domain, as (k, 1)."""
    if len(domain) != 1:
        raise ValueError("log spacing is defined for 1-D parameter domains")
    lo, hi = domain[0]
    if lo <= 0:
        raise ValueError(f"log spacing needs a positive domain, got [{lo}, {hi}]")
    return np.geomspace(lo, hi, count).reshape(-1, 1)


def tensor_grid(domain, count):
    """Uniform tensor grid with about `count` points (m^d with m = floor(count^(1/d)))."""
    d = len(domain)
    m = max(2, int(round(count ** (1.0 / d))))
    axes = [np.linspace(lo, hi, m) for lo, hi in domain]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([ax.ravel() for ax in mesh])


def uniform_random(domain, count, rng):
    """Uniform random points over the box, one row per sample."""
    lo = np.array([a for a, _ in domain])
    hi = np.array([b for _, b in domain])
    return lo + (hi - lo) * rng.random((count, len(domain)))


def nested_prefixes(domain, sizes, rng):
    """Nested training sets: each size is a prefix of one seeded random draw."""
    sizes = [int(s) for s in sizes]
    if sizes != sorted(sizes):
        raise ValueError("sweep sizes must be ascending")
    full = uniform_random(domain, sizes[-1], rng)
    return [full[:s] for s in sizes]


def training_parameters(domain, count, mode, rng=None):
    """Dispatch on a sampling-mode name: log | grid | random."""
    if mode == "log":
        return log_spaced(domain, count)
    if mode == "grid":
        return tensor_grid(domain, count)
    if mode == "random":
        if rng is None:
            raise ValueError("random sampling needs a generator")
        return uniform_random(domain, count, rng)
    raise ValueError(f"unknown sampling mode {mode!r}")


def disjoint_test_parameters(domain, count, rng, excluded, max_tries=1000):
    """Seeded uniform test set avoiding exact collisions with `excluded` rows."""
    taken = {tuple(row) for row in np.atleast_2d(excluded)} if len(excluded) else set()
    rows = []
    tries = 0
    while len(rows) < count:
        batch = uniform_random(domain, count - len(rows), rng)
        for row in batch:
            if tuple(row) not in taken:
                rows.append(row)
                taken.add(tuple(row))
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not draw a disjoint test set")
    return np.array(rows)
