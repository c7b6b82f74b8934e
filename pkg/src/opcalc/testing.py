"""Seeded random partitions and elements for property checks and fuzzing."""

import numpy as np

from .algebra import AlgebraElement, PartitionGeometry


def random_geometry(rng, N, S, M=1, h=None):
    """``S`` disjoint cubes at distinct points of a small integer lattice."""
    if h is None:
        h = float(rng.uniform(0.25, 2.0))
    box = max(2, int(np.ceil((2 * S) ** (1.0 / N))) + 1)
    picks = rng.choice(box**N, size=S, replace=False)
    digits = np.stack([(picks // box**n) % box for n in range(N)], axis=1)
    offset = rng.uniform(-1.0, 1.0, size=N)
    return PartitionGeometry(digits * h + offset, h, M=M)


def random_element(rng, geom, density=0.7, scale=1.0):
    """Complex Gaussian coefficients; each subset is present with probability ``density``."""
    n = geom.side
    shape = (geom.n_subsets, n, n)
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    keep = rng.random(geom.n_subsets) < density
    keep[0] = True
    c[~keep] = 0
    return AlgebraElement(geom, scale * c / np.sqrt(n))


def random_instance(seed, N=None, S=None, M=None):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, 4)) if N is None else N
    S = int(rng.integers(1, 5)) if S is None else S
    M = int(rng.integers(1, 3)) if M is None else M
    return random_element(rng, random_geometry(rng, N, S, M))
