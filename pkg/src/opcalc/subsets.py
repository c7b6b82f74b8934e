"""Subsets of the axis set {1, ..., N} as integer bitmasks.

Axis ``n`` (1-based) is bit ``n - 1``.  Arrays indexed by subsets carry the
``2**N`` masks along their leading dimension, in increasing mask order.
"""

import numpy as np

MAX_DIM = 20


def as_mask(alpha, ndim=None):
    """Normalize ``alpha`` to a bitmask.

    ``alpha`` is either an int bitmask or an iterable of 1-based axes.
    """
    if isinstance(alpha, (int, np.integer)) and not isinstance(alpha, bool):
        mask = int(alpha)
        if mask < 0:
            raise ValueError(f"negative subset mask {mask}")
    else:
        mask = 0
        for n in alpha:
            n = int(n)
            if n < 1:
                raise ValueError(f"axes are numbered from 1, got {n}")
            mask |= 1 << (n - 1)
    if ndim is not None and mask >= 1 << ndim:
        raise ValueError(f"subset {axes(mask)} is not contained in {{1..{ndim}}}")
    return mask


def axes(mask):
    """1-based axes contained in ``mask``, ascending."""
    return [n + 1 for n in range(int(mask).bit_length()) if mask >> n & 1]


def popcount(mask):
    return bin(int(mask)).count("1")


def masks_by_cardinality(ndim):
    out = [[] for _ in range(ndim + 1)]
    for mask in range(1 << ndim):
        out[popcount(mask)].append(mask)
    return out


def is_subset(beta, alpha):
    return beta & ~alpha == 0


def _lattice_view(arr, ndim):
    if arr.shape[0] != 1 << ndim:
        raise ValueError(f"leading dimension {arr.shape[0]} != 2**{ndim}")
    # C order: mask bit n-1 lives on reshaped axis ndim - n
    return arr.reshape((2,) * ndim + arr.shape[1:])


def zeta(arr, ndim):
    """Subset-sum transform ``B[a] = sum_{b <= a} A[b]`` along axis 0.

    Returns a new array; costs ``ndim * 2**(ndim-1)`` additions of trailing
    blocks.
    """
    out = np.array(arr, copy=True)
    view = _lattice_view(out, ndim)
    for k in range(ndim):
        hi = [slice(None)] * view.ndim
        lo = [slice(None)] * view.ndim
        hi[k], lo[k] = 1, 0
        view[tuple(hi)] += view[tuple(lo)]
    return out


def moebius(arr, ndim):
    """Inverse of :func:`zeta`: ``A[a] = sum_{b <= a} (-1)**|a - b| B[b]``."""
    out = np.array(arr, copy=True)
    view = _lattice_view(out, ndim)
    for k in range(ndim):
        hi = [slice(None)] * view.ndim
        lo = [slice(None)] * view.ndim
        hi[k], lo[k] = 1, 0
        view[tuple(hi)] -= view[tuple(lo)]
    return out


def union_convolve(a, b, ndim, product=np.matmul):
    """Brute-force ``C[g] = sum_{a | b == g} product(A[a], B[b])``.

    Quadratic in ``2**ndim``; used to multiply coefficient families directly.
    """
    n = 1 << ndim
    out = None
    for x in range(n):
        for y in range(n):
            term = product(a[x], b[y])
            if out is None:
                out = np.zeros((n,) + term.shape, dtype=np.result_type(term, complex))
            out[x | y] += term
    return out
