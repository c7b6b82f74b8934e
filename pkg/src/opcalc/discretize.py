"""Builders that put continuous ingredients into coefficient form.

Multiplication by a cellwise-constant matrix, integration along one axis,
cell-permuting (ergodic) operators, and midpoint sampling of multi-kernel
integral operators on ``[0, 1)^N`` together with the resulting error bounds.
"""

from dataclasses import dataclass, field

import numpy as np

from . import subsets
from .algebra import AlgebraElement, PartitionGeometry
from .errors import BoundDiverges, GeometryError, GeometryNotAxisComplete
from .oracle import dense_matrix


def multiplication_operator(geom, A_cells):
    """Multiplication by the function equal to ``A_cells[i]`` on cell ``i``."""
    M = geom.M
    if len(A_cells) != geom.S:
        raise GeometryError(f"need {geom.S} cell matrices, got {len(A_cells)}")
    c = np.zeros((geom.n_subsets, geom.side, geom.side), dtype=complex)
    for i, A in enumerate(A_cells):
        A = np.asarray(A, dtype=complex)
        if A.ndim == 0 and M == 1:
            A = A.reshape(1, 1)
        if A.shape != (M, M):
            raise GeometryError(f"cell {i}: matrix must be {M}x{M}, got {A.shape}")
        c[0, i * M:(i + 1) * M, i * M:(i + 1) * M] = A
    return AlgebraElement(geom, c)


def axis_rows(geom, axis, check=True):
    """For each cell, the cells sharing all coordinates except ``axis``.

    With ``check`` the partition must be axis-complete: no cell outside a row
    may partially overlap the lines through that row.
    """
    if not 1 <= axis <= geom.N:
        raise GeometryError(f"axis {axis} outside 1..{geom.N}")
    v = geom.vertices
    others = [m for m in range(geom.N) if m != axis - 1]
    tol = 1e-12 * max(1.0, float(np.abs(v).max()))
    rows = []
    for i in range(geom.S):
        if others:
            dev = np.abs(v[:, others] - v[i, others]).max(axis=1)
        else:
            dev = np.zeros(geom.S)
        same = np.nonzero(dev <= tol)[0]
        if check:
            partial = np.nonzero((dev > tol) & (dev < geom.h - tol))[0]
            if partial.size:
                raise GeometryNotAxisComplete(axis, i, int(partial[0]))
        rows.append(same)
    return rows


def integral_operator(geom, axis):
    """Integration along ``axis`` over the part of the domain on each line."""
    M = geom.M
    c = np.zeros((geom.n_subsets, geom.side, geom.side), dtype=complex)
    block = geom.h * np.eye(M)
    alpha = 1 << (axis - 1)
    for i, row in enumerate(axis_rows(geom, axis)):
        for j in row:
            c[alpha, i * M:(i + 1) * M, j * M:(j + 1) * M] = block
    return AlgebraElement(geom, c)


def ergodic_operator(geom, maps):
    """``(T u)_m = u_m`` read from cell ``maps[m][i]`` on cell ``i``.

    ``maps`` holds one 0-based cell map of length ``S`` per component.
    """
    M, S = geom.M, geom.S
    if len(maps) != M:
        raise GeometryError(f"need {M} cell maps, got {len(maps)}")
    c = np.zeros((geom.n_subsets, geom.side, geom.side), dtype=complex)
    for m, pm in enumerate(maps):
        pm = np.asarray(pm)
        if pm.shape != (S,):
            raise GeometryError(f"map {m} must have length {S}")
        if pm.min() < 0 or pm.max() >= S or not np.issubdtype(pm.dtype, np.integer):
            raise GeometryError(f"map {m} has images outside 0..{S - 1}")
        for i, j in enumerate(pm):
            c[0, i * M + m, j * M + m] = 1.0
    return AlgebraElement(geom, c)


# ---------------------------------------------------------------------------
# multi-kernel sampling


@dataclass(frozen=True)
class MultiKernelSpec:
    """Kernels ``A_alpha(k, x_alpha)`` of an operator on ``L2([0,1)^N)``.

    Each kernel is vectorized: it receives ``k`` of shape ``(n, N)`` and
    ``x`` of shape ``(n, |alpha|)`` (axes ascending) and returns ``n`` real
    values.  ``grad_sup[alpha]`` bounds the Euclidean gradient norm over
    ``(k, x_alpha)``; it is trusted, never estimated.
    """

    N: int
    kernels: dict
    grad_sup: dict = field(default_factory=dict)

    def __post_init__(self):
        kernels = {subsets.as_mask(a, self.N): f for a, f in self.kernels.items()}
        grads = {subsets.as_mask(a, self.N): float(g) for a, g in self.grad_sup.items()}
        for a, g in grads.items():
            if not (np.isfinite(g) and g >= 0):
                raise ValueError(f"gradient bound for {subsets.axes(a)} must be finite and >= 0")
        object.__setattr__(self, "kernels", kernels)
        object.__setattr__(self, "grad_sup", grads)

    def evaluate(self, alpha, k, x):
        k = np.atleast_2d(np.asarray(k, dtype=float))
        x = np.asarray(x, dtype=float).reshape(k.shape[0], -1)
        f = self.kernels.get(alpha)
        if f is None:
            return np.zeros(k.shape[0])
        return np.asarray(f(k, x), dtype=float).reshape(k.shape[0])


def _uniform_digits(N, p):
    idx = np.arange(p**N)
    return np.stack([(idx // p**n) % p for n in range(N)], axis=1)


def sample_kernel(spec, p):
    """Midpoint sampling on the uniform ``p**N`` partition of ``[0,1)^N``.

    The ``alpha`` weight between cells ``i`` and ``j`` is
    ``p**-|alpha| * A_alpha(c_i, (c_j)_alpha)`` with ``c`` the cell centers,
    provided ``i`` and ``j`` agree on every axis outside ``alpha``.
    """
    if int(p) != p or p < 1:
        raise ValueError(f"subdivisions must be a positive integer, got {p}")
    N = spec.N
    geom = PartitionGeometry.uniform(N, p, M=1)
    digits = _uniform_digits(N, p)
    centers = (digits + 0.5) / p
    S = geom.S
    c = np.zeros((geom.n_subsets, S, S), dtype=complex)
    for alpha in spec.kernels:
        ax = [n - 1 for n in subsets.axes(alpha)]
        rest = [m for m in range(N) if m not in ax]
        if rest:
            same = (digits[:, None, rest] == digits[None, :, rest]).all(axis=2)
        else:
            same = np.ones((S, S), dtype=bool)
        ii, jj = np.nonzero(same)
        vals = spec.evaluate(alpha, centers[ii], centers[jj][:, ax])
        c[alpha, ii, jj] = vals / p ** len(ax)
    return AlgebraElement(geom, c)


def approximation_bound(spec, p):
    """``(N / 2p) * sum_alpha grad_sup[alpha]`` over the kernels present."""
    missing = [subsets.axes(a) for a in spec.kernels if a not in spec.grad_sup]
    if missing:
        raise ValueError(f"no gradient bound supplied for kernels {missing}")
    return spec.N / (2.0 * p) * sum(spec.grad_sup[a] for a in spec.kernels)


def estimate_grad_sup(spec, alpha, probe=17, step=1e-6):
    """Central-difference estimate of ``sup |grad A_alpha|`` on a probe grid.

    A convenience for choosing ``grad_sup``; the bounds never call it.
    """
    alpha = subsets.as_mask(alpha, spec.N)
    d = spec.N + subsets.popcount(alpha)
    t = (np.arange(probe) + 0.5) / probe
    pts = np.stack(np.meshgrid(*([t] * d), indexing="ij"), axis=-1).reshape(-1, d)
    grad = np.zeros_like(pts)
    for m in range(d):
        e = np.zeros(d)
        e[m] = step
        fp = spec.evaluate(alpha, (pts + e)[:, :spec.N], (pts + e)[:, spec.N:])
        fm = spec.evaluate(alpha, (pts - e)[:, :spec.N], (pts - e)[:, spec.N:])
        grad[:, m] = (fp - fm) / (2 * step)
    return float(np.linalg.norm(grad, axis=1).max())


def fine_grid_permutation(N, p, q):
    """Index of each ``q``-refined coarse slot in the uniform ``pq`` ordering."""
    coarse = _uniform_digits(N, p)
    sub = _uniform_digits(N, q)
    fine = coarse[:, None, :] * q + sub[None, :, :]
    weights = (p * q) ** np.arange(N)
    return (fine @ weights).reshape(-1)


def measured_gap(spec, p, q_fine=16):
    """Dense 2-norm of the difference between the ``p`` and ``p*q_fine``
    samplings, both realized on the fine grid.

    The fine sampling stands in for the continuous operator, so this is a
    lower-biased estimate of the true gap.
    """
    if q_fine < 8:
        raise ValueError("the fine grid needs at least 8 subcells per cell")
    coarse = dense_matrix(sample_kernel(spec, p), q_fine).matrix
    fine = dense_matrix(sample_kernel(spec, p * q_fine), 1).matrix
    perm = fine_grid_permutation(spec.N, p, q_fine)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return float(np.linalg.norm(fine - coarse[np.ix_(inv, inv)], 2))


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class SpectralEnclosure:
    """Union of closed discs of radius ``delta`` around ``centers``."""

    centers: np.ndarray
    delta: float

    def contains(self, z, slack=0.0):
        if self.centers.size == 0:
            return False
        return bool(np.abs(np.asarray(self.centers) - z).min() <= self.delta + slack)

    def intervals(self):
        """Real intervals covered, when all centers are real (self-adjoint case)."""
        pts = np.sort(np.real(self.centers))
        out = []
        for x in pts:
            lo, hi = x - self.delta, x + self.delta
            if out and lo <= out[-1][1]:
                out[-1][1] = max(out[-1][1], hi)
            else:
                out.append([lo, hi])
        return [tuple(iv) for iv in out]


def spectral_enclosure(delta, report):
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return SpectralEnclosure(np.array(report.union), float(delta))


def inverse_error_bound(delta, inv_norm):
    """``delta ||A^-1||**2 / (1 - delta ||A^-1||)``."""
    t = delta * inv_norm
    if t >= 1:
        raise BoundDiverges(f"delta * ||A^-1|| = {t:.6g} >= 1; the perturbation bound does not apply")
    return delta * inv_norm**2 / (1 - t)


# ---------------------------------------------------------------------------
# named kernel families (for the command line)


def _linear_sum(N, alpha=1, c0=0.0, c1=1.0, c2=1.0):
    alpha = subsets.as_mask([int(alpha)] if isinstance(alpha, (int, float)) else alpha, N)
    f = lambda k, x: c0 + c1 * k.sum(axis=1) + c2 * x.sum(axis=1)  # noqa: E731
    grad = np.sqrt(N * c1**2 + subsets.popcount(alpha) * c2**2)
    return {alpha: f}, {alpha: grad}


def _sin2(N, amplitude=1.0):
    f = lambda k, x: amplitude * (np.sin(np.pi * k) ** 2).sum(axis=1)  # noqa: E731
    return {0: f}, {0: abs(amplitude) * np.pi * np.sqrt(N)}


def _cos_product(N, alpha=1, amplitude=1.0, freq=1.0):
    alpha = subsets.as_mask([int(alpha)] if isinstance(alpha, (int, float)) else alpha, N)
    d = N + subsets.popcount(alpha)
    f = lambda k, x: amplitude * np.cos(2 * np.pi * freq * (k.sum(axis=1) + x.sum(axis=1)))  # noqa: E731
    return {alpha: f}, {alpha: abs(amplitude) * 2 * np.pi * abs(freq) * np.sqrt(d)}


def builtin_kernel(name, N=1, **params):
    """Named kernel families.

    ``linear-sum``  ``A_alpha = c0 + c1 sum(k) + c2 sum(x_alpha)`` (default ``k + x``)
    ``sin2``        ``A_0 = amplitude * sum sin^2(pi k_n)``
    ``cos``         ``A_alpha = amplitude * cos(2 pi freq (sum k + sum x_alpha))``
    ``demo``        ``k + x`` on ``{1}`` plus ``sin^2(pi k)`` on the empty set
    """
    N = int(N)
    if name == "linear-sum":
        kern, grad = _linear_sum(N, **params)
    elif name == "sin2":
        kern, grad = _sin2(N, **params)
    elif name == "cos":
        kern, grad = _cos_product(N, **params)
    elif name == "demo":
        if params:
            raise ValueError("kernel 'demo' takes no parameters")
        kern, grad = _linear_sum(N)
        k2, g2 = _sin2(N)
        kern.update(k2)
        grad.update(g2)
    else:
        raise ValueError(f"unknown kernel family {name!r}")
    return MultiKernelSpec(N, kern, grad)
