"""Discrete 3D Schroedinger equation with three orthogonal planar defects.

After a Fourier transform in the lattice variable the stationary problem is

    A(k) psi(k) - sum_i V_i int_0^1 psi(k with k_i -> x) dx = 1,
    A(k) = lambda - i eps - 4 sum_i sin^2(pi k_i),

on ``k in [0, 1)^3``.  Sampling ``A`` at cell centers of the uniform ``p^3``
grid puts the operator into coefficient form; the solution is then explicit
through the eight inverted representation blocks.
"""

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import subsets
from .algebra import AlgebraElement, PartitionGeometry, RefinedGridFunction, represent
from .calculus import _inv, SINGULAR_RTOL, spectrum_of_blocks

N_AXES = 3
DESK_MAX_P = 8
GAP_CONSTANT = 24 * np.pi


@dataclass(frozen=True)
class SchrodingerConfig:
    """Frequency ``lam``, attenuation ``epsilon > 0``, defect strengths ``V``
    and ``p`` subdivisions per axis."""

    lam: float
    epsilon: float
    V: tuple = (0.0, 0.0, 0.0)
    p: int = 4
    allow_large: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"attenuation must be positive, got {self.epsilon}")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p}")
        if self.p > DESK_MAX_P and not self.allow_large:
            raise ValueError(f"p = {self.p} exceeds {DESK_MAX_P}; pass allow_large=True")
        V = tuple(float(v) for v in self.V)
        if len(V) != N_AXES:
            raise ValueError("need three defect strengths")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "p", int(self.p))

    @property
    def h(self):
        return 1.0 / self.p


def symbol(cfg, k):
    """``A(k)`` for ``k`` of shape ``(..., 3)``."""
    k = np.asarray(k, dtype=float)
    return cfg.lam - 1j * cfg.epsilon - 4 * (np.sin(np.pi * k) ** 2).sum(axis=-1)


def _digits(p):
    idx = np.arange(p**N_AXES)
    return np.stack([(idx // p**n) % p for n in range(N_AXES)], axis=1)


def _row_masks(p):
    """``masks[alpha][n, m]``: cells ``n``, ``m`` agree on every axis outside ``alpha``."""
    d = _digits(p)
    out = []
    for alpha in range(1 << N_AXES):
        rest = [j for j in range(N_AXES) if not alpha >> j & 1]
        if rest:
            out.append((d[:, None, rest] == d[None, :, rest]).all(axis=2))
        else:
            out.append(np.ones((p**N_AXES,) * 2, dtype=bool))
    return out


def geometry(p):
    return PartitionGeometry.uniform(N_AXES, p, M=1)


def build_operator(cfg):
    """The sampled operator: ``diag(A_n)`` on the empty set and ``-h V_i`` on
    every pair of cells in a common axis-``i`` row."""
    p, h = cfg.p, cfg.h
    g = geometry(p)
    centers = (_digits(p) + 0.5) * h
    masks = _row_masks(p)
    c = np.zeros((g.n_subsets, g.S, g.S), dtype=complex)
    c[0] = np.diag(symbol(cfg, centers))
    for i in range(N_AXES):
        alpha = 1 << i
        c[alpha] = -h * cfg.V[i] * masks[alpha]
    return AlgebraElement(g, c)


def alternating_sum(blocks, alpha):
    """``sum_{beta <= alpha} (-1)**|alpha - beta| blocks[beta]``, term by term."""
    out = np.zeros_like(blocks[0])
    for beta in range(alpha + 1):
        if subsets.is_subset(beta, alpha):
            sign = -1 if subsets.popcount(alpha & ~beta) % 2 else 1
            out = out + sign * blocks[beta]
    return out


@dataclass(frozen=True, eq=False)
class WaveSolution:
    """``psi = A^{-1} 1``; constant on every cell of the ``p^3`` grid."""

    config: SchrodingerConfig
    C: dict = field(repr=False)
    cell_values: np.ndarray = field(repr=False)
    bound_state_error: float = 0.0

    @property
    def p(self):
        return self.config.p

    def __call__(self, k):
        """Evaluate at points ``k`` of shape ``(..., 3)`` in ``[0, 1)^3``."""
        k = np.asarray(k, dtype=float)
        n = np.clip(np.floor(k * self.p).astype(int), 0, self.p - 1)
        idx = n[..., 0] + self.p * n[..., 1] + self.p**2 * n[..., 2]
        return self.cell_values[idx]

    def on_grid(self, q=1):
        return RefinedGridFunction.from_cells(geometry(self.p), q, self.cell_values)

    def refined_cells(self, r):
        """Cell values on the ``(r p)^3`` grid, in its uniform order."""
        P = r * self.p
        d = _digits(P) // r
        return self.cell_values[d[:, 0] + self.p * d[:, 1] + self.p**2 * d[:, 2]]

    def l2_norm(self):
        return float(np.sqrt(np.sum(np.abs(self.cell_values) ** 2) / self.p**3))

    def fourier_coefficient(self, n):
        """``int psi(k) exp(-2 pi i n.k) dk`` by exact integration over cells."""
        p = self.p
        edges = np.arange(p + 1) / p
        factors = []
        for nj in np.asarray(n, dtype=int).reshape(N_AXES):
            if nj == 0:
                factors.append(np.full(p, 1.0 / p, dtype=complex))
            else:
                w = np.exp(-2j * np.pi * nj * edges)
                factors.append((w[1:] - w[:-1]) / (-2j * np.pi * nj))
        vals = self.cell_values.reshape(p, p, p)  # axes (n3, n2, n1)
        return complex(np.einsum("cba,a,b,c->", vals, *factors))


def solve_wavefunction(cfg, rtol=SINGULAR_RTOL):
    """Invert the eight blocks, form the ``C_alpha`` alternating sums and
    collapse them to cell values.

    On cell ``n`` the solution is ``sum_alpha sum_m C_alpha[n, m]`` over the
    cells ``m`` that agree with ``n`` on the axes outside ``alpha``: the
    integrals of the cell indicators along ``alpha`` reduce to exactly that
    selection.
    """
    R = represent(build_operator(cfg))
    inv_blocks = np.stack([_inv(a, R.blocks[a], rtol) for a in range(len(R))])
    C = {a: alternating_sum(inv_blocks, a) for a in range(len(R))}
    masks = _row_masks(cfg.p)
    psi = np.zeros(cfg.p**N_AXES, dtype=complex)
    for a, Ca in C.items():
        psi += np.where(masks[a], Ca, 0).sum(axis=1)
    return WaveSolution(cfg, C, psi, GAP_CONSTANT * cfg.h / cfg.epsilon**2)


def l2_distance(sol_a, sol_b):
    """Exact L2 distance of two piecewise-constant solutions."""
    P = sol_a.p * sol_b.p // gcd(sol_a.p, sol_b.p)
    a = sol_a.refined_cells(P // sol_a.p)
    b = sol_b.refined_cells(P // sol_b.p)
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2) / P**3))


def classify_spectrum(cfg, dedup_tol=None):
    """Block spectra with layers ``|alpha| = 0, 1, 2, 3`` read as volume,
    planar, guided and local components (see ``SpectrumReport.labeled_layers``)."""
    return spectrum_of_blocks(represent(build_operator(cfg)), dedup_tol)


def error_report(cfg):
    """Reported (not derived) gaps: operator ``24 pi h``, wave function
    ``24 pi h / eps^2`` and spectral distance ``24 pi h``."""
    gap = GAP_CONSTANT * cfg.h
    return {
        "operator_gap": gap,
        "wavefunction_gap": gap / cfg.epsilon**2,
        "spectral_gap": gap,
    }
