"""Brute-force dense realizations used to cross-check the block calculus.

On functions that are constant on the subcells of a ``q``-refined grid every
element acts as an explicit matrix.  The matrix is assembled here from
Kronecker products of averaging matrices, independently of
:func:`opcalc.algebra.apply`.
"""

import os
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import subsets
from .algebra import RefinedGridFunction, adjoint, apply, multiply, represent, unrepresent
from .calculus import operator_norm
from .errors import SizeGuardExceeded

DEFAULT_MAX_SIDE = 4096


def max_dense_side():
    """Size guard for dense realizations (env ``OPCALC_MAX_DENSE`` overrides)."""
    raw = os.environ.get("OPCALC_MAX_DENSE")
    return int(raw) if raw else DEFAULT_MAX_SIDE


@dataclass(frozen=True, eq=False)
class DenseRealization:
    geometry: object
    q: int
    matrix: np.ndarray = field(repr=False)


def _guard(side, max_side):
    limit = max_dense_side() if max_side is None else max_side
    if side > limit:
        raise SizeGuardExceeded(side, limit)


def _axis_factors(N, q, mask, inside, outside):
    # kron order: axis N first, axis 1 last (axis 1 varies fastest)
    mats = [inside if mask >> (n - 1) & 1 else outside for n in range(N, 0, -1)]
    return reduce(np.kron, mats, np.ones((1, 1)))


def subcell_average(N, q, alpha):
    """Averaging over the ``alpha`` axes of one cell's ``q**N`` subcells."""
    J = np.full((q, q), 1.0 / q)
    return _axis_factors(N, q, alpha, J, np.eye(q))


def dense_matrix(X, q, max_side=None):
    """Matrix of ``X`` acting on ``q``-refined grid functions."""
    g = X.geometry
    side = g.side * q**g.N
    _guard(side, max_side)
    S, M, Q = g.S, g.M, q**g.N
    A4 = X.coeffs.reshape(g.n_subsets, S, M, S, M)
    D = np.zeros((S, Q, M, S, Q, M), dtype=complex)
    for alpha in range(g.n_subsets):
        if np.any(A4[alpha]):
            D += np.einsum("imjn,st->ismjtn", A4[alpha], subcell_average(g.N, q, alpha))
    return DenseRealization(g, q, D.reshape(side, side))


def projector(geom, alpha, q, max_side=None):
    """Orthogonal projector onto functions constant along ``alpha`` and
    mean-free along every other axis, cell by cell."""
    alpha = subsets.as_mask(alpha, geom.N)
    side = geom.side * q**geom.N
    _guard(side, max_side)
    J = np.full((q, q), 1.0 / q)
    sub = _axis_factors(geom.N, q, alpha, J, np.eye(q) - J)
    P = np.kron(np.kron(np.eye(geom.S), sub), np.eye(geom.M))
    return DenseRealization(geom, q, P.astype(complex))


def oracle_spectrum(X, q=2, max_side=None):
    return np.linalg.eigvals(dense_matrix(X, q, max_side).matrix)


def oracle_norm(X, q=2, max_side=None):
    return float(np.linalg.norm(dense_matrix(X, q, max_side).matrix, 2))


def block_spectrum_multiset(X, q=2):
    """Eigenvalues the oracle must reproduce: ``eig(B_alpha)`` repeated
    ``(q-1)**(N-|alpha|)`` times."""
    R = represent(X)
    N = X.geometry.N
    parts = []
    for alpha in range(len(R)):
        mult = (q - 1) ** (N - subsets.popcount(alpha))
        if mult:
            parts.append(np.tile(np.linalg.eigvals(R.blocks[alpha]), mult))
    return np.concatenate(parts)


def match_multisets(a, b):
    """Largest distance under the optimal one-to-one pairing of ``a`` and ``b``.

    Returns ``inf`` when the sizes differ.
    """
    a = np.ravel(a)
    b = np.ravel(b)
    if a.size != b.size:
        return np.inf
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def verify(X, q=2, seed=0, rtol=1e-9, max_side=None):
    """Compare the block calculus of ``X`` with its dense realizations.

    Returns ``{"passed": bool, "checks": {name: {"passed", "error", "tol"}}}``.
    Spectrum and norm are compared at ``q = 2``; the action at ``q``.
    """
    rng = np.random.default_rng(seed)
    g = X.geometry
    checks = {}

    def record(name, err, tol):
        checks[name] = {"passed": bool(err <= tol), "error": float(err), "tol": float(tol)}

    R = represent(X)
    scale = max(1.0, float(np.abs(R.blocks).max(initial=0.0)))
    back = unrepresent(R)
    record("roundtrip", np.abs(back.coeffs - X.coeffs).max(initial=0.0), 1e-13 * scale)

    D = dense_matrix(X, q, max_side).matrix
    n = D.shape[0]
    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    Xu = apply(X, RefinedGridFunction(g, q, u)).values
    record("apply", np.abs(Xu - D @ u).max(initial=0.0), rtol * scale * max(1.0, np.abs(u).max()))

    D2 = D if q == 2 else dense_matrix(X, 2, max_side).matrix
    eig_scale = max(1.0, float(np.abs(np.linalg.eigvals(D2)).max(initial=0.0)))
    record("spectrum", match_multisets(np.linalg.eigvals(D2), block_spectrum_multiset(X, 2)), rtol * eig_scale)
    norm_scale = max(1.0, operator_norm(X))
    record("norm", abs(np.linalg.norm(D2, 2) - operator_norm(X)), rtol * norm_scale)

    Xs = adjoint(X)
    Ds = dense_matrix(Xs, q, max_side).matrix
    record("adjoint", np.abs(Ds - D.conj().T).max(initial=0.0), 0.0)
    prod = dense_matrix(multiply(X, Xs), q, max_side).matrix
    record("homomorphism", np.abs(prod - D @ Ds).max(initial=0.0), 1e-12 * max(1.0, np.abs(D @ Ds).max()))

    return {"passed": all(c["passed"] for c in checks.values()), "q": q, "checks": checks}
