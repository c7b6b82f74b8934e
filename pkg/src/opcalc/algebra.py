"""Cube partitions, elementary-operator coefficients and the block representation.

An operator in the algebra is stored by its coefficient family: for every
subset ``alpha`` of the axes an ``MS x MS`` complex matrix whose ``(i, j)``
``M x M`` block is the weight of the elementary operator ``E^alpha_ij``.  That
operator averages its argument over the ``alpha`` axes of cell ``j`` and
writes the result, times the block, into cell ``i``.

``represent`` maps an element to ``2**N`` matrices ``B_alpha`` (subset sums of
the coefficients); in that form the product is blockwise, which is what makes
the functional calculus explicit.
"""

from dataclasses import dataclass, field

import numpy as np

from . import subsets
from .errors import GeometryError

DEFAULT_RTOL = 1e-12


class PartitionGeometry:
    """A union of ``S`` disjoint translates ``a_i + [0, h)^N`` of one cube.

    Parameters
    ----------
    vertices : array_like, shape (S, N)
        Lower corners of the cells, in cell order.
    h : float
        Common edge length.
    M : int
        Number of vector components carried by functions on the partition.
    validate : bool
        Check pairwise disjointness (quadratic in ``S``).
    """

    __slots__ = ("N", "S", "M", "h", "vertices")

    def __init__(self, vertices, h, M=1, validate=True):
        verts = np.array(vertices, dtype=float, ndmin=2)
        if verts.ndim != 2 or verts.shape[0] == 0 or verts.shape[1] == 0:
            raise GeometryError(f"vertices must be a nonempty (S, N) array, got shape {verts.shape}")
        if not np.all(np.isfinite(verts)):
            raise GeometryError("vertices must be finite")
        h = float(h)
        if not (h > 0 and np.isfinite(h)):
            raise GeometryError(f"cell size must be positive, got {h}")
        if int(M) != M or M < 1:
            raise GeometryError(f"component count must be a positive integer, got {M}")
        S, N = verts.shape
        if N > subsets.MAX_DIM:
            raise GeometryError(f"dimension {N} exceeds the supported maximum {subsets.MAX_DIM}")
        verts.setflags(write=False)
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "S", int(S))
        object.__setattr__(self, "M", int(M))
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "vertices", verts)
        if validate:
            self._check_disjoint()

    def __setattr__(self, name, value):
        raise AttributeError("PartitionGeometry is immutable")

    def _check_disjoint(self):
        v = self.vertices
        tol = 1e-12 * max(1.0, float(np.abs(v).max()))
        for i in range(self.S - 1):
            sep = np.abs(v[i + 1:] - v[i]).max(axis=1)
            bad = np.nonzero(sep < self.h - tol)[0]
            if bad.size:
                raise GeometryError(f"cells {i} and {i + 1 + bad[0]} overlap")

    @classmethod
    def uniform(cls, N, p, M=1, length=1.0):
        """The ``p**N`` cubes of edge ``length/p`` tiling ``[0, length)^N``.

        Cell ``i`` has digits ``b`` with ``i = sum_n p**(n-1) b_n`` (axis 1 is
        the least significant digit) and vertex ``b * length / p``.
        """
        idx = np.arange(p**N)
        digits = np.stack([(idx // p**n) % p for n in range(N)], axis=1)
        h = length / p
        return cls(digits * h, h, M=M, validate=False)

    @property
    def side(self):
        """Side ``M*S`` of every coefficient and representation matrix."""
        return self.M * self.S

    @property
    def n_subsets(self):
        return 1 << self.N

    def __eq__(self, other):
        if not isinstance(other, PartitionGeometry):
            return NotImplemented
        return (
            self.N == other.N
            and self.S == other.S
            and self.M == other.M
            and self.h == other.h
            and np.array_equal(self.vertices, other.vertices)
        )

    def __hash__(self):
        return hash((self.N, self.S, self.M, self.h, self.vertices.tobytes()))

    def __repr__(self):
        return f"PartitionGeometry(N={self.N}, S={self.S}, M={self.M}, h={self.h!r})"


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_same(geom_a, geom_b):
    if geom_a is not geom_b and geom_a != geom_b:
        raise GeometryError("operands live on different partitions")


class AlgebraElement:
    """An operator ``sum_alpha sum_ij E^alpha_ij[A^alpha_ij]``.

    ``coeffs`` has shape ``(2**N, M*S, M*S)``; ``coeffs[alpha]`` is the
    matrix ``A_alpha`` with an ``S x S`` grid of ``M x M`` blocks.
    """

    __slots__ = ("geometry", "coeffs")

    def __init__(self, geometry, coeffs=None):
        n = geometry.side
        shape = (geometry.n_subsets, n, n)
        if coeffs is None:
            coeffs = np.zeros(shape, dtype=complex)
        elif isinstance(coeffs, dict):
            dense = np.zeros(shape, dtype=complex)
            for alpha, mat in coeffs.items():
                dense[subsets.as_mask(alpha, geometry.N)] += _conforming(mat, n)
            coeffs = dense
        coeffs = _frozen(coeffs)
        if coeffs.shape != shape:
            raise GeometryError(f"coefficient array has shape {coeffs.shape}, expected {shape}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "geometry", geometry)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def zero(cls, geometry):
        return cls(geometry)

    @classmethod
    def identity(cls, geometry):
        c = np.zeros((geometry.n_subsets, geometry.side, geometry.side), dtype=complex)
        c[0] = np.eye(geometry.side)
        return cls(geometry, c)

    def coefficient(self, alpha):
        return self.coeffs[subsets.as_mask(alpha, self.geometry.N)]

    def block(self, alpha, i, j):
        """The ``M x M`` weight of ``E^alpha_ij``."""
        M = self.geometry.M
        return self.coefficient(alpha)[i * M:(i + 1) * M, j * M:(j + 1) * M]

    def support(self):
        """Masks whose coefficient matrix is not identically zero."""
        return [a for a in range(self.geometry.n_subsets) if np.any(self.coeffs[a])]

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1, other))

    def __neg__(self):
        return scale(-1, self)

    def __mul__(self, c):
        return scale(c, self)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def allclose(self, other, rtol=DEFAULT_RTOL, atol=0.0):
        """Coefficientwise comparison scaled by the larger coefficient norm."""
        _check_same(self.geometry, other.geometry)
        scale_ = max(np.abs(self.coeffs).max(initial=0.0), np.abs(other.coeffs).max(initial=0.0))
        return bool(np.abs(self.coeffs - other.coeffs).max(initial=0.0) <= atol + rtol * scale_)

    def __repr__(self):
        masks = ", ".join(str(set(subsets.axes(a)) or "{}") for a in self.support())
        return f"AlgebraElement({self.geometry!r}, support=[{masks}])"


def _conforming(mat, n):
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (n, n):
        raise GeometryError(f"coefficient matrix has shape {mat.shape}, expected {(n, n)}")
    return mat


@dataclass(frozen=True, eq=False)
class Representation:
    """The image ``(B_alpha)`` of an element; ``blocks[alpha] = B_alpha``."""

    geometry: PartitionGeometry
    blocks: np.ndarray = field(repr=False)

    def __post_init__(self):
        blocks = _frozen(self.blocks)
        n = self.geometry.side
        shape = (self.geometry.n_subsets, n, n)
        if blocks.shape != shape:
            raise GeometryError(f"representation has shape {blocks.shape}, expected {shape}")
        object.__setattr__(self, "blocks", blocks)

    def __getitem__(self, alpha):
        return self.blocks[subsets.as_mask(alpha, self.geometry.N)]

    def __len__(self):
        return self.blocks.shape[0]

    def map(self, fn):
        """Apply ``fn`` to every block; ``fn(alpha, B)`` returns the new block."""
        out = np.empty_like(self.blocks)
        for alpha in range(len(self)):
            out[alpha] = fn(alpha, self.blocks[alpha])
        return Representation(self.geometry, out)


@dataclass(frozen=True, eq=False)
class RefinedGridFunction:
    """A function constant on each of the ``q**N`` subcells of every cell.

    ``values`` is ordered cell-major, then subcell, then component.  Subcell
    ``(t_1, ..., t_N)`` has flat index ``sum_n q**(n-1) t_n``.
    """

    geometry: PartitionGeometry
    q: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"refinement must be a positive integer, got {self.q}")
        values = _frozen(np.ravel(self.values))
        expected = self.geometry.side * self.q**self.geometry.N
        if values.shape != (expected,):
            raise GeometryError(f"expected {expected} values, got {values.size}")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_cells(cls, geometry, q, cell_values):
        """Constant on each cell; ``cell_values`` has shape ``(S,)`` or ``(S, M)``."""
        cv = np.asarray(cell_values, dtype=complex).reshape(geometry.S, geometry.M)
        grid = np.broadcast_to(cv[:, None, :], (geometry.S, q**geometry.N, geometry.M))
        return cls(geometry, q, grid.reshape(-1))

    def tensor(self):
        """Values as ``(S, q_N, ..., q_1, M)``; axis ``n`` sits at position ``1 + N - n``."""
        g = self.geometry
        return self.values.reshape((g.S,) + (self.q,) * g.N + (g.M,))

    def l2_norm(self):
        """L2 norm of the piecewise-constant function it represents."""
        vol = (self.geometry.h / self.q) ** self.geometry.N
        return float(np.sqrt(vol) * np.linalg.norm(self.values))


def make_elementary(geom, i, j, alpha, A):
    """The element ``E^alpha_ij[A]`` (cells are 0-based, ``alpha`` a mask or axes)."""
    S, M = geom.S, geom.M
    for name, idx in (("i", i), ("j", j)):
        if int(idx) != idx or not 0 <= idx < S:
            raise IndexError(f"cell index {name}={idx} out of range for S={S}")
    A = np.asarray(A, dtype=complex)
    if A.ndim == 0 and M == 1:
        A = A.reshape(1, 1)
    if A.shape != (M, M):
        raise GeometryError(f"block must be {M}x{M}, got shape {A.shape}")
    c = np.zeros((geom.n_subsets, geom.side, geom.side), dtype=complex)
    c[subsets.as_mask(alpha, geom.N), i * M:(i + 1) * M, j * M:(j + 1) * M] = A
    return AlgebraElement(geom, c)


def add(X, Y):
    _check_same(X.geometry, Y.geometry)
    return AlgebraElement(X.geometry, X.coeffs + Y.coeffs)


def scale(c, X):
    return AlgebraElement(X.geometry, complex(c) * X.coeffs)


def adjoint(X):
    # conjugate-transposing the MS x MS matrix swaps the cell grid and
    # conjugate-transposes every M x M block at once
    return AlgebraElement(X.geometry, np.conj(np.swapaxes(X.coeffs, -1, -2)))


def multiply(X, Y):
    """Product via the union rule ``E^a_ij[A] E^b_jl[B] = E^(a|b)_il[AB]``."""
    _check_same(X.geometry, Y.geometry)
    N = X.geometry.N
    left = [a for a in range(1 << N) if np.any(X.coeffs[a])]
    right = [b for b in range(1 << N) if np.any(Y.coeffs[b])]
    out = np.zeros_like(X.coeffs)
    for a in left:
        for b in right:
            out[a | b] += X.coeffs[a] @ Y.coeffs[b]
    return AlgebraElement(X.geometry, out)


def represent(X):
    """``B_alpha = sum_{beta <= alpha} A_beta`` for every subset ``alpha``."""
    return Representation(X.geometry, subsets.zeta(X.coeffs, X.geometry.N))


def unrepresent(R):
    """Inverse of :func:`represent` (Moebius inversion on the subset lattice)."""
    return AlgebraElement(R.geometry, subsets.moebius(R.blocks, R.geometry.N))


def from_blocks(geometry, blocks):
    """Element whose representation is ``blocks`` (array of shape ``(2**N, MS, MS)``)."""
    return unrepresent(Representation(geometry, blocks))


def apply(X, u):
    """Action of ``X`` on a refined-grid function; exact for every ``q``."""
    g = X.geometry
    _check_same(g, u.geometry)
    N, S, M, q = g.N, g.S, g.M, u.q
    t = u.tensor()
    A4 = X.coeffs.reshape(g.n_subsets, S, M, S, M)
    out = np.zeros((S, q**N, M), dtype=complex)
    for alpha in range(g.n_subsets):
        if not np.any(A4[alpha]):
            continue
        pos = tuple(1 + N - n for n in subsets.axes(alpha))
        avg = t.mean(axis=pos, keepdims=True) if pos else t
        avg = np.broadcast_to(avg, t.shape).reshape(S, q**N, M)
        out += np.einsum("imjn,jsn->ism", A4[alpha], avg)
    return RefinedGridFunction(g, q, out.reshape(-1))
