"""Inverse, matrix functions, spectrum, norm, determinant and trace.

Everything is computed block by block on the representation ``(B_alpha)``
and, where an element is returned, mapped back with Moebius inversion.
"""

import cmath
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import subsets
from .algebra import apply, represent, unrepresent
from .errors import EigenSolverFailure, FunctionUndefinedOnSpectrum, NotInvertible

SINGULAR_RTOL = 1e-10


# ---------------------------------------------------------------------------
# matrix function specs


@dataclass(frozen=True)
class MatrixFunction:
    """Which scalar function to lift to blocks.

    Build instances with the module-level constructors (``inverse()``,
    ``resolvent(z)``, ``polynomial(coeffs)`` ...), not directly.
    """

    kind: str
    params: tuple = ()
    scalar: object = field(default=None, compare=False)

    def __post_init__(self):
        kinds = {"inverse", "resolvent", "polynomial", "rational", "exp", "sqrt", "scalar"}
        if self.kind not in kinds:
            raise ValueError(f"unknown function kind {self.kind!r}")

    def __call__(self, z):
        """Scalar evaluation; used by closed forms on diagonal matrices."""
        z = complex(z)
        if self.kind == "inverse":
            return 1 / z
        if self.kind == "resolvent":
            return 1 / (z - self.params[0])
        if self.kind == "polynomial":
            return _horner_scalar(self.params, z)
        if self.kind == "rational":
            num, den = self.params
            return _horner_scalar(num, z) / _horner_scalar(den, z)
        if self.kind == "exp":
            return cmath.exp(z)
        if self.kind == "sqrt":
            return cmath.sqrt(z)
        return complex(self.scalar(z))


def inverse():
    return MatrixFunction("inverse")


def resolvent(z):
    z = complex(z)
    if not cmath.isfinite(z):
        raise ValueError("resolvent point must be finite")
    return MatrixFunction("resolvent", (z,))


def polynomial(coeffs):
    """``f(t) = c0 + c1 t + c2 t**2 + ...``"""
    coeffs = tuple(complex(c) for c in coeffs)
    if not coeffs:
        raise ValueError("polynomial needs at least one coefficient")
    return MatrixFunction("polynomial", coeffs)


def rational(num, den):
    num = tuple(complex(c) for c in num)
    den = tuple(complex(c) for c in den)
    if not num or not den:
        raise ValueError("rational function needs nonempty numerator and denominator")
    return MatrixFunction("rational", (num, den))


def exp():
    return MatrixFunction("exp")


def sqrt():
    """Principal square root."""
    return MatrixFunction("sqrt")


def scalar_function(fn, name="custom"):
    """Any scalar function, applied on eigenvalues (Schur-Parlett for non-normal blocks)."""
    return MatrixFunction("scalar", (name,), fn)


def _horner_scalar(coeffs, z):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _horner(coeffs, B):
    eye = np.eye(B.shape[0], dtype=complex)
    acc = coeffs[-1] * eye
    for c in reversed(coeffs[:-1]):
        acc = acc @ B + c * eye
    return acc


# ---------------------------------------------------------------------------
# per-block kernels


def _check_nonsingular(alpha, B, rtol):
    s = np.linalg.svd(B, compute_uv=False)
    if s.size and (s[0] == 0 or s[-1] <= rtol * s[0]):
        cond = np.inf if s[-1] == 0 else s[0] / s[-1]
        raise NotInvertible(alpha, cond)


def _inv(alpha, B, rtol):
    _check_nonsingular(alpha, B, rtol)
    lu = sla.lu_factor(B, check_finite=False)
    return sla.lu_solve(lu, np.eye(B.shape[0], dtype=complex), check_finite=False)


def _eigvals(alpha, B):
    try:
        return sla.eigvals(B)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverFailure(alpha, exc) from exc


def _is_normal(B, rtol=1e-12):
    comm = B @ B.conj().T - B.conj().T @ B
    return np.linalg.norm(comm) <= rtol * max(1.0, np.linalg.norm(B) ** 2)


def _block_function(alpha, B, f, rtol):
    n = B.shape[0]
    kind = f.kind
    if kind == "inverse":
        return _inv(alpha, B, rtol)
    if kind == "resolvent":
        z = f.params[0]
        try:
            return _inv(alpha, B - z * np.eye(n), rtol)
        except NotInvertible:
            raise FunctionUndefinedOnSpectrum(alpha, z, "resolvent point in the spectrum") from None
    if kind == "polynomial":
        return _horner(f.params, B)
    if kind == "rational":
        num, den = f.params
        D = _horner(den, B)
        try:
            _check_nonsingular(alpha, D, rtol)
        except NotInvertible:
            ev = _eigvals(alpha, B)
            worst = ev[np.argmin(np.abs([_horner_scalar(den, z) for z in ev]))]
            raise FunctionUndefinedOnSpectrum(alpha, complex(worst), "denominator vanishes") from None
        return np.linalg.solve(D, _horner(num, B))
    if kind == "exp":
        return sla.expm(B)
    if kind == "sqrt":
        ev = _eigvals(alpha, B)
        scale_ = max(1.0, float(np.abs(ev).max(initial=0.0)))
        on_cut = (np.abs(ev.imag) <= 1e-14 * scale_) & (ev.real <= 0)
        if np.any(on_cut):
            raise FunctionUndefinedOnSpectrum(
                alpha, complex(ev[on_cut][0]), "principal square root branch cut"
            )
        return sla.sqrtm(B)
    # arbitrary scalar function
    if _is_normal(B):
        w, V = np.linalg.eig(B)
        fw = _apply_scalar(alpha, f, w)
        return (V * fw) @ np.linalg.inv(V)
    _apply_scalar(alpha, f, _eigvals(alpha, B))
    return sla.funm(B, lambda x: np.array([f.scalar(v) for v in np.ravel(x)]).reshape(np.shape(x)))


def _apply_scalar(alpha, f, w):
    out = np.empty(w.shape, dtype=complex)
    for k, z in enumerate(w):
        try:
            val = complex(f.scalar(z))
        except (ArithmeticError, ValueError) as exc:
            raise FunctionUndefinedOnSpectrum(alpha, complex(z), str(exc)) from exc
        if not cmath.isfinite(val):
            raise FunctionUndefinedOnSpectrum(alpha, complex(z), "non-finite value")
        out[k] = val
    return out


# ---------------------------------------------------------------------------
# public operations


def invert(X, rtol=SINGULAR_RTOL):
    """``X^{-1}`` from the inverses of all representation blocks.

    Raises :class:`NotInvertible` naming the first singular block.
    """
    return unrepresent(represent(X).map(lambda a, B: _inv(a, B, rtol)))


def apply_function(X, f, rtol=SINGULAR_RTOL):
    """``f(X) = pi^{-1}((f(B_alpha))_alpha)``."""
    return unrepresent(represent(X).map(lambda a, B: _block_function(a, B, f, rtol)))


def solve(X, rhs, rtol=SINGULAR_RTOL):
    """Solve ``X u = rhs`` on the refined grid of ``rhs``."""
    return apply(invert(X, rtol), rhs)


def operator_norm(X):
    """Largest singular value over all blocks; equals the L2 operator norm."""
    R = represent(X)
    return float(max(np.linalg.norm(B, 2) for B in R.blocks))


def det(X):
    R = represent(X)
    return complex(np.prod([np.linalg.det(B) for B in R.blocks]))


def logdet(X, rtol=SINGULAR_RTOL):
    """Sum of block log-determinants (principal branch per block)."""
    total = 0j
    for alpha, B in enumerate(represent(X).blocks):
        _check_nonsingular(alpha, B, rtol)
        sign, ld = np.linalg.slogdet(B)
        total += ld + cmath.log(sign)
    return total


def trace(X):
    return complex(np.trace(represent(X).blocks, axis1=1, axis2=2).sum())


# ---------------------------------------------------------------------------
# spectrum


LAYER_NAMES = {0: "volume", 1: "planar", 2: "guided", 3: "local"}


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Block eigenvalues with their set union and cardinality layers.

    ``layers[alpha]`` holds the eigenvalues of ``B_alpha`` that are farther
    than ``tol`` from every eigenvalue of blocks with fewer axes.
    """

    ndim: int
    tol: float
    per_alpha: dict
    union: np.ndarray
    layers: dict

    def layer_by_cardinality(self, c):
        parts = [v for a, v in self.layers.items() if subsets.popcount(a) == c]
        return dedup(np.concatenate(parts), self.tol) if parts else np.zeros(0, complex)

    def labeled_layers(self):
        """Layers keyed by the defect name for ``|alpha| = 0..3``."""
        return {LAYER_NAMES.get(c, f"card{c}"): self.layer_by_cardinality(c) for c in range(self.ndim + 1)}


def dedup(values, tol):
    """Greedy tolerance clustering, keeping the first representative."""
    kept = []
    for z in np.ravel(values):
        if all(abs(z - k) > tol for k in kept):
            kept.append(z)
    return np.array(kept, dtype=complex)


def _far_from(values, ref, tol):
    values = np.ravel(values)
    if ref.size == 0 or values.size == 0:
        return values
    d = np.abs(values[:, None] - ref[None, :]).min(axis=1)
    return values[d > tol]


def spectrum(X, dedup_tol=None):
    """Eigenvalues of every block, their union and the new-per-cardinality layers."""
    R = represent(X)
    return spectrum_of_blocks(R, dedup_tol)


def spectrum_of_blocks(R, dedup_tol=None):
    N = R.geometry.N
    if dedup_tol is None:
        dedup_tol = 1e-8 * max(1.0, max(np.linalg.norm(B, 2) for B in R.blocks))
    if dedup_tol < 0:
        raise ValueError("dedup tolerance must be nonnegative")
    per = {a: _eigvals(a, R.blocks[a]) for a in range(len(R))}
    union = dedup(np.concatenate(list(per.values())), dedup_tol)
    layers = {}
    lower = np.zeros(0, dtype=complex)
    for card, masks in enumerate(subsets.masks_by_cardinality(N)):
        for a in masks:
            layers[a] = dedup(_far_from(per[a], lower, dedup_tol), dedup_tol)
        lower = np.concatenate([lower] + [per[a] for a in masks])
    return SpectrumReport(N, float(dedup_tol), per, union, layers)
