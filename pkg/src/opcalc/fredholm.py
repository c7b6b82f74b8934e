"""One-dimensional Fredholm operators with step kernels.

``(A u)(x) = A(x) u(x) + int_0^1 B(x, y) u(y) dy`` on ``[0, 1)`` where ``A`` is
constant on the ``S`` cells ``[(i-1)/S, i/S)`` and the kernel equals
``S * B[i, j]`` on cell pair ``(i, j)``.

Note the factor ``S``: the stored matrix ``B`` is the coefficient of the
averaging operator between cells, so the kernel *value* is ``S * B[i, j]``.
Files and constructors always carry ``B`` itself.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .algebra import AlgebraElement, PartitionGeometry
from .calculus import _block_function, inverse, SINGULAR_RTOL
from .errors import FunctionUndefinedOnSpectrum, NotInvertible


@dataclass(frozen=True, eq=False)
class StepFredholmOperator:
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=complex).reshape(-1)
        B = np.array(self.B, dtype=complex)
        if B.shape != (A.size, A.size):
            raise ValueError(f"B must be {A.size}x{A.size}, got {B.shape}")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def S(self):
        return self.A.size

    def kernel_values(self):
        """The kernel ``B(x, y)`` on each cell pair (``S * B``)."""
        return self.S * self.B

    def to_json(self):
        pair = lambda z: [float(z.real), float(z.imag)]  # noqa: E731
        return {
            "S": self.S,
            "A": [pair(z) for z in self.A],
            "B": [[pair(z) for z in row] for row in self.B],
        }

    @classmethod
    def from_json(cls, doc):
        unknown = set(doc) - {"S", "A", "B"}
        if unknown:
            raise ValueError(f"unknown fields {sorted(unknown)}")
        A = [complex(re, im) for re, im in doc["A"]]
        B = [[complex(re, im) for re, im in row] for row in doc["B"]]
        if len(A) != doc["S"]:
            raise ValueError(f"A has {len(A)} entries, S = {doc['S']}")
        return cls(A, B)


def geometry(S):
    return PartitionGeometry(np.arange(S)[:, None] / S, 1.0 / S, M=1, validate=False)


def to_element(op):
    """``sum_i E^0_ii[A_i] + sum_ij E^{1}_ij[B_ij]`` on the ``S``-cell partition of ``[0, 1)``."""
    g = geometry(op.S)
    return AlgebraElement(g, np.stack([np.diag(op.A), op.B]))


def closed_form_function(op, f, rtol=SINGULAR_RTOL):
    """``f`` of a step operator: multiplication part ``f(A)``, kernel part
    ``f(A + B) - f(A)``.

    ``f(A)`` is evaluated entrywise on the diagonal; ``f(A + B)`` is a dense
    matrix function.
    """
    fA = np.array([_diagonal_value(f, a, rtol, op.A) for a in op.A])
    fAB = _block_function(1, np.diag(op.A) + op.B, f, rtol)
    return StepFredholmOperator(fA, fAB - np.diag(fA))


def _diagonal_value(f, a, rtol, A):
    scale = max(np.abs(A).max(), 1e-300)
    if f.kind == "inverse" and abs(a) <= rtol * scale:
        raise NotInvertible(0, np.inf if a == 0 else scale / abs(a))
    if f.kind == "resolvent" and abs(a - f.params[0]) <= rtol * max(scale, abs(f.params[0])):
        raise FunctionUndefinedOnSpectrum(0, complex(a), "resolvent point in the spectrum")
    if f.kind == "sqrt" and abs(a.imag) <= 1e-14 * max(1.0, abs(a)) and a.real <= 0:
        raise FunctionUndefinedOnSpectrum(0, complex(a), "principal square root branch cut")
    try:
        val = f(a)
    except (ArithmeticError, ValueError) as exc:
        raise FunctionUndefinedOnSpectrum(0, complex(a), str(exc)) from exc
    if not np.isfinite(val):
        raise FunctionUndefinedOnSpectrum(0, complex(a), "non-finite value")
    return val


def closed_form_inverse(op, rtol=SINGULAR_RTOL):
    """Inverse with multiplication part ``1/A_i`` and kernel part
    ``(A + B)^-1 - A^-1``."""
    return closed_form_function(op, inverse(), rtol)


def closed_form_spectrum(op):
    """Eigenvalues of ``diag(A)`` followed by those of ``diag(A) + B``."""
    return np.concatenate([op.A, sla.eigvals(np.diag(op.A) + op.B)])
