r"""
Fredholm operators with step kernels
====================================

On ``[0, 1)`` split into ``S`` equal steps, the operator

    u(x) -> A(x) u(x) + int_0^1 B(x, y) u(y) dy

with ``A`` and ``B`` constant per step is fully described by an ``S``-vector
and an ``S x S`` matrix.  Its functions have a closed form built from the
two matrices ``diag(A)`` and ``diag(A) + B``.  Here we compare that closed
form with the general block calculus.
"""

import numpy as np

from opcalc import calculus as calc
from opcalc.fredholm import StepFredholmOperator, closed_form_function, closed_form_spectrum, to_element

rng = np.random.default_rng(3)
S = 5
op = StepFredholmOperator(
    2.0 + rng.uniform(size=S),
    0.4 * rng.standard_normal((S, S)) / np.sqrt(S),
)
X = to_element(op)

###############################################################################
# The stored ``B`` is the coefficient of the averaging operator.  The kernel
# itself takes the value ``S * B[i, j]`` on each cell pair.

print("kernel values on the first row:", np.round(op.kernel_values()[0].real, 3))

###############################################################################
# Closed form against the general machinery.

for f in (calc.inverse(), calc.exp(), calc.sqrt(), calc.polynomial([1, -2, 0.5, 0, 0, 0.1])):
    closed = to_element(closed_form_function(op, f))
    general = calc.apply_function(X, f)
    err = np.abs(closed.coeffs - general.coeffs).max() / np.abs(general.coeffs).max()
    print(f"{f.kind:>10}: relative difference {err:.1e}")

###############################################################################
# The spectrum is the eigenvalues of ``diag(A)`` together with those of
# ``diag(A) + B``.  The two blocks of the representation are exactly these
# matrices.

print("closed form :", np.round(np.sort_complex(closed_form_spectrum(op)), 6))
print("block union :", np.round(np.sort_complex(calc.spectrum(X).union), 6))

###############################################################################
# Solving the integral equation ``A u = 1`` reduces to one dense solve.

inv = closed_form_function(op, calc.inverse())
u = inv.A + inv.B.sum(axis=1)
print("solution step values:", np.round(u.real, 6))
print("residual:", np.abs(op.A * u + op.B @ u - 1).max())
