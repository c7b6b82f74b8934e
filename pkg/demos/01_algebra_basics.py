r"""
Elementary operators and their block representation
====================================================

Build a few elementary operators on a two-cell partition of the plane,
multiply them, and watch the product collapse to blockwise matrix
multiplication once the coefficients are mapped to representation blocks.
"""

import numpy as np

from opcalc.algebra import AlgebraElement, PartitionGeometry, make_elementary, represent, unrepresent
from opcalc.oracle import dense_matrix, verify

###############################################################################
# Two unit squares side by side, scalar values (M = 1).

geom = PartitionGeometry([[0.0, 0.0], [1.0, 0.0]], 1.0)
print(geom)

###############################################################################
# ``E1`` averages cell 1 along axis 1 and writes the result into cell 0.
# ``E2`` averages cell 0 along axis 2 and keeps it there.  Their product
# averages along both axes: subset indices combine by union.

E1 = make_elementary(geom, 0, 1, [1], [[2.0]])
E2 = make_elementary(geom, 1, 0, [2], [[0.5j]])
P = E1 @ E2
print("support of E1 E2:", P.support())
print("coefficient on {1,2}:\n", P.coefficient([1, 2]))

###############################################################################
# The representation sums coefficients over subsets.  Every product of
# elements becomes a product of matching blocks.

X = AlgebraElement(geom, {(): [[1.0, 0.2], [0.0, 2.0]], (1,): [[0.0, 1.0], [1.0, 0.0]], (1, 2): [[0.3, 0], [0, 0]]})
R = represent(X)
for alpha in range(len(R)):
    print(f"B_{alpha:02b} =\n{R.blocks[alpha]}")

RX2 = represent(X @ X)
print("max |pi(X X) - pi(X) pi(X)| =", np.abs(RX2.blocks - R.blocks @ R.blocks).max())
print("roundtrip error:", np.abs(unrepresent(R).coeffs - X.coeffs).max())

###############################################################################
# On functions that are constant on a 2 x 2 subgrid of each cell, ``X`` is an
# explicit 8 x 8 matrix.  ``verify`` compares everything the block calculus
# predicts with that matrix.

D = dense_matrix(X, 2).matrix
print("dense realization shape:", D.shape)
report = verify(X, q=2)
for name, check in report["checks"].items():
    print(f"{name:>12}: error {check['error']:.2e} (tol {check['tol']:.1e})")
