r"""
Inverse, matrix functions and spectra
=====================================

Everything the functional calculus does happens on the representation
blocks: apply the scalar function to each block, then map back.  This demo
inverts a random element, takes its exponential and square root, and reads
off the spectrum layer by layer.
"""

import numpy as np

from opcalc import calculus as calc
from opcalc.algebra import AlgebraElement
from opcalc.oracle import oracle_norm
from opcalc.testing import random_instance

X = random_instance(seed=11, N=2, S=3, M=1)
I = AlgebraElement.identity(X.geometry)
print(X.geometry)

###############################################################################
# Inverse, checked from both sides.

Xinv = calc.invert(X)
print("|X X^-1 - I| =", np.abs((X @ Xinv).coeffs - I.coeffs).max())
print("|X^-1 X - I| =", np.abs((Xinv @ X).coeffs - I.coeffs).max())

###############################################################################
# Shift ``X`` well into the right half plane so the principal square root is
# defined, then square it back.

Y = X + 4 * I
root = calc.apply_function(Y, calc.sqrt())
print("|sqrt(Y)^2 - Y| =", np.abs((root @ root).coeffs - Y.coeffs).max())

E = calc.apply_function(X, calc.exp())
print("det exp(X) =", calc.det(E), " exp(trace X) =", np.exp(calc.trace(X)))

###############################################################################
# Norm and determinant come straight from the blocks.

print("operator norm:", calc.operator_norm(X), " dense oracle:", oracle_norm(X))
print("det X:", calc.det(X))

###############################################################################
# The spectrum splits by subset size.  ``layers`` keeps only eigenvalues that
# did not already show up in a block with fewer axes.

rep = calc.spectrum(X)
for c in range(X.geometry.N + 1):
    vals = rep.layer_by_cardinality(c)
    print(f"|alpha| = {c}: {np.round(vals, 4)}")
print("union has", rep.union.size, "distinct eigenvalues")
