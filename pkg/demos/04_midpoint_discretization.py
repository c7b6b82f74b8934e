r"""
Discretizing a continuous kernel family
=======================================

A smooth kernel family is sampled at cell midpoints on a ``p``-step grid.
The result is an element of the finite algebra, and its distance to the
continuous operator is at most ``(N / 2p) * sum of gradient bounds``.  We
estimate that distance on a much finer grid and watch it halve with ``p``.
"""

from opcalc import calculus as calc
from opcalc.algebra import AlgebraElement
from opcalc.discretize import (
    approximation_bound,
    builtin_kernel,
    inverse_error_bound,
    measured_gap,
    sample_kernel,
    spectral_enclosure,
)

###############################################################################
# ``demo`` is ``k + x`` on the one-axis subset plus ``sin^2(pi k)`` as the
# multiplication part.

spec = builtin_kernel("demo")
print(f"{'p':>3} {'measured':>10} {'bound':>10} {'ratio':>6}")
prev = None
for p in (2, 4, 8, 16, 32):
    gap = measured_gap(spec, p, q_fine=16)
    ratio = "" if prev is None else f"{gap / prev:.2f}"
    print(f"{p:>3} {gap:>10.4f} {approximation_bound(spec, p):>10.4f} {ratio:>6}")
    prev = gap

###############################################################################
# The fine-grid measurement is itself a discretization, so it slightly
# underestimates the true gap.  The bound is what the guarantees use.
#
# For a self-adjoint family the spectrum of the continuous operator lies
# within ``delta`` of the sampled spectrum.

p = 8
X = sample_kernel(spec, p)
delta = approximation_bound(spec, p)
enclosure = spectral_enclosure(delta, calc.spectrum(X))
print("enclosing intervals:", [(round(float(a), 3), round(float(b), 3)) for a, b in enclosure.intervals()])

###############################################################################
# Shift by the identity so the sampled operator is safely invertible, then
# bound the error of its inverse as an approximation of the true inverse.

for p in (2, 8, 32):
    X = sample_kernel(spec, p)
    Y = X + 2 * AlgebraElement.identity(X.geometry)
    inv_norm = calc.operator_norm(calc.invert(Y))
    d = approximation_bound(spec, p)
    print(f"p = {p:>2}: ||Y^-1|| = {inv_norm:.4f}, inverse error bound {inverse_error_bound(d, inv_norm):.4f}")
