r"""
A lattice wave equation with three planar defects
=================================================

After a Fourier transform in the lattice variable, a damped wave on the
cubic lattice with potentials on three coordinate planes becomes an
operator on the unit cube: multiplication by the symbol

    A(k) = lambda - i eps - 4 sum_i sin^2(pi k_i)

minus one averaging term per defect plane.  Sampling the symbol at cell
centers of a ``p^3`` grid gives an element with eight representation
blocks, and the stationary solution is explicit in their inverses.
"""

import numpy as np

from opcalc.algebra import apply
from opcalc.schrodinger import (
    SchrodingerConfig,
    build_operator,
    classify_spectrum,
    error_report,
    l2_distance,
    solve_wavefunction,
)

cfg = SchrodingerConfig(lam=1.0, epsilon=0.5, V=(2.0, -1.0, 0.5), p=4)
sol = solve_wavefunction(cfg)

###############################################################################
# The solution is constant on each of the 64 cells.  Check it against the
# operator on a finer grid.

X = build_operator(cfg)
u = sol.on_grid(2)
print("max residual |A psi - 1|:", np.abs(apply(X, u).values - 1).max())
print("psi at k = (0.1, 0.6, 0.3):", sol(np.array([0.1, 0.6, 0.3])))
print("L2 norm of psi:", sol.l2_norm())

###############################################################################
# Lattice amplitudes are Fourier coefficients of ``psi``.  They are computed
# cell by cell in closed form.

for n in ([0, 0, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1]):
    print(f"psi_hat{tuple(n)} = {sol.fourier_coefficient(n):.5f}")

###############################################################################
# Refining the grid changes the solution by much less than the stated gap.

fine = solve_wavefunction(SchrodingerConfig(1.0, 0.5, cfg.V, 8))
print(f"||psi(4) - psi(8)|| = {l2_distance(sol, fine):.4f}")
print("reported gaps:", {k: round(v, 2) for k, v in error_report(cfg).items()})

###############################################################################
# Eigenvalues of the block with subset ``alpha`` belong to waves that move
# freely along ``|alpha|`` directions.  Layers keep only the values that are
# new at that level.

layers = classify_spectrum(cfg).labeled_layers()
for name, vals in layers.items():
    vals = np.sort(vals.real)
    shown = np.round(vals[:4], 3)
    print(f"{name:>7}: {vals.size:3d} values, lowest {shown}")
