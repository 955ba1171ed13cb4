"""Radial solutions as a sanity check on the gradient estimate.

First the solver is checked against sin(r)/r. Then Allen-Cahn solutions
in R^3 are swept over radii: they oscillate and change sign a little past
r = 3, so the sweep flags positive_ok = False for the larger balls, in line
with the Liouville conclusion that the only bounded positive entire
solution is u = 1.
"""
import numpy as np

from phigrad import families as fam
from phigrad.radial import ModelSpace, solve_radial, sweep_radii

R3 = ModelSpace(3)
sol = solve_radial(fam.laplacian(), fam.Power(1, 1), R3, 1.0, 1.5, 1e-3)
exact = np.sin(sol.grid[1:]) / sol.grid[1:]
print(f"max error vs sin(r)/r: {np.max(np.abs(sol.u[1:] - exact)):.2e}")

allen_cahn = fam.DoublePower(1, 3)
for u0 in (0.3, 0.5, 0.8, 1.0):
    rows = sweep_radii(fam.laplacian(), allen_cahn, R3, u0, [1, 2, 4, 8], 1e-2)
    cells = ", ".join(f"R={r.R:g}: c_hat={r.c_hat:.4g} pos={int(r.positive_ok)}" for r in rows)
    print(f"u0={u0}: {cells}")

# Hyperbolic space: the estimate scales with 1 + sqrt(K) R.
H3 = ModelSpace(3, 1.0)
rows = sweep_radii(fam.laplacian(), fam.Zero(), H3, 1.0, [1, 2], 1e-2)
print("harmonic on H^3:", [(r.R, r.c_hat) for r in rows])
