"""Degree bounds for the power-type operators.

For each operator we print the exact closed-form bounds next to the
numerically searched infimum of Q. The numeric value never falls below the
closed form, and for sums of powers it is often noticeably larger.
"""
from fractions import Fraction as F

from phigrad import families as fam
from phigrad.degree import closed_form_bounds, degree_profile

OPERATORS = {
    "Laplacian": fam.laplacian(),
    "3/2-Laplacian": fam.p_laplacian(F(3, 2)),
    "3-Laplacian": fam.p_laplacian(3),
    "(2,4)-Laplacian": fam.pq_laplacian(2, 4),
    "(2, 5/2, 3)-weighted": fam.weighted_laplacian([2, F(5, 2), 3]),
}

for n in (3, 5):
    print(f"n = {n}")
    print(f"  {'operator':<22}{'l':>6}{'d':>6}{'gamma closed':>16}{'gamma numeric':>16}{'Gamma':>10}")
    for name, phi in OPERATORS.items():
        c = closed_form_bounds(phi, F(n))
        prof = degree_profile(phi, n)
        print(f"  {name:<22}{str(c['l']):>6}{str(c['d']):>6}{str(c['gamma']):>16}"
              f"{prof.gamma:>16.10f}{str(c['Gamma']):>10}")
    print()

# Operators outside the power family fail (phi1) and get no bounds at all.
for phi in (fam.Exponential(), fam.MeanCurvature()):
    print(type(phi).__name__, "->", degree_profile(phi, 3).failed_condition(), "fails")
