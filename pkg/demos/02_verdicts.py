"""Verdicts for a handful of reaction terms on R^n.

Each call runs the three checks in order and reports which one fails, or
the Harnack and Liouville consequences when the estimate applies.
"""
from phigrad import families as fam
from phigrad.verdict import classify, critical_dimensions, theorem_double_power

CASES = [
    ("Allen-Cahn, Laplacian, n=3", fam.laplacian(), fam.DoublePower(1, 3), 3),
    ("Lane-Emden u^2, n=3", fam.laplacian(), fam.Power(1, 2), 3),
    ("Lane-Emden u^5, n=3 (too supercritical)", fam.laplacian(), fam.Power(1, 5), 3),
    ("absorption -u^4, 3-Laplacian, n=4", fam.p_laplacian(3), fam.Power(-1, 4), 4),
    ("u log u, n=3", fam.laplacian(), fam.LogPower(-1, 1.5, 1), 3),
    ("(2,4)-Laplacian, no reaction, n=5", fam.pq_laplacian(2, 4), fam.Zero(), 5),
    ("mean curvature operator", fam.MeanCurvature(), fam.Zero(), 3),
]

for title, phi, psi, n in CASES:
    v = classify(phi, psi, n, assume_nonneg_ricci_bounded=True)
    print(f"{title}\n  {v.summary()}")
    if v.liouville:
        print(f"  bounded positive solutions: {v.liouville.describe()}")

# For a (2,3)-Laplacian the closed-form double-power criterion only covers n < N1.
n1, n2 = critical_dimensions(2, 3)
print(f"\n(2,3)-Laplacian critical dimensions: N1 = {n1}, N2 = {n2}")
# At n = 2 we are above N2, so only the strong closed-form pair applies; it
# rejects u - u^3, and so does the general check.
print("closed-form criterion at n = 2, u - u^3:", theorem_double_power(2, 3, 1, 3, 2))
print("general check:", classify(fam.pq_laplacian(2, 3), fam.DoublePower(1, 3), 2).summary())
