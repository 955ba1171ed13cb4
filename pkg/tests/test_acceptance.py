"""Acceptance criteria AC1..AC9, one PASS/FAIL line each in the terminal summary."""
from __future__ import annotations

import csv
import io
import math
import random
import statistics
import time
from fractions import Fraction

import numpy as np
import pytest

from phigrad import families as fam
from phigrad.cli import main
from phigrad.coupling import compute_i_psi, compute_theta_big
from phigrad.degree import closed_form_bounds, degree_bounds, degree_profile
from phigrad.radial import ModelSpace, solve_radial, sweep_radii
from phigrad.verdict import (
    HypothesisError, classify, critical_dimensions, log_reaction_conclusion,
    theorem_double_power, theorem_log_reaction, theorem_power_reaction,
)

from . import oracles

AC1 = "AC1 degree table reproduction"
AC2 = "AC2 (p,q) criterion equivalence"
AC3 = "AC3 power/double-power/log rows"
AC4 = "AC4 critical dimensions"
AC5 = "AC5 Theta vs dense sampling"
AC6 = "AC6 radial solver order"
AC7 = "AC7 gradient-ratio boundedness"
AC8 = "AC8 (m,k) region scan"
AC9 = "AC9 byte-identical CSV"

F = Fraction


# -- AC1 ---------------------------------------------------------------------

TABLE_COLUMNS = [
    ("laplace", fam.laplacian(), ()),
    ("p", fam.p_laplacian(F(3, 2)), (F(3, 2),)),
    ("p", fam.p_laplacian(2), (F(2),)),
    ("p", fam.p_laplacian(3), (F(3),)),
    ("pq", fam.pq_laplacian(2, 4), (F(2), F(4))),
    ("pq", fam.pq_laplacian(3, 5), (F(3), F(5))),
    ("weighted", fam.weighted_laplacian([2, F(5, 2), 3]), (F(2), F(5, 2), F(3))),
]


@pytest.mark.criterion(AC1)
def test_ac1_table_columns():
    t0 = time.perf_counter()
    for n in (2, 3, 5, 10):
        nf = F(n)
        for kind, phi, params in TABLE_COLUMNS:
            l, d, gamma_c, Gamma_c = oracles.table1(kind, params, nf)
            closed = closed_form_bounds(phi, nf)
            assert (closed["l"], closed["d"]) == (l, d), (kind, params)
            assert closed["Gamma"] == Gamma_c and closed["gamma"] == gamma_c, (kind, params, n)
            assert isinstance(closed["Gamma"], (F, int))
            bl, bd, _ = degree_bounds(phi)
            assert (bl, bd) == (l, d)
            prof = degree_profile(phi, n)
            assert prof.Gamma == float(Gamma_c)
            assert prof.gamma >= float(gamma_c) - 1e-9, (kind, params, n, prof.gamma)
    assert time.perf_counter() - t0 < 5.0


# -- AC2 ---------------------------------------------------------------------

@pytest.mark.criterion(AC2)
def test_ac2_pq_grid():
    t0 = time.perf_counter()
    vals = [1 + 4 * i / 30 for i in range(1, 31)]
    checked = mismatched = 0
    for n in range(2, 11):
        for p in vals:
            for q in vals:
                ref = 4 * (p - 1) * (q - 1) - (n - 1) * (p - q) ** 2
                v = classify(fam.pq_laplacian(p, q), fam.Zero(), n)
                if abs(v.margin) < 1e-10 or abs(ref) < 1e-10:
                    continue
                checked += 1
                mismatched += v.applicable != (ref > 0)
    elapsed = time.perf_counter() - t0
    assert checked > 7000
    assert mismatched == 0
    assert elapsed < 60.0, elapsed


# -- AC3 ---------------------------------------------------------------------

AC3_P = [F(3, 2), F(2), F(3), F(4)]
AC3_N = range(2, 9)


def _phi_for(p):
    return fam.laplacian() if p == 2 else fam.p_laplacian(p)


def _off_boundary(v):
    return not (v.boundary or abs(v.margin) < 1e-10)


@pytest.mark.criterion(AC3)
@pytest.mark.parametrize("a", [1, -1])
def test_ac3_power_rows(a):
    qs = [F(i, 8) for i in range(1, 81)]
    seen = 0
    for p in AC3_P:
        phi = _phi_for(p)
        for n in AC3_N:
            for q in qs:
                psi = fam.Power(a, q)
                v = classify(phi, psi, n, assume_nonneg_ricci_bounded=True)
                row = oracles.table2_power(p, F(n), a, q)
                assert theorem_power_reaction(p, p, a, q, n) == row
                if _off_boundary(v):
                    seen += 1
                    assert v.applicable == row, (p, n, a, q, v.summary())
                    if v.applicable:
                        assert v.liouville.kind == "none"
    assert seen > 2000


@pytest.mark.criterion(AC3)
def test_ac3_double_power_rows():
    grid = [F(i, 4) for i in range(-8, 29)]
    seen = 0
    for p in AC3_P:
        phi = _phi_for(p)
        for n in (2, 3, 5, 8):
            for m in grid:
                for k in grid:
                    if not m < k:
                        continue
                    v = classify(phi, fam.DoublePower(m, k), n, assume_nonneg_ricci_bounded=True)
                    row = oracles.table2_double(p, F(n), m, k)
                    assert theorem_double_power(p, p, m, k, n) == row
                    if _off_boundary(v):
                        seen += 1
                        assert v.applicable == row, (p, n, m, k, v.summary())
                        if v.applicable:
                            assert v.liouville.kind == "constant"
                            assert v.liouville.values == (1.0,)
    assert seen > 5000


@pytest.mark.criterion(AC3)
@pytest.mark.parametrize("a,m", [(1, F(-1)), (-1, F(1)), (2, F(-1, 3)), (-3, F(3, 5))])
def test_ac3_log_rows(a, m):
    qs = [F(i, 8) for i in range(1, 81)]
    seen = 0
    for p in AC3_P:
        phi = _phi_for(p)
        for n in AC3_N:
            for q in qs:
                v = classify(phi, fam.LogPower(a, q, m), n, assume_nonneg_ricci_bounded=True)
                row = oracles.table3_log(p, F(n), q)
                assert theorem_log_reaction(p, p, a, q, m, n) == row
                if _off_boundary(v):
                    seen += 1
                    assert v.applicable == row, (p, n, a, q, m, v.summary())
                    if v.applicable:
                        assert v.liouville == log_reaction_conclusion(m)
    assert seen > 2000


# -- AC4 ---------------------------------------------------------------------

@pytest.mark.criterion(AC4)
def test_ac4_critical_dimensions():
    n1, n2 = critical_dimensions(2, 3)
    assert (n1, n2) == (3, 1)
    assert isinstance(n1, F) and isinstance(n2, F)
    assert critical_dimensions(2, 2) == (math.inf, math.inf)
    assert critical_dimensions(F(5, 2), F(5, 2)) == (math.inf, math.inf)
    for n in (3, 4, 7):
        with pytest.raises(HypothesisError):
            theorem_double_power(2, 3, 1, 3, n)
    assert theorem_double_power(2, 3, 1, 3, 2) in (True, False)


# -- AC5 ---------------------------------------------------------------------

def _random_instance(rng: random.Random):
    kind = rng.choice(["one", "p", "pq", "w"])
    if kind == "one":
        phi = fam.laplacian()
    elif kind == "p":
        phi = fam.p_laplacian(round(rng.uniform(1.2, 4.0), 3))
    elif kind == "pq":
        p = round(rng.uniform(1.5, 3.5), 3)
        phi = fam.pq_laplacian(p, round(p + rng.uniform(0.25, 1.5), 3))
    else:
        p = round(rng.uniform(1.5, 3.0), 3)
        phi = fam.weighted_laplacian([p, round(p + 0.3, 3), round(p + 0.7, 3)])
    pk = rng.choice(["power", "double", "log"])
    if pk == "power":
        psi = fam.Power(rng.choice([1, -1]) * round(rng.uniform(0.5, 2), 3), round(rng.uniform(0.1, 6), 3))
    elif pk == "double":
        m = round(rng.uniform(-1, 4), 3)
        psi = fam.DoublePower(m, round(m + rng.uniform(0.25, 4), 3))
    else:
        m = rng.choice([F(1), F(-1), F(1, 3), F(-3, 5)])
        a = -1 if m > 0 else 1
        psi = fam.LogPower(a, round(rng.uniform(0.1, 6), 3), m)
    return phi, psi, rng.randint(2, 8)


@pytest.mark.criterion(AC5)
def test_ac5_theta_vs_dense_sampling():
    t0 = time.perf_counter()
    rng = random.Random(20240611)
    kinds = set()
    for _ in range(50):
        phi, psi, n = _random_instance(rng)
        i_psi = compute_i_psi(phi, psi, n)
        got = compute_theta_big(phi, psi, n, i_psi)
        ref = oracles.dense_theta(phi, psi, n)
        if got == math.inf:
            kinds.add("inf")
            assert ref > 1e20, (phi, psi, n, ref)
        elif got == -math.inf:
            kinds.add("-inf")
            assert ref == -math.inf, (phi, psi, n, ref)
        else:
            kinds.add("finite")
            assert abs(got - ref) <= 1e-6 * max(abs(ref), 1e-300), (phi, psi, n, got, ref)
    # delta_psi blows up only next to zeros of psi, and for these families
    # those neighbourhoods lie inside I_psi, so +inf cannot occur here.
    assert {"-inf", "finite"} <= kinds
    assert time.perf_counter() - t0 < 30.0


# -- AC6 ---------------------------------------------------------------------

@pytest.mark.criterion(AC6)
def test_ac6_radial_convergence_order():
    t0 = time.perf_counter()
    space = ModelSpace(3)
    errs = []
    for h in (8e-3, 4e-3, 2e-3, 1e-3):
        sol = solve_radial(fam.laplacian(), fam.Power(1, 1), space, 1.0, 1.5, h)
        errs.append(float(np.max(np.abs(sol.u - oracles.radial_sine(sol.grid)))))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert errs[-1] < 1e-9, errs
    assert min(orders) >= 3.5, orders
    assert time.perf_counter() - t0 < 10.0


# -- AC7 ---------------------------------------------------------------------

ALLEN_CAHN = fam.DoublePower(1, 3)


@pytest.mark.criterion(AC7)
def test_ac7_c_hat_bounded_across_radii():
    space = ModelSpace(3)
    report = []
    ok = True
    for u0 in (0.3, 0.5, 0.8):
        rows = sweep_radii(fam.laplacian(), ALLEN_CAHN, space, u0, [1, 2, 4, 8], 1e-2)
        c = [r.c_hat for r in rows]
        pos = [r.positive_ok for r in rows]
        finite = [x for x in c if math.isfinite(x)]
        bounded = bool(finite) and max(finite) <= 1.25 * statistics.median(finite)
        report.append((u0, pos, c))
        ok &= all(pos) and bounded
    assert ok, report


@pytest.mark.criterion(AC7)
def test_ac7_constant_root_has_zero_ratio():
    space = ModelSpace(3)
    for R in (1, 2, 4, 8):
        sol = solve_radial(fam.laplacian(), ALLEN_CAHN, space, 1.0, R, 1e-2)
        assert sol.diagnostics.positive_ok
        assert abs(sol.diagnostics.c_hat) <= 1e-12


# -- AC8 ---------------------------------------------------------------------

FIG_CONFIG = """
n = 3
[phi]
kind = "power_law"
p = 2
[psi]
kind = "double_power"
m = 0
k = 1
[scan]
compare = "wang"
x = {{ param = "psi.m", start = -1.0, stop = 5.0, num = 25 }}
y = {{ param = "psi.k", start = -1.0, stop = 5.0, num = 25 }}
[output]
csv = "{csv}"
"""


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.criterion(AC8)
def test_ac8_region_scan(tmp_path):
    out = tmp_path / "scan.csv"
    cfg = tmp_path / "fig.toml"
    cfg.write_text(FIG_CONFIG.format(csv=out.as_posix()))
    assert main(["scan", "--config", str(cfg)], out=io.StringIO()) == 0
    rows = _read_csv(out)
    assert len(rows) == 625
    ours, expected, comparison = set(), set(), set()
    for r in rows:
        m, k = float(r["param1"]), float(r["param2"])
        if r["admissible"] == "1":
            ours.add((m, k))
        if m < 3 and k > 1 and m < k:
            expected.add((m, k))
        if r["comparison"] == "1":
            comparison.add((m, k))
    assert ours == expected
    assert comparison < ours
    assert len(ours - comparison) > 0


# -- AC9 ---------------------------------------------------------------------

BASE = """
n = 3
[phi]
kind = "pq"
p = 2
q = 2.5
[psi]
kind = "double_power"
m = 1
k = 3
"""

EXTRA = {
    "analyze": "",
    "verdict": "",
    "constants": "",
    "scan": """
[scan]
x = { param = "psi.m", start = -1.0, stop = 2.0, num = 7 }
y = { param = "psi.k", start = 1.5, stop = 4.0, num = 6 }
""",
    "verify": """
[solver]
u0 = 0.5
radii = [1.0, 1.5]
h = 0.01
""",
}


@pytest.mark.criterion(AC9)
@pytest.mark.parametrize("command", sorted(EXTRA))
def test_ac9_determinism(tmp_path, command):
    cfg = tmp_path / "run.toml"
    cfg.write_text(BASE + EXTRA[command])
    blobs = []
    for i in range(2):
        path = tmp_path / f"out{i}.csv"
        code = main([command, "--config", str(cfg), "--csv", str(path)], out=io.StringIO())
        assert code in (0, 2)
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]
    assert len(blobs[0]) > 0
