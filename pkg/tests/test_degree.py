import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phigrad import families as fam
from phigrad.degree import (
    closed_form_bounds, degree_bounds, degree_profile, numeric_inf_sup, phi2_bounds, q_function,
)

from . import oracles


def test_numeric_inf_sup_known_function():
    # t/(1+t^2) has sup 1/2 at t = 1 and tends to 0 at both ends
    res = numeric_inf_sup(lambda t: t / (1 + t * t), (0.0, 0.0))
    assert res.sup == pytest.approx(0.5, rel=1e-12)
    assert res.sup_at == pytest.approx(1.0, rel=1e-4)
    assert res.inf == 0.0 and res.inf_at in ("0+", "inf")


def test_numeric_inf_sup_constant():
    res = numeric_inf_sup(lambda t: np.full_like(t, 3.0), (3.0, 3.0))
    assert res == (3.0, 3.0, "all", "all")


def test_numeric_inf_sup_refines_narrow_dip():
    # a dip between samples is still found by refinement
    f = lambda x: 1 - np.exp(-((x - 0.123456) / 1e-3) ** 2) * 0.5
    res = numeric_inf_sup(f, (1.0, 1.0), n_points=2000, log_argument=True)
    assert res.inf == pytest.approx(0.5, abs=1e-9)


def test_degree_bounds_families():
    assert degree_bounds(fam.laplacian())[:2] == (0, 0)
    assert degree_bounds(fam.p_laplacian(Fraction(3, 2)))[:2] == (Fraction(-1, 2), Fraction(-1, 2))
    l, d, wit = degree_bounds(fam.Exponential())
    assert (l, d) == (0, math.inf)
    l, d, _ = degree_bounds(fam.MeanCurvature())
    assert (l, d) == (-1, 0)


def test_non_power_profiles_fail_phi1():
    assert degree_profile(fam.Exponential(), 3).failed_condition() == "phi1"
    assert degree_profile(fam.MeanCurvature(), 3).failed_condition() == "phi1"
    assert closed_form_bounds(fam.Exponential(), 3) is None


def test_closed_forms_exact():
    c = closed_form_bounds(fam.pq_laplacian(2, 4), Fraction(3))
    assert c == {"l": 0, "d": 2, "gamma": Fraction(1, 3), "Gamma": Fraction(9, 2)}
    c = closed_form_bounds(fam.weighted_laplacian([2, Fraction(5, 2), 3]), 3)
    assert c["gamma"] == 0 and c["Gamma"] == 2


def test_profile_uses_numeric_gamma():
    prof = degree_profile(fam.weighted_laplacian([2, Fraction(5, 2), 3]), 3)
    assert prof.gamma > 0 and prof.phi2_ok
    assert prof.gamma_closed == 0


def test_real_dimension_accepted():
    prof = degree_profile(fam.p_laplacian(3), 2.5)
    assert prof.gamma == pytest.approx(4 / 1.5)


@settings(max_examples=25, deadline=None)
@given(p=st.floats(1.1, 5), gap=st.floats(0.05, 3), n=st.integers(2, 10))
def test_two_term_gamma_bounds(p, gap, n):
    phi = fam.pq_laplacian(p, p + gap)
    b = phi2_bounds(phi, n)
    closed = closed_form_bounds(phi, n)
    assert b.gamma >= float(closed["gamma"]) - 1e-9
    assert b.Gamma == pytest.approx(float(closed["Gamma"]))
    # the reported infimum is a sampled value of Q up to refinement accuracy
    xs = np.linspace(-60, 60, 4001)
    q = (oracles.ref_delta_phi(phi, xs) + 1) ** 2 / (n - 1) - np.array(
        [oracles.fd_two_t_delta_prime(phi, math.exp(x)) if abs(x) < 30 else 0.0 for x in xs])
    assert b.gamma <= q.min() + 1e-5


@given(t=st.floats(1e-3, 1e3))
def test_q_function_definition(t):
    phi = fam.pq_laplacian(2, 3.5)
    ref = (oracles.fd_delta_phi(phi, t) + 1) ** 2 / 2 - oracles.fd_two_t_delta_prime(phi, t)
    assert q_function(phi, 3, t) == pytest.approx(ref, abs=1e-5)


def test_profile_is_hashable_and_cached():
    a = degree_profile(fam.p_laplacian(3), 4)
    assert degree_profile(fam.p_laplacian(3), 4) is a
