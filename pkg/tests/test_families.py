import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phigrad import families as fam

from . import oracles

exponent = st.floats(1.1, 5.0)
log_t = st.floats(-20.0, 20.0)


def test_constructors():
    assert fam.laplacian() == fam.ConstantOne()
    assert fam.p_laplacian(3) == fam.PowerLaw(3)
    pq = fam.pq_laplacian(4, 2)
    assert pq.exponents == (2, 4) and pq.weights == (1, 1)
    merged = fam.pq_laplacian(3, 3)
    assert merged.terms == ((2, 3),)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        fam.DoublePower(3, 1)
    with pytest.raises(ValueError):
        fam.Power(0, 2)
    with pytest.raises(ValueError):
        fam.LogPower(1, 2, 1)          # a*m must be negative
    with pytest.raises(ValueError):
        fam.LogPower(1, 2, Fraction(1, 2))  # even denominator
    with pytest.raises(ValueError):
        fam.GeneralSum()


def test_log_power_accepts_string_exponent():
    psi = fam.LogPower(-1, 2, "1/3")
    assert psi.m == Fraction(1, 3)


def test_eval_phi_domain():
    assert fam.eval_phi(fam.p_laplacian(3), 0) == 0.0
    with pytest.raises(fam.DomainError):
        fam.eval_phi(fam.p_laplacian(1.5), 0)
    with pytest.raises(fam.DomainError):
        fam.eval_phi(fam.laplacian(), -1)
    assert fam.eval_phi(fam.MeanCurvature(), 3) == pytest.approx(0.5)


@given(p=exponent, q=exponent, x=log_t)
def test_delta_phi_matches_finite_difference(p, q, x):
    phi = fam.pq_laplacian(p, q)
    t = math.exp(x)
    assert fam.eval_delta_phi(phi, t) == pytest.approx(oracles.fd_delta_phi(phi, t), abs=1e-6)


@given(p=exponent, q=exponent, x=st.floats(-10.0, 10.0))
def test_second_degree_matches_finite_difference(p, q, x):
    phi = fam.pq_laplacian(p, q)
    t = math.exp(x)
    got = fam.eval_two_t_delta_phi_prime(phi, t)
    assert got == pytest.approx(oracles.fd_two_t_delta_prime(phi, t), abs=1e-5)
    assert got >= 0


@pytest.mark.parametrize("phi", [fam.Exponential(), fam.MeanCurvature()])
@pytest.mark.parametrize("t", [1e-3, 0.5, 2.0, 7.0])
def test_nonpower_degree_functions(phi, t):
    assert fam.eval_delta_phi(phi, t) == pytest.approx(oracles.fd_delta_phi(phi, t), abs=1e-6)
    assert fam.eval_two_t_delta_phi_prime(phi, t) == pytest.approx(
        oracles.fd_two_t_delta_prime(phi, t), abs=1e-5)


def test_delta_phi_limits():
    assert fam.delta_phi_limits(fam.pq_laplacian(2, 4)) == (0.0, 2.0)
    assert fam.delta_phi_limits(fam.Exponential()) == (0.0, math.inf)
    assert fam.delta_phi_limits(fam.MeanCurvature()) == (0.0, -1.0)


def test_delta_phi_extreme_arguments_stay_finite():
    phi = fam.weighted_laplacian([1.5, 2.5, 4])
    xs = np.array([-5000.0, 0.0, 5000.0])
    out = fam.delta_phi_log(phi, xs)
    assert np.allclose(out, [-0.5, out[1], 2.0])


@given(m=st.floats(-2, 4), gap=st.floats(0.1, 4), x=st.floats(-30, 30).filter(lambda v: abs(v) > 1e-3))
def test_double_power_delta_matches_reference(m, gap, x):
    psi = fam.DoublePower(m, m + gap)
    got = fam.delta_psi_log(psi, x)
    ref = oracles.ref_delta_psi(psi, np.array([x]))[0]
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-9)
    t = math.exp(x)
    h = 1e-6
    fd = 2 * (math.log(abs(fam.eval_psi(psi, t * math.exp(h)))) - math.log(abs(fam.eval_psi(psi, t * math.exp(-h))))) / (2 * h)
    assert got == pytest.approx(fd, rel=1e-5, abs=1e-5)


def test_delta_psi_poles():
    pole = fam.eval_delta_psi(fam.DoublePower(1, 3), 1.0)
    assert isinstance(pole, fam.Pole)
    assert (pole.left, pole.right) == (-math.inf, math.inf)
    with pytest.raises(fam.PoleError):
        fam.eval_delta_psi(fam.DoublePower(1, 3), 1.0, require_finite=True)
    lp = fam.eval_delta_psi(fam.LogPower(1, 2, -1), 1.0)
    assert (lp.left, lp.right) == (math.inf, -math.inf)


@pytest.mark.parametrize("psi", [fam.Power(-2, 3), fam.DoublePower(0.5, 2), fam.LogPower(-1, 2, 1),
                                 fam.LogPower(2, 1.5, Fraction(-1, 3))])
def test_sign_matches_values(psi):
    for x in np.linspace(-8, 8, 33):
        if x == 0:
            continue
        v = fam.eval_psi(psi, math.exp(x))
        assert fam.psi_sign_log(psi, x) == np.sign(v)


def test_zeros():
    assert fam.psi_zeros(fam.Zero()) is None
    assert fam.psi_zeros(fam.Power(1, 2)) == ()
    assert fam.psi_zeros(fam.DoublePower(1, 3)) == (1.0,)
    assert fam.psi_zeros(fam.LogPower(-1, 2, 1)) == (1.0,)
    assert fam.psi_zeros(fam.LogPower(1, 2, -1)) == ()
    roots = fam.psi_zeros(fam.GeneralSum(((1, 1), (-1, 2)), 0, 0))   # t - t^2
    assert roots == pytest.approx((1.0,))
    roots = fam.psi_zeros(fam.GeneralSum(((1, 1),), 0, -4))          # t - 4
    assert roots == pytest.approx((4.0,), rel=1e-12)


@pytest.mark.parametrize("psi", [fam.DoublePower(-0.5, 2.5), fam.LogPower(1, 3, -1), fam.LogPower(-1, 0.5, 3)])
def test_branch_inverse_roundtrip(psi):
    for br in fam.psi_structure(psi).branches:
        for frac in (0.1, 0.5, 0.9):
            t = br.lo + frac * (br.hi - br.lo) if math.isfinite(br.hi) else br.lo + 10 * frac
            d = fam.delta_psi_log(psi, math.log(t))
            assert br.inverse(d) == pytest.approx(t, rel=1e-9)


def test_flux_inverse_examples():
    assert fam.invert_flux(fam.p_laplacian(3), 4.0) == pytest.approx(2.0, rel=1e-12)
    assert fam.invert_flux(fam.laplacian(), -3.5) == -3.5
    with pytest.raises(fam.NonInvertibleError):
        fam.invert_flux(fam.MeanCurvature(), 2.0)


@settings(max_examples=60)
@given(p=exponent, q=exponent, w=st.floats(-1e3, 1e3).filter(lambda v: abs(v) > 1e-6))
def test_flux_roundtrip(p, q, w):
    phi = fam.pq_laplacian(p, q)
    g = fam.flux(phi, w)
    assert fam.invert_flux(phi, g) == pytest.approx(w, rel=1e-10)
    assert fam.inverse_flux_fn(phi)(g) == pytest.approx(w, rel=1e-10)


@given(w1=st.floats(-50, 50), w2=st.floats(-50, 50))
def test_flux_is_increasing(w1, w2):
    phi = fam.weighted_laplacian([1.5, 2, 3.5])
    if w1 < w2:
        assert fam.flux(phi, w1) < fam.flux(phi, w2)
