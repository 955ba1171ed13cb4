"""Diffusion and reaction coefficient families.

The diffusion coefficient ``phi`` is always a function of ``t = |grad u|**2``
and the reaction coefficient ``psi`` a function of ``t = u**2``.  The radial
solver works with the flux density ``G(w) = phi(w**2) * w`` where ``w = u'``.

Internally the degree functions are evaluated in ``x = log t`` so that very
small and very large ``t`` (far outside the float range for ``t`` itself) can
be probed without overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

__all__ = [
    "DomainError", "PoleError", "NonInvertibleError",
    "ConstantOne", "PowerLaw", "SumOfPowers", "Exponential", "MeanCurvature",
    "Zero", "Power", "DoublePower", "LogPower", "GeneralSum",
    "PhiSpec", "PsiSpec", "Pole", "Branch", "PsiStructure",
    "laplacian", "p_laplacian", "pq_laplacian", "weighted_laplacian",
    "eval_phi", "eval_delta_phi", "eval_two_t_delta_phi_prime",
    "delta_phi_log", "two_t_delta_phi_prime_log", "delta_phi_limits",
    "eval_psi", "eval_delta_psi", "delta_psi_log", "psi_sign_log",
    "delta_psi_limit", "psi_structure", "branch_delta", "inverse_flux_fn",
    "psi_zeros", "SAMPLE_LOG_T",
    "flux", "invert_flux",
]


class DomainError(ValueError):
    """Evaluation outside the domain where the closed form is finite."""


class PoleError(ArithmeticError):
    """A finite degree value was requested at a zero (or pole) of psi."""


class NonInvertibleError(ValueError):
    """The flux map could not be bracketed, so it is not invertible."""


# --------------------------------------------------------------------------
# phi families
# --------------------------------------------------------------------------

def _check_exponent(p):
    if not isinstance(p, Real) or not p > 1:
        raise ValueError(f"exponent must be a real number > 1, got {p!r}")


@dataclass(frozen=True)
class ConstantOne:
    """phi(t) = 1, the Laplacian."""


@dataclass(frozen=True)
class PowerLaw:
    """phi(t) = t**(p/2 - 1), the p-Laplacian."""
    p: Real

    def __post_init__(self):
        _check_exponent(self.p)


@dataclass(frozen=True)
class SumOfPowers:
    """phi(t) = sum_i a_i * t**(p_i/2 - 1), the weighted (p_1, ..., p_r)-Laplacian.

    ``terms`` is a sequence of ``(weight, exponent)`` pairs with positive
    weights and strictly increasing exponents.
    """
    terms: tuple

    def __post_init__(self):
        terms = tuple((w, p) for w, p in self.terms)
        if not terms:
            raise ValueError("SumOfPowers needs at least one term")
        for w, p in terms:
            if not isinstance(w, Real) or not w > 0:
                raise ValueError(f"weights must be positive, got {w!r}")
            _check_exponent(p)
        ps = [p for _, p in terms]
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ValueError(f"exponents must be strictly increasing, got {ps}")
        object.__setattr__(self, "terms", terms)

    @property
    def weights(self):
        return tuple(w for w, _ in self.terms)

    @property
    def exponents(self):
        return tuple(p for _, p in self.terms)


@dataclass(frozen=True)
class Exponential:
    """phi(t) = exp(t/2), the exponential Laplacian."""


@dataclass(frozen=True)
class MeanCurvature:
    """phi(t) = (1 + t)**(-1/2), the prescribed mean curvature operator."""


PhiSpec = Union[ConstantOne, PowerLaw, SumOfPowers, Exponential, MeanCurvature]


def laplacian() -> ConstantOne:
    return ConstantOne()


def p_laplacian(p) -> PowerLaw:
    return PowerLaw(p)


def pq_laplacian(p, q) -> SumOfPowers:
    """The (p, q)-Laplacian with unit weights; equal exponents merge into one term."""
    if p == q:
        return SumOfPowers(((2, p),))
    lo, hi = sorted((p, q))
    return SumOfPowers(((1, lo), (1, hi)))


def weighted_laplacian(exponents, weights=None) -> SumOfPowers:
    if weights is None:
        weights = [1] * len(exponents)
    pairs = sorted(zip(exponents, weights))
    return SumOfPowers(tuple((w, p) for p, w in pairs))


def _as_terms(phi):
    if isinstance(phi, PowerLaw):
        return ((1, phi.p),)
    return phi.terms


# -- pointwise evaluation ---------------------------------------------------

def eval_phi(phi: PhiSpec, t: float) -> float:
    """phi(t) for ``t >= 0``.

    Raises DomainError at ``t = 0`` when some exponent is below 2, because the
    value is infinite there.
    """
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    if isinstance(phi, ConstantOne):
        return 1.0
    if isinstance(phi, (PowerLaw, SumOfPowers)):
        total = 0.0
        for w, p in _as_terms(phi):
            e = float(p) / 2 - 1
            if t == 0:
                if e < 0:
                    raise DomainError(f"phi(0) is infinite for exponent {p}")
                total += float(w) if e == 0 else 0.0
            else:
                total += float(w) * t ** e
        return total
    if isinstance(phi, Exponential):
        return math.exp(t / 2)
    if isinstance(phi, MeanCurvature):
        return 1 / math.sqrt(1 + t)
    raise TypeError(f"unknown phi family {phi!r}")


def _normalized_weights(terms, x):
    """Softmax weights a_i t**(p_i/2-1) / sum_j a_j t**(p_j/2-1), shape (r, len(x))."""
    logw = np.array([math.log(float(w)) + (float(p) / 2 - 1) * x for w, p in terms])
    logw -= logw.max(axis=0)
    ew = np.exp(logw)
    return ew / ew.sum(axis=0)


def delta_phi_log(phi: PhiSpec, x):
    """Degree function 2 t phi'(t) / phi(t) evaluated at ``t = exp(x)``."""
    xa = np.asarray(x, dtype=float)
    if isinstance(phi, ConstantOne):
        out = np.zeros_like(xa)
    elif isinstance(phi, PowerLaw):
        out = np.full_like(xa, float(phi.p) - 2)
    elif isinstance(phi, SumOfPowers):
        if len(phi.terms) == 1:
            out = np.full_like(xa, float(phi.terms[0][1]) - 2)
        else:
            w = _normalized_weights(phi.terms, xa.reshape(-1))
            ps = np.array([float(p) - 2 for _, p in phi.terms])
            out = (ps[:, None] * w).sum(axis=0).reshape(xa.shape)
    elif isinstance(phi, Exponential):
        with np.errstate(over="ignore"):
            out = np.exp(xa)
    elif isinstance(phi, MeanCurvature):
        out = -expit(xa)
    else:
        raise TypeError(f"unknown phi family {phi!r}")
    return out if out.ndim else float(out)


def two_t_delta_phi_prime_log(phi: PhiSpec, x):
    """2 t delta_phi'(t) at ``t = exp(x)``.

    For sums of powers this is the weighted variance of the exponents,
    sum_{i<j} (p_i - p_j)**2 w_i w_j with normalized weights w.
    """
    xa = np.asarray(x, dtype=float)
    if isinstance(phi, (ConstantOne, PowerLaw)):
        out = np.zeros_like(xa)
    elif isinstance(phi, SumOfPowers):
        r = len(phi.terms)
        if r == 1:
            out = np.zeros_like(xa)
        else:
            w = _normalized_weights(phi.terms, xa.reshape(-1))
            ps = [float(p) for _, p in phi.terms]
            acc = np.zeros(w.shape[1])
            for i in range(r):
                for j in range(i + 1, r):
                    acc += (ps[i] - ps[j]) ** 2 * w[i] * w[j]
            out = acc.reshape(xa.shape)
    elif isinstance(phi, Exponential):
        with np.errstate(over="ignore"):
            out = 2 * np.exp(xa)
    elif isinstance(phi, MeanCurvature):
        s = expit(xa)
        out = -2 * s * (1 - s)
    else:
        raise TypeError(f"unknown phi family {phi!r}")
    return out if out.ndim else float(out)


def eval_delta_phi(phi: PhiSpec, t: float) -> float:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    return delta_phi_log(phi, math.log(t))


def eval_two_t_delta_phi_prime(phi: PhiSpec, t: float) -> float:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    return two_t_delta_phi_prime_log(phi, math.log(t))


def delta_phi_limits(phi: PhiSpec):
    """(lim_{t->0+} delta_phi, lim_{t->inf} delta_phi) as floats (possibly infinite)."""
    if isinstance(phi, ConstantOne):
        return 0.0, 0.0
    if isinstance(phi, PowerLaw):
        return float(phi.p) - 2, float(phi.p) - 2
    if isinstance(phi, SumOfPowers):
        return float(phi.exponents[0]) - 2, float(phi.exponents[-1]) - 2
    if isinstance(phi, Exponential):
        return 0.0, math.inf
    if isinstance(phi, MeanCurvature):
        return 0.0, -1.0
    raise TypeError(f"unknown phi family {phi!r}")


# --------------------------------------------------------------------------
# psi families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Zero:
    """psi = 0."""


@dataclass(frozen=True)
class Power:
    """psi(t) = a * t**((q-1)/2), i.e. the reaction term a u**q."""
    a: Real
    q: Real

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("Power needs a nonzero coefficient")


@dataclass(frozen=True)
class DoublePower:
    """psi(t) = t**((m-1)/2) - t**((k-1)/2), i.e. u**m - u**k with m < k."""
    m: Real
    k: Real

    def __post_init__(self):
        if not self.m < self.k:
            raise ValueError(f"DoublePower needs m < k, got m={self.m}, k={self.k}")


def _odd_rational(m) -> Fraction:
    if isinstance(m, str):
        frac = Fraction(m)
    elif isinstance(m, float):
        frac = Fraction(m).limit_denominator(10 ** 6)
        if abs(float(frac) - m) > 1e-12:
            raise ValueError(f"log exponent {m} is not a recognizable rational")
    else:
        frac = Fraction(m)
    if frac.numerator % 2 == 0 or frac.denominator % 2 == 0:
        raise ValueError(f"log exponent must be odd/odd, got {frac}")
    return frac


@dataclass(frozen=True)
class LogPower:
    """psi(t) = a t**((q-1)/2) (log(t)/2)**m, i.e. a u**q (log u)**m.

    ``m`` must be a ratio of odd integers (so negative bases are allowed) and
    ``a * m < 0``.
    """
    a: Real
    q: Real
    m: Fraction

    def __post_init__(self):
        m = _odd_rational(self.m)
        object.__setattr__(self, "m", m)
        if not self.a * m < 0:
            raise ValueError(f"LogPower needs a*m < 0, got a={self.a}, m={m}")


@dataclass(frozen=True)
class GeneralSum:
    """psi(t) = sum_i A_i t**p_i + C t log t + D (Lichnerowicz-type).

    Only evaluated numerically; no closed-form case analysis exists.
    """
    powers: tuple = ()
    log_coef: Real = 0
    const: Real = 0

    def __post_init__(self):
        object.__setattr__(self, "powers", tuple((c, p) for c, p in self.powers))
        if not self.powers and self.log_coef == 0 and self.const == 0:
            raise ValueError("GeneralSum is identically zero; use Zero")


PsiSpec = Union[Zero, Power, DoublePower, LogPower, GeneralSum]


@dataclass(frozen=True)
class Pole:
    """delta_psi at a zero (or pole) of psi: the one-sided limits from the left and right."""
    t: float
    left: float
    right: float


def _odd_pow(y: float, m: Fraction) -> float:
    if y == 0:
        if m < 0:
            raise PoleError("(log t)**m is infinite at t = 1 for m < 0")
        return 0.0
    return math.copysign(abs(y) ** float(m), y)


def eval_psi(psi: PsiSpec, t: float) -> float:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if isinstance(psi, Zero):
        return 0.0
    if isinstance(psi, Power):
        return float(psi.a) * t ** ((float(psi.q) - 1) / 2)
    if isinstance(psi, DoublePower):
        return t ** ((float(psi.m) - 1) / 2) - t ** ((float(psi.k) - 1) / 2)
    if isinstance(psi, LogPower):
        return float(psi.a) * t ** ((float(psi.q) - 1) / 2) * _odd_pow(0.5 * math.log(t), psi.m)
    if isinstance(psi, GeneralSum):
        total = float(psi.const) + float(psi.log_coef) * t * math.log(t)
        for c, p in psi.powers:
            total += float(c) * t ** float(p)
        return total
    raise TypeError(f"unknown psi family {psi!r}")


def _general_sum_log(psi: GeneralSum, x):
    """(psi, t psi'(t)) at t = exp(x) for a GeneralSum."""
    t = np.exp(x)
    val = np.full_like(x, float(psi.const)) + float(psi.log_coef) * t * x
    tder = float(psi.log_coef) * t * (x + 1)
    for c, p in psi.powers:
        tp = np.exp(float(p) * x)
        val = val + float(c) * tp
        tder = tder + float(c) * float(p) * tp
    return val, tder


def delta_psi_log(psi: PsiSpec, x):
    """delta_psi = 2 t psi'(t) / psi(t) at ``t = exp(x)``; +-inf at zeros of psi.

    At an exact zero the returned value is nan; use :func:`eval_delta_psi`
    for the one-sided limits there.
    """
    xa = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if isinstance(psi, Zero):
            raise PoleError("delta_psi is undefined for psi = 0")
        if isinstance(psi, Power):
            out = np.full_like(xa, float(psi.q) - 1)
        elif isinstance(psi, DoublePower):
            m, k = float(psi.m), float(psi.k)
            y = (k - m) / 2 * xa
            # R/(1-R) with R = t**((k-m)/2), written to avoid overflow
            out = (m - 1) + (m - k) / np.expm1(-y)
            out = np.where(y == 0, np.nan, out)
        elif isinstance(psi, LogPower):
            out = (float(psi.q) - 1) + 2 * float(psi.m) / xa
            out = np.where(xa == 0, np.nan, out)
        elif isinstance(psi, GeneralSum):
            val, tder = _general_sum_log(psi, xa)
            out = 2 * tder / val
            out = np.where(val == 0, np.nan, out)
        else:
            raise TypeError(f"unknown psi family {psi!r}")
    return out if out.ndim else float(out)


def psi_sign_log(psi: PsiSpec, x):
    """Sign of psi at ``t = exp(x)`` (-1, 0 or 1), robust for extreme x."""
    xa = np.asarray(x, dtype=float)
    if isinstance(psi, Zero):
        out = np.zeros_like(xa)
    elif isinstance(psi, Power):
        out = np.full_like(xa, math.copysign(1.0, float(psi.a)))
    elif isinstance(psi, DoublePower):
        # t**((m-1)/2) (1 - t**((k-m)/2)) is positive below t = 1
        out = -np.sign(xa)
    elif isinstance(psi, LogPower):
        out = np.sign(float(psi.a)) * np.sign(xa)
    elif isinstance(psi, GeneralSum):
        with np.errstate(over="ignore", invalid="ignore"):
            val, _ = _general_sum_log(psi, xa)
        out = np.sign(val)
    else:
        raise TypeError(f"unknown psi family {psi!r}")
    return out if out.ndim else float(out)


def delta_psi_limit(psi: PsiSpec, t0: float, side: str) -> float:
    """One-sided limit of delta_psi at a zero/pole ``t0`` (``side`` is '-' or '+')."""
    if side not in ("-", "+"):
        raise ValueError("side must be '-' or '+'")
    if isinstance(psi, DoublePower) and t0 == 1:
        return -math.inf if side == "-" else math.inf
    if isinstance(psi, LogPower) and t0 == 1:
        below = -math.inf if psi.m > 0 else math.inf
        return below if side == "-" else -below
    raise ValueError(f"{t0} is not a closed-form zero or pole of {psi!r}")


def eval_delta_psi(psi: PsiSpec, t: float, require_finite: bool = False):
    """delta_psi(t), or a :class:`Pole` carrying the one-sided limits at a psi-zero.

    With ``require_finite=True`` a zero raises :class:`PoleError` instead.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if isinstance(psi, (DoublePower, LogPower)) and t == 1:
        if require_finite:
            raise PoleError(f"delta_psi has a pole at t = 1 for {psi!r}")
        return Pole(1.0, delta_psi_limit(psi, 1.0, "-"), delta_psi_limit(psi, 1.0, "+"))
    val = delta_psi_log(psi, math.log(t))
    if not math.isfinite(val):
        if require_finite:
            raise PoleError(f"delta_psi is not finite at t = {t}")
        return Pole(t, math.nan, math.nan)
    return val


# -- monotone structure of delta_psi ----------------------------------------

@dataclass(frozen=True)
class Branch:
    """An open t-interval where psi has constant sign and delta_psi is monotone.

    ``lim_lo``/``lim_hi`` are the limits of delta_psi at the interval ends and
    ``inverse`` maps a delta_psi value strictly between them back to t.
    """
    lo: float
    hi: float
    sign: int
    lim_lo: float
    lim_hi: float
    inverse: Optional[Callable[[float], float]] = None


@dataclass(frozen=True)
class PsiStructure:
    branches: tuple
    zeros: tuple = ()
    poles: tuple = ()


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def psi_structure(psi: PsiSpec) -> Optional[PsiStructure]:
    """Closed-form sign/monotonicity structure of delta_psi, or None when unavailable."""
    if isinstance(psi, Power):
        v = float(psi.q) - 1
        sgn = 1 if psi.a > 0 else -1
        return PsiStructure((Branch(0.0, math.inf, sgn, v, v),))
    if isinstance(psi, DoublePower):
        m, k = float(psi.m), float(psi.k)

        def inv(d):
            z = (d - (m - 1)) / (m - k)
            return _safe_exp(2 * math.log(z / (1 + z)) / (k - m))

        return PsiStructure(
            (Branch(0.0, 1.0, 1, m - 1, -math.inf, inv),
             Branch(1.0, math.inf, -1, math.inf, k - 1, inv)),
            zeros=(1.0,),
        )
    if isinstance(psi, LogPower):
        q1 = float(psi.q) - 1
        mm = float(psi.m)
        sa = 1 if psi.a > 0 else -1

        def inv(d):
            return _safe_exp(2 * mm / (d - q1))

        below = Branch(0.0, 1.0, -sa, q1, delta_psi_limit(psi, 1.0, "-"), inv)
        above = Branch(1.0, math.inf, sa, delta_psi_limit(psi, 1.0, "+"), q1, inv)
        if psi.m > 0:
            return PsiStructure((below, above), zeros=(1.0,))
        return PsiStructure((below, above), poles=(1.0,))
    return None


SAMPLE_LOG_T = np.linspace(-math.log(1e12), math.log(1e12), 20001)


def _bisect_sign(psi: PsiSpec, xa: float, xb: float, iters: int = 80) -> float:
    sa = psi_sign_log(psi, xa)
    for _ in range(iters):
        xm = 0.5 * (xa + xb)
        sm = psi_sign_log(psi, xm)
        if sm == 0:
            return xm
        if sm == sa:
            xa = xm
        else:
            xb = xm
    return 0.5 * (xa + xb)


def psi_zeros(psi: PsiSpec) -> tuple:
    """Positive zeros of psi (closed form, or sign changes on a log grid refined by bisection).

    Returns None for psi = 0, whose zero set is everything.
    """
    if isinstance(psi, Zero):
        return None
    if isinstance(psi, Power):
        return ()
    if isinstance(psi, DoublePower):
        return (1.0,)
    if isinstance(psi, LogPower):
        return (1.0,) if psi.m > 0 else ()
    with np.errstate(over="ignore", invalid="ignore"):
        sg = psi_sign_log(psi, SAMPLE_LOG_T)
    roots = []
    for i in np.nonzero(sg == 0)[0]:
        roots.append(math.exp(SAMPLE_LOG_T[i]))
    for i in np.nonzero(sg[:-1] * sg[1:] < 0)[0]:
        roots.append(math.exp(_bisect_sign(psi, SAMPLE_LOG_T[i], SAMPLE_LOG_T[i + 1])))
    return tuple(sorted(roots))


def branch_delta(psi: PsiSpec, branch: Branch, t: float) -> float:
    """delta_psi at ``t`` on ``branch``, using the branch limits at its ends."""
    if t <= branch.lo:
        return branch.lim_lo
    if t >= branch.hi:
        return branch.lim_hi
    return delta_psi_log(psi, math.log(t))


# --------------------------------------------------------------------------
# flux map
# --------------------------------------------------------------------------

def flux(phi: PhiSpec, w: float) -> float:
    """G(w) = phi(w**2) w, extended by G(0) = 0."""
    if w == 0:
        return 0.0
    if isinstance(phi, ConstantOne):
        return float(w)
    if isinstance(phi, (PowerLaw, SumOfPowers)):
        aw = abs(w)
        return math.copysign(sum(float(a) * aw ** (float(p) - 1) for a, p in _as_terms(phi)), w)
    return eval_phi(phi, w * w) * w


def _power_inverse(p: float):
    e = 1 / (p - 1)

    def inv(g):
        return math.copysign(abs(g) ** e, g) if g else 0.0
    return inv


def invert_flux(phi: PhiSpec, g: float) -> float:
    """The unique w with flux(phi, w) = g.

    The bracket starts at |g| and is doubled (or halved) until it encloses
    the root; refinement uses Brent's bisection/secant hybrid to a relative
    tolerance of 1e-12.
    """
    if g == 0:
        return 0.0
    if isinstance(phi, ConstantOne):
        return float(g)
    if isinstance(phi, PowerLaw):
        return _power_inverse(float(phi.p))(g)
    if isinstance(phi, SumOfPowers) and len(phi.terms) == 1:
        a, p = phi.terms[0]
        return _power_inverse(float(p))(g / float(a))
    target = abs(g)
    hi = target
    for _ in range(2100):
        if flux(phi, hi) >= target:
            break
        hi *= 2
        if not math.isfinite(hi):
            break
    else:
        hi = math.inf
    if not math.isfinite(hi) or flux(phi, hi) < target:
        raise NonInvertibleError(f"flux of {phi!r} never reaches {target}")
    lo = hi / 2
    while lo > 0 and flux(phi, lo) > target:
        lo /= 2
    w = brentq(lambda v: flux(phi, v) - target, lo, hi, xtol=1e-300, rtol=1e-13, maxiter=500)
    return math.copysign(w, g)


def inverse_flux_fn(phi: PhiSpec) -> Callable[[float], float]:
    """A fast scalar inverse of the flux map for repeated use in the solver."""
    if isinstance(phi, ConstantOne):
        return float
    if isinstance(phi, PowerLaw):
        return _power_inverse(float(phi.p))
    if isinstance(phi, SumOfPowers) and len(phi.terms) == 1:
        a, p = phi.terms[0]
        base = _power_inverse(float(p))
        return lambda g: base(g / float(a))
    return lambda g: invert_flux(phi, g)
