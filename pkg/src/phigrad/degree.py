"""Bounds on the degree function and on the quadratic form Q_n.

Condition (phi1) asks for ``-1 < l <= delta_phi(t) <= d < inf`` and condition
(phi2) for ``0 < gamma <= Q_n(t) <= Gamma < inf`` with

    Q_n(t) = (delta_phi(t) + 1)**2 / (n - 1) - 2 t delta_phi'(t).

The bounds ``l`` and ``d`` are known in closed form for every family.  For
``gamma`` and ``Gamma`` the closed forms are available for the power-type
families only; every family also goes through :func:`numeric_inf_sup`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .families import (
    ConstantOne, Exponential, MeanCurvature, PhiSpec, PowerLaw, SumOfPowers,
    delta_phi_limits, delta_phi_log, two_t_delta_phi_prime_log,
)

__all__ = [
    "SearchResult", "numeric_inf_sup", "q_function", "degree_bounds",
    "closed_form_bounds", "Phi2Bounds", "phi2_bounds", "DegreeProfile",
    "degree_profile", "BOUNDARY_TOL",
]

BOUNDARY_TOL = 1e-12
LOG_WINDOW = math.log(1e12)

Witness = Union[float, str]


class SearchResult(NamedTuple):
    inf: float
    sup: float
    inf_at: Witness
    sup_at: Witness


def _local_minima(y: np.ndarray) -> np.ndarray:
    """Interior local minima, ignoring rounding-level wiggles on flat stretches."""
    mid, left, right = y[1:-1], y[:-2], y[2:]
    tol = 64 * np.finfo(float).eps * (1 + np.abs(mid))
    mask = (mid <= left) & (mid <= right) & ((mid < left - tol) | (mid < right - tol))
    return np.nonzero(mask)[0] + 1


def _witness(x: float) -> Witness:
    """``exp(x)``, or the limit tag when that leaves the float range."""
    if x > 709:
        return "inf"
    t = math.exp(x)
    return t if t > 0 else "0+"


def _refine(g: Callable[[float], float], x: np.ndarray, i: int, rtol: float):
    """Golden-section refinement of a bracketed local minimum of ``g``."""
    try:
        res = minimize_scalar(g, bracket=(x[i - 1], x[i], x[i + 1]),
                              method="golden", tol=rtol)
    except ValueError:
        return None
    if not (x[i - 1] <= res.x <= x[i + 1]) or not np.isfinite(res.fun):
        return None
    return float(res.x), float(res.fun)


def numeric_inf_sup(f: Callable, limits: Tuple[float, float],
                    window: Tuple[float, float] = (1e-12, 1e12),
                    n_points: int = 100_000, n_refine: int = 8,
                    rtol: float = 1e-10, log_argument: bool = False,
                    samples: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> SearchResult:
    """Infimum and supremum of a continuous function on ``(0, inf)``.

    Parameters
    ----------
    f : callable
        Vectorized function of ``t`` (or of ``x = log t`` when
        ``log_argument`` is true).
    limits : (float, float)
        Analytic limits of ``f`` at ``0+`` and at ``inf``; may be infinite.
    window : (float, float)
        Sampling range in ``t``; sampling is uniform in ``log t``.
    n_points, n_refine, rtol
        Sample count, number of local extrema refined on each side, and the
        relative tolerance of the golden-section refinement.
    samples : (ndarray, ndarray), optional
        Precomputed ``(log t, f)`` samples replacing the default grid.

    Returns
    -------
    SearchResult
        The extreme values and their witnesses: a ``t`` value, ``"0+"`` or
        ``"inf"`` for limits, or ``"all"`` when ``f`` is constant.
    """
    if log_argument:
        fx = f
    else:
        def fx(x):
            return f(np.exp(x))
    if samples is not None:
        xs, ys = samples
    else:
        xs = np.linspace(math.log(window[0]), math.log(window[1]), n_points)
        with np.errstate(over="ignore", invalid="ignore"):
            ys = np.asarray(fx(xs), dtype=float)
        if ys.shape != xs.shape:
            ys = np.array([float(fx(v)) for v in xs])

    lim0, lim_inf = float(limits[0]), float(limits[1])
    if np.ptp(ys) == 0 and lim0 == ys[0] and lim_inf == ys[0]:
        v = float(ys[0])
        return SearchResult(v, v, "all", "all")

    def scalar(v):
        with np.errstate(over="ignore", invalid="ignore"):
            return float(np.asarray(fx(np.array([v])), dtype=float)[0])

    def best(sign: float):
        """Best (value, x) for sign*f minimized, over samples and refinements."""
        sy = sign * ys
        j = int(np.nanargmin(sy))
        val, arg = float(sy[j]), float(xs[j])
        cand = _local_minima(sy)
        if cand.size:
            order = np.argsort(sy[cand], kind="stable")[:n_refine]
            for i in cand[order]:
                out = _refine(lambda v: sign * scalar(v), xs, int(i), rtol)
                if out is not None and out[1] < val:
                    arg, val = out
        return sign * val, arg

    lo_val, lo_x = best(1.0)
    hi_val, hi_x = best(-1.0)
    inf_at: Witness = _witness(lo_x)
    sup_at: Witness = _witness(hi_x)
    for lim, tag in ((lim0, "0+"), (lim_inf, "inf")):
        if lim < lo_val:
            lo_val, inf_at = lim, tag
        if lim > hi_val:
            hi_val, sup_at = lim, tag
    return SearchResult(lo_val, hi_val, inf_at, sup_at)


# --------------------------------------------------------------------------

def _q_from(delta, twotdp, n):
    return (delta + 1) ** 2 / (n - 1) - twotdp


def q_function(phi: PhiSpec, n, t: float) -> float:
    """Q_n(t) = (delta_phi(t) + 1)**2/(n-1) - 2 t delta_phi'(t)."""
    x = math.log(t)
    return _q_from(delta_phi_log(phi, x), two_t_delta_phi_prime_log(phi, x), n)


def degree_bounds(phi: PhiSpec):
    """Closed-form ``(l, d, witnesses)`` for the degree function.

    ``witnesses`` maps ``"l"`` and ``"d"`` to ``"all"``, ``"0+"`` or ``"inf"``.
    Exponents keep their numeric type, so rational input gives exact output.
    """
    if isinstance(phi, ConstantOne):
        return 0, 0, {"l": "all", "d": "all"}
    if isinstance(phi, PowerLaw):
        return phi.p - 2, phi.p - 2, {"l": "all", "d": "all"}
    if isinstance(phi, SumOfPowers):
        ps = phi.exponents
        if len(ps) == 1:
            return ps[0] - 2, ps[0] - 2, {"l": "all", "d": "all"}
        return ps[0] - 2, ps[-1] - 2, {"l": "0+", "d": "inf"}
    if isinstance(phi, Exponential):
        return 0, math.inf, {"l": "0+", "d": "inf"}
    if isinstance(phi, MeanCurvature):
        return -1, 0, {"l": "inf", "d": "0+"}
    raise TypeError(f"unknown phi family {phi!r}")


def _exact(v):
    return Fraction(v) if isinstance(v, Rational) else v


def closed_form_bounds(phi: PhiSpec, n) -> Optional[dict]:
    """Table values ``{l, d, gamma, Gamma}`` for the power-type families.

    Returns None for families without a closed-form (phi2) bound.  When ``n``
    and all exponents are rational the values are exact :class:`Fraction`.

    The two-term gamma is the unconstrained minimum of Q viewed as a
    quadratic in delta_phi; the r-term gamma uses the crude bound
    2 t delta' <= (p_r - p_1)**2 / 2.
    """
    n = _exact(n)
    if isinstance(phi, ConstantOne):
        v = 1 / (n - 1) if isinstance(n, Fraction) else 1.0 / (n - 1)
        return {"l": 0, "d": 0, "gamma": v, "Gamma": v}
    if isinstance(phi, PowerLaw):
        ps = (_exact(phi.p),)
    elif isinstance(phi, SumOfPowers):
        ps = tuple(_exact(p) for p in phi.exponents)
    else:
        return None
    p1, pr = ps[0], ps[-1]
    Gamma = (pr - 1) ** 2 / (n - 1)
    if len(ps) == 1:
        gamma = Gamma
    elif len(ps) == 2:
        p, q = ps
        gamma = (4 * (p - 1) * (q - 1) - (n - 1) * (q - p) ** 2) / (4 * n)
    else:
        gamma = (p1 - 1) ** 2 / (n - 1) - (pr - p1) ** 2 / 2
    return {"l": p1 - 2, "d": pr - 2, "gamma": gamma, "Gamma": Gamma}


def _search_window(phi: PhiSpec) -> Tuple[float, float]:
    """Log-space half width so that power sums are saturated at both ends."""
    if isinstance(phi, SumOfPowers) and len(phi.terms) > 1:
        ps = [float(p) for p in phi.exponents]
        gap = min(b - a for a, b in zip(ps, ps[1:]))
        lw = [math.log(float(w)) for w in phi.weights]
        spread = max(lw) - min(lw)
        half = max(LOG_WINDOW, 2 * (LOG_WINDOW + spread) / gap)
        return -half, half
    return -LOG_WINDOW, LOG_WINDOW


@lru_cache(maxsize=16)
def _samples(phi: PhiSpec, n_points: int):
    lo, hi = _search_window(phi)
    xs = np.linspace(lo, hi, n_points)
    with np.errstate(over="ignore", invalid="ignore"):
        return xs, delta_phi_log(phi, xs), two_t_delta_phi_prime_log(phi, xs)


class Phi2Bounds(NamedTuple):
    gamma: float
    Gamma: float
    witnesses: dict
    gamma_closed: object = None
    Gamma_closed: object = None
    gamma_numeric: float = math.nan
    Gamma_numeric: float = math.nan


def _q_limits(phi: PhiSpec, n):
    out = []
    for lim in delta_phi_limits(phi):
        out.append(math.inf if math.isinf(lim) else (lim + 1) ** 2 / (n - 1))
    return tuple(out)


def phi2_bounds(phi: PhiSpec, n, n_points: int = 100_000) -> Phi2Bounds:
    """(phi2) bounds: the numeric infimum of Q_n plus the closed form when known.

    ``gamma`` is always the numeric infimum.  ``Gamma`` is the closed form when
    one exists (it equals the limit at infinity) and the numeric supremum
    otherwise.
    """
    if n <= 1:
        raise ValueError(f"dimension must exceed 1, got {n}")
    xs, dl, tw = _samples(phi, n_points)

    def qx(x):
        return _q_from(delta_phi_log(phi, x), two_t_delta_phi_prime_log(phi, x), n)

    res = numeric_inf_sup(qx, _q_limits(phi, n), log_argument=True,
                          samples=(xs, _q_from(dl, tw, n)))
    closed = closed_form_bounds(phi, n)
    g_c = closed["gamma"] if closed else None
    G_c = closed["Gamma"] if closed else None
    Gamma = float(G_c) if closed else res.sup
    wit = {"gamma": res.inf_at, "Gamma": "inf" if closed and res.sup_at != "all" else res.sup_at}
    return Phi2Bounds(res.inf, Gamma, wit, g_c, G_c, res.inf, res.sup)


@dataclass(frozen=True)
class DegreeProfile:
    """Bounds for conditions (phi1) and (phi2) at dimension ``n``."""
    l: float
    d: float
    gamma: float
    Gamma: float
    n: float
    witnesses: dict = field(compare=False)
    phi1_ok: bool
    phi2_ok: bool
    method: str
    gamma_closed: object = None
    Gamma_closed: object = None
    boundary: bool = False

    def failed_condition(self) -> Optional[str]:
        if not self.phi1_ok:
            return "phi1"
        if not self.phi2_ok:
            return "phi2"
        return None


@lru_cache(maxsize=4096)
def degree_profile(phi: PhiSpec, n) -> DegreeProfile:
    """Full (phi1)/(phi2) profile.  ``n`` may be real (for the n' > 2 variant)."""
    l, d, wit_ld = degree_bounds(phi)
    l, d = float(l), float(d)
    b = phi2_bounds(phi, n)
    phi1_ok = l > -1 and math.isfinite(d)
    phi2_ok = b.gamma > 0 and math.isfinite(b.Gamma)
    method = "closed_form" if b.gamma_closed is not None else "numeric"
    witnesses = dict(wit_ld)
    witnesses.update(b.witnesses)
    return DegreeProfile(
        l=l, d=d, gamma=b.gamma, Gamma=b.Gamma, n=n, witnesses=witnesses,
        phi1_ok=phi1_ok, phi2_ok=phi2_ok, method=method,
        gamma_closed=b.gamma_closed, Gamma_closed=b.Gamma_closed,
        boundary=abs(b.gamma) < BOUNDARY_TOL,
    )
