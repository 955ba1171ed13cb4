"""Coupling between the diffusion degree and the reaction degree.

With ``c = (n+1)/(n-1)`` the bracket is

    B(s, t) = 2 (delta_phi(s) + 1)/(n - 1) + delta_phi(s) - delta_psi(t)
            = c (delta_phi(s) + 1) - (delta_psi(t) + 1).

``I_psi`` collects the ``t`` for which ``psi(t) B(s, t) >= 0`` for every ``s``.
Since ``B`` is affine and increasing in ``delta_phi(s)``, which sweeps
``[l, d]``, membership reduces to ``delta_psi(t) <= c (l+1) - 1`` where
``psi > 0`` and ``delta_psi(t) >= c (d+1) - 1`` where ``psi < 0``.  Zeros of
``psi`` always belong to ``I_psi``.

``Theta`` is the supremum of ``B**2`` off ``I_psi``.  On each monotone branch
of ``delta_psi`` the supremum is attained at a corner: ``delta_phi`` in
``{l, d}`` and ``delta_psi`` at an end of the complementary piece (one-sided
limits at branch ends).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .degree import BOUNDARY_TOL, DegreeProfile, degree_profile
from .families import (
    GeneralSum, PhiSpec, PoleError, PsiSpec, Zero, Branch, branch_delta,
    delta_phi_limits, delta_phi_log, delta_psi_log, eval_delta_psi,
    psi_sign_log, psi_structure, psi_zeros, SAMPLE_LOG_T,
)
from .intervals import EMPTY, FULL, Interval, IntervalSet

__all__ = [
    "Phi1Violation", "PreconditionError", "bracket_value", "thresholds",
    "compute_i_psi", "compute_theta_big", "check_psi2", "theta_alpha",
    "IterationConstants", "iteration_constants", "CouplingProfile",
    "coupling_profile",
]


class Phi1Violation(ValueError):
    """The diffusion coefficient fails (phi1), so the coupling is undefined."""


class PreconditionError(ValueError):
    """A documented precondition of the operation does not hold."""


def _c(n) -> float:
    return (n + 1) / (n - 1)


def bracket_value(phi: PhiSpec, psi: PsiSpec, n, s: float, t: float) -> float:
    """The bracket B(s, t); ``s = 0`` uses the limit of delta_phi at ``0+``.

    Raises PoleError when ``t`` is a zero of psi.
    """
    dphi = delta_phi_limits(phi)[0] if s == 0 else float(delta_phi_log(phi, math.log(s)))
    if isinstance(psi, Zero):
        raise PoleError("delta_psi is undefined for psi = 0")
    dpsi = eval_delta_psi(psi, t, require_finite=True)
    return _c(n) * (dphi + 1) - (dpsi + 1)


def thresholds(l: float, d: float, n) -> Tuple[float, float]:
    """``(lambda_lo, lambda_hi)``: the delta_psi cutoffs where psi > 0 and psi < 0."""
    c = _c(n)
    return c * (l + 1) - 1, c * (d + 1) - 1


def _require_phi1(l: float, d: float):
    if not (l > -1 and math.isfinite(d)):
        raise Phi1Violation(f"(phi1) fails: l = {l}, d = {d}")


def _subset_where(br: Branch, op: str, lam: float) -> List[Interval]:
    """Part of an open branch where ``delta_psi op lam`` (op is '<=' or '>=')."""
    a, b = br.lim_lo, br.lim_hi
    if op == ">=":
        # reflect so that the same '<=' logic applies
        a, b, lam = -a, -b, -lam
    if a == b:
        return [Interval(br.lo, br.hi)] if a <= lam else []
    if a > b:  # decreasing
        if lam >= a:
            return [Interval(br.lo, br.hi)]
        if lam <= b:
            return []
        t_star = br.inverse(lam if op == "<=" else -lam)
        return [Interval(t_star, br.hi, True, False)]
    if lam >= b:  # increasing
        return [Interval(br.lo, br.hi)]
    if lam <= a:
        return []
    t_star = br.inverse(lam if op == "<=" else -lam)
    return [Interval(br.lo, t_star, False, True)]


# -- sampled path for GeneralSum -------------------------------------------

_SAMPLE_X = SAMPLE_LOG_T


def _members(psi: PsiSpec, x: np.ndarray, lam_lo: float, lam_hi: float) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        sg = psi_sign_log(psi, x)
        dp = delta_psi_log(psi, x)
    return (sg == 0) | ((sg > 0) & (dp <= lam_lo)) | ((sg < 0) & (dp >= lam_hi))


def _bisect_flip(psi, xa, xb, lam_lo, lam_hi, iters=60) -> float:
    ma = _members(psi, np.array([xa]), lam_lo, lam_hi)[0]
    for _ in range(iters):
        xm = 0.5 * (xa + xb)
        if _members(psi, np.array([xm]), lam_lo, lam_hi)[0] == ma:
            xa = xm
        else:
            xb = xm
    return 0.5 * (xa + xb)


def _sampled_i_psi(psi: PsiSpec, lam_lo: float, lam_hi: float) -> IntervalSet:
    x = _SAMPLE_X
    mem = _members(psi, x, lam_lo, lam_hi)
    parts = []
    start = 0.0 if mem[0] else None
    for i in range(1, len(x)):
        if mem[i] != mem[i - 1]:
            edge = math.exp(_bisect_flip(psi, x[i - 1], x[i], lam_lo, lam_hi))
            if mem[i]:
                start = edge
            else:
                parts.append(Interval(start, edge, start > 0, True))
                start = None
    if start is not None:
        parts.append(Interval(start, math.inf, start > 0, False))
    parts += [Interval.point(z) for z in psi_zeros(psi)]
    return IntervalSet(parts)


def _sampled_theta(psi: PsiSpec, comp: IntervalSet, l: float, d: float, n) -> float:
    # a complement piece ending at a zero of psi sees delta_psi blow up
    for z in psi_zeros(psi):
        for p in comp:
            if not p.is_point and (math.isclose(p.lo, z, rel_tol=1e-9)
                                   or math.isclose(p.hi, z, rel_tol=1e-9)):
                return math.inf
    x = _SAMPLE_X
    t = np.exp(x)
    inside = np.array([comp.contains(v) for v in t]) if len(comp) else np.zeros(len(x), bool)
    ends = [v for p in comp for v in (p.lo, p.hi) if 0 < v < math.inf]
    pts = np.concatenate([x[inside], np.log(ends)]) if ends else x[inside]
    if pts.size == 0:
        return -math.inf
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        dp = delta_psi_log(psi, pts)
    dp = dp[np.isfinite(dp)]
    if dp.size == 0:
        return -math.inf
    c = _c(n)
    vals = [(c * (dphi + 1) - (dp + 1)) ** 2 for dphi in (l, d)]
    return float(max(v.max() for v in vals))


# --------------------------------------------------------------------------

def _bounds(phi: PhiSpec, n, profile: Optional[DegreeProfile]):
    prof = profile if profile is not None else degree_profile(phi, n)
    return prof.l, prof.d, prof


def compute_i_psi(phi: PhiSpec, psi: PsiSpec, n,
                  profile: Optional[DegreeProfile] = None) -> IntervalSet:
    """The admissibility set I_psi as a finite union of intervals in (0, inf)."""
    l, d, _ = _bounds(phi, n, profile)
    _require_phi1(l, d)
    if isinstance(psi, Zero):
        return FULL
    lam_lo, lam_hi = thresholds(l, d, n)
    struct = psi_structure(psi)
    if struct is None:
        return _sampled_i_psi(psi, lam_lo, lam_hi)
    parts = [Interval.point(z) for z in struct.zeros + struct.poles]
    for br in struct.branches:
        if br.sign > 0:
            parts += _subset_where(br, "<=", lam_lo)
        else:
            parts += _subset_where(br, ">=", lam_hi)
    return IntervalSet(parts)


def compute_theta_big(phi: PhiSpec, psi: PsiSpec, n, i_psi: IntervalSet,
                      profile: Optional[DegreeProfile] = None) -> float:
    """Supremum of the squared bracket over s >= 0 and t outside ``i_psi``.

    Isolated points of the complement are ignored, and delta_psi on each
    complementary piece ranges over the closure of its values, so a piece
    touching a zero of psi gives ``+inf``.  An empty complement gives ``-inf``.
    """
    l, d, _ = _bounds(phi, n, profile)
    _require_phi1(l, d)
    comp = i_psi.complement()
    if comp.empty:
        return -math.inf
    if isinstance(psi, Zero):
        raise PoleError("psi = 0 has no degree function off I_psi")
    struct = psi_structure(psi)
    if struct is None:
        return _sampled_theta(psi, comp, l, d, n)
    c = _c(n)
    best = -math.inf
    for piece in comp:
        if piece.is_point:
            continue
        for br in struct.branches:
            lo, hi = max(piece.lo, br.lo), min(piece.hi, br.hi)
            if not lo < hi:
                continue
            ends = (br.lim_lo if lo == br.lo else branch_delta(psi, br, lo),
                    br.lim_hi if hi == br.hi else branch_delta(psi, br, hi))
            for dpsi in ends:
                if math.isinf(dpsi):
                    return math.inf
                for dphi in (l, d):
                    best = max(best, (c * (dphi + 1) - (dpsi + 1)) ** 2)
    return best


def check_psi2(theta_big: float, gamma: float, n) -> Tuple[bool, float]:
    """``(ok, margin)`` for (psi2): ``Theta < 4 gamma/(n-1)``; margin is the gap."""
    threshold = 4 * gamma / (n - 1)
    margin = threshold - theta_big
    return bool(theta_big < threshold), margin


def theta_alpha(gamma: float, theta_big: float, d: float, n) -> Tuple[float, float]:
    """The constants ``theta = gamma - Theta (n-1)/4`` and ``alpha = Theta (d+1)/(4 theta)``."""
    if theta_big == -math.inf:
        return gamma, 0.0
    theta = gamma - theta_big * (n - 1) / 4
    alpha = theta_big * (d + 1) / (4 * theta) if theta != 0 else math.inf
    return theta, alpha


@dataclass(frozen=True)
class IterationConstants:
    a0: float
    a1: float
    a2: float
    a3: float
    b_threshold: float


def iteration_constants(profile: DegreeProfile) -> IterationConstants:
    """The constants a0..a3 and the lower threshold for the iteration exponent b.

    Parameters
    ----------
    profile : DegreeProfile
        Must satisfy both (phi1) and (phi2).

    Returns
    -------
    IterationConstants
        ``b_threshold`` is the strict lower bound
        ``max(2 (a0 + a3)**2 / (a1 gamma), d, 1)``.
    """
    if not (profile.phi1_ok and profile.phi2_ok):
        raise PreconditionError("iteration constants need (phi1) and (phi2)")
    l, d, gamma, Gamma = profile.l, profile.d, profile.gamma, profile.Gamma
    big = max(1.0, abs(l), abs(d))
    a0 = Gamma + (d + 1) ** 2 + 2 * (d + 1)
    a1 = min(1 + l, 1.0)
    a2 = 4 * big
    a3 = max(abs(l), abs(d)) * big
    b = max(2 * (a0 + a3) ** 2 / (a1 * gamma), d, 1.0)
    return IterationConstants(a0, a1, a2, a3, b)


@dataclass(frozen=True)
class CouplingProfile:
    i_psi: IntervalSet
    theta_big: float
    threshold: float
    psi2_ok: bool
    theta_small: float
    alpha: float
    method: str
    margin: float
    boundary: bool


def coupling_profile(phi: PhiSpec, psi: PsiSpec, n,
                     profile: Optional[DegreeProfile] = None) -> CouplingProfile:
    """I_psi, Theta, the (psi2) check and theta/alpha in one record."""
    l, d, prof = _bounds(phi, n, profile)
    i_psi = compute_i_psi(phi, psi, n, prof)
    big = compute_theta_big(phi, psi, n, i_psi, prof)
    ok, margin = check_psi2(big, prof.gamma, n)
    small, alpha = theta_alpha(prof.gamma, big, d, n)
    sampled = isinstance(psi, GeneralSum)
    return CouplingProfile(
        i_psi=i_psi, theta_big=big, threshold=4 * prof.gamma / (n - 1),
        psi2_ok=ok, theta_small=small, alpha=alpha,
        method="sampled" if sampled else "closed_form", margin=margin,
        boundary=bool(math.isfinite(margin) and abs(margin) < BOUNDARY_TOL),
    )
