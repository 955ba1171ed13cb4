"""Verdicts: does the gradient estimate apply, and what follows from it.

:func:`classify` runs the general path (degree profile, then coupling).  The
remaining functions evaluate the closed-form inequalities known for power
and weighted-power operators; they are used as cross-checks of the general
path and for fast region scans.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Tuple

from .coupling import (
    CouplingProfile, IterationConstants, PreconditionError, coupling_profile,
    iteration_constants,
)
from .degree import BOUNDARY_TOL, DegreeProfile, degree_profile
from .families import LogPower, PhiSpec, PsiSpec, _odd_rational, psi_zeros

__all__ = [
    "HypothesisError", "LiouvilleConclusion", "Verdict", "classify",
    "critical_dimensions", "corollary_pq", "corollary_pq_margin",
    "corollary_weighted", "theorem_power_reaction", "theorem_double_power",
    "umusc1", "theorem_log_reaction", "log_reaction_conclusion",
]

HARNACK_FORM = "u(x)/u(y) <= exp(C (1 + sqrt(K) R)) for x, y in B(o, R)"
HARNACK_FLAT = "sup u <= C inf u on B(o, R) when K = 0"


class HypothesisError(ValueError):
    """A dimension or parameter hypothesis of a closed-form criterion is violated."""


@dataclass(frozen=True)
class LiouvilleConclusion:
    """Outcome for bounded positive solutions on a manifold with Ric >= 0.

    ``kind`` is ``"constant"`` (``u`` is one of ``values``), ``"none"`` (no
    such solution) or ``"any_constant"`` (psi = 0, every positive constant).
    """
    kind: str
    values: Tuple[float, ...] = ()

    def describe(self) -> str:
        if self.kind == "constant":
            return "u is constant, u = " + " or ".join(f"{v:.12g}" for v in self.values)
        if self.kind == "none":
            return "no positive bounded solution"
        return "every bounded positive solution is constant"


@dataclass(frozen=True)
class Verdict:
    status: str  # "not_applicable" | "estimate_holds" | "liouville"
    failed_condition: Optional[str] = None  # "phi1" | "phi2" | "psi2"
    detail: str = ""
    degree: Optional[DegreeProfile] = None
    coupling: Optional[CouplingProfile] = None
    constants: Optional[IterationConstants] = None
    liouville: Optional[LiouvilleConclusion] = None
    margin: float = math.nan
    boundary: bool = False
    harnack: Optional[str] = None

    @property
    def applicable(self) -> bool:
        return self.status != "not_applicable"

    def summary(self) -> str:
        """One machine-readable line."""
        parts = [f"status={self.status}"]
        if self.failed_condition:
            parts.append(f"failed={self.failed_condition}")
        parts.append(f"margin={self.margin:.12g}")
        parts.append(f"boundary={int(self.boundary)}")
        if self.liouville:
            parts.append(f"liouville={self.liouville.kind}")
            if self.liouville.values:
                parts.append("u=" + ",".join(f"{v:.12g}" for v in self.liouville.values))
        return " ".join(parts)


def liouville_conclusion(psi: PsiSpec) -> LiouvilleConclusion:
    roots = psi_zeros(psi)
    if roots is None:
        return LiouvilleConclusion("any_constant")
    if not roots:
        return LiouvilleConclusion("none")
    return LiouvilleConclusion("constant", tuple(math.sqrt(r) for r in roots))


def _boundary(margin: float) -> bool:
    return math.isfinite(margin) and abs(margin) < BOUNDARY_TOL


def classify(phi: PhiSpec, psi: PsiSpec, n, assume_nonneg_ricci_bounded: bool = False) -> Verdict:
    """Check (phi1), (phi2) and (psi2) in order and report the outcome.

    With ``assume_nonneg_ricci_bounded`` the Liouville conclusion for bounded
    positive solutions on a manifold with nonnegative Ricci curvature is
    attached to an applicable verdict.
    """
    if n < 2:
        raise ValueError(f"dimension must be at least 2, got {n}")
    prof = degree_profile(phi, n)
    if not prof.phi1_ok:
        margin = prof.l + 1 if prof.l <= -1 else -math.inf
        why = f"l_phi = {prof.l:g} is not > -1" if prof.l <= -1 else "d_phi = inf"
        return Verdict("not_applicable", "phi1", f"(phi1) fails: {why}", prof,
                       margin=margin, boundary=_boundary(margin))
    if not prof.phi2_ok:
        margin = prof.gamma if math.isfinite(prof.Gamma) else -math.inf
        why = (f"gamma_phi = {prof.gamma:.12g} is not > 0" if math.isfinite(prof.Gamma)
               else "Gamma_phi = inf")
        return Verdict("not_applicable", "phi2", f"(phi2) fails: {why}", prof,
                       margin=margin, boundary=_boundary(margin))
    cp = coupling_profile(phi, psi, n, prof)
    if not cp.psi2_ok:
        return Verdict("not_applicable", "psi2",
                       f"(psi2) fails: Theta = {cp.theta_big:.12g} >= {cp.threshold:.12g}",
                       prof, cp, margin=cp.margin, boundary=_boundary(cp.margin))
    margin = min(prof.gamma, cp.margin)
    constants = iteration_constants(prof)
    if assume_nonneg_ricci_bounded:
        return Verdict("liouville", None, "estimate holds", prof, cp, constants,
                       liouville_conclusion(psi), margin, _boundary(margin), HARNACK_FLAT)
    return Verdict("estimate_holds", None, "estimate holds", prof, cp, constants,
                   None, margin, _boundary(margin), HARNACK_FORM)


# --------------------------------------------------------------------------
# closed-form criteria
# --------------------------------------------------------------------------

def _exact(v):
    return Fraction(v) if isinstance(v, Rational) else v


def _sqrt(v):
    """Square root, exact for perfect-square fractions."""
    if isinstance(v, Fraction) and v >= 0:
        rn, rd = math.isqrt(v.numerator), math.isqrt(v.denominator)
        if rn * rn == v.numerator and rd * rd == v.denominator:
            return Fraction(rn, rd)
    return math.sqrt(v)


def critical_dimensions(p_min, p_max):
    """``(N1, N2)`` with ``N1 = 2((p_min-1)/(p_max-p_min))**2 + 1`` and ``N2 = sqrt(2 N1 + 3) - 2``.

    Both are infinite when ``p_min == p_max``.
    """
    if not p_min > 1:
        raise ValueError(f"p_min must exceed 1, got {p_min}")
    if p_max < p_min:
        raise ValueError("p_max must be >= p_min")
    if p_max == p_min:
        return math.inf, math.inf
    a, b = _exact(p_min), _exact(p_max)
    n1 = 2 * ((a - 1) / (b - a)) ** 2 + 1
    return n1, _sqrt(2 * n1 + 3) - 2


def corollary_pq_margin(p, q, n):
    """``4(p-1)(q-1) - (n-1)(p-q)**2``; positive exactly when the (p,q) criterion holds."""
    p, q, n = _exact(p), _exact(q), _exact(n)
    return 4 * (p - 1) * (q - 1) - (n - 1) * (p - q) ** 2


def corollary_pq(p, q, n) -> bool:
    """``(n-1) < 4(p-1)(q-1)/(p-q)**2``, always true when ``p == q``."""
    if not (p > 1 and q > 1):
        raise ValueError("exponents must exceed 1")
    if p == q:
        return True
    return corollary_pq_margin(p, q, n) > 0


def corollary_weighted(p_list, n) -> bool:
    """``(n-1) < 2(p_1-1)**2/(p_r-p_1)**2`` for increasing exponents, i.e. ``n < N1``."""
    ps = [_exact(p) for p in p_list]
    if any(not p > 1 for p in ps):
        raise ValueError("exponents must exceed 1")
    p1, pr = min(ps), max(ps)
    if p1 == pr:
        return True
    return (_exact(n) - 1) * (pr - p1) ** 2 < 2 * (p1 - 1) ** 2


def _require_below(n, bound, name):
    if not n < bound:
        raise HypothesisError(f"requires n < {name} = {float(bound):.12g}, got n = {n}")


def _shifts(p1, pr, n):
    """The square-root offsets appearing in the upper and lower criteria."""
    n, p1, pr = _exact(n), _exact(p1), _exact(pr)
    upper = 2 * _sqrt(1 / (n - 1) ** 2 - (pr - p1) ** 2 / (2 * (n - 1) * (p1 - 1) ** 2))
    lower = 2 * _sqrt((p1 - 1) ** 2 / ((n - 1) ** 2 * (pr - 1) ** 2)
                      - (pr - p1) ** 2 / (2 * (n - 1) * (pr - 1) ** 2))
    return (n + 1) / (n - 1), upper, lower


def theorem_power_reaction(p_min, p_max, a, q, n) -> bool:
    """Closed-form criterion for ``a u**q`` with a weighted power operator (needs n < N1)."""
    n1, _ = critical_dimensions(p_min, p_max)
    _require_below(n, n1, "N1")
    if a == 0:
        raise ValueError("a must be nonzero")
    c, up, lo = _shifts(p_min, p_max, n)
    q = _exact(q)
    if a > 0:
        return q / (_exact(p_min) - 1) < c + up
    return q / (_exact(p_max) - 1) > c - lo


def umusc1(p_min, p_max, n) -> bool:
    """``(n+1)**2/2 + (n-1) < 2(p_1-1)**2/(p_r-p_1)**2``; equivalent to ``n < N2``."""
    if p_min == p_max:
        return True
    a, b, n = _exact(p_min), _exact(p_max), _exact(n)
    return (n + 1) ** 2 / 2 + (n - 1) < 2 * (a - 1) ** 2 / (b - a) ** 2


def theorem_double_power(p_min, p_max, m, k, n) -> bool:
    """Closed-form criterion for ``u**m - u**k`` (``m < k``, needs n < N1).

    The strong form ``k >= c (p_r-1)`` and ``m <= c (p_1-1)`` is tried first;
    below the second critical dimension the weakened pair is used instead.
    """
    if not m < k:
        raise PreconditionError(f"needs m < k, got m = {m}, k = {k}")
    n1, n2 = critical_dimensions(p_min, p_max)
    _require_below(n, n1, "N1")
    c, up, lo = _shifts(p_min, p_max, n)
    m, k = _exact(m), _exact(k)
    a, b = _exact(p_min), _exact(p_max)
    if k >= c * (b - 1) and m <= c * (a - 1):
        return True
    if n < n2:
        return k / (b - 1) > c - lo and m / (a - 1) < c + up
    return False


def theorem_log_reaction(p_min, p_max, a, q, m, n) -> bool:
    """Closed-form criterion for ``a u**q (log u)**m`` (needs n < N2, ``a m < 0``)."""
    m = _odd_rational(m)
    if not a * m < 0:
        raise PreconditionError(f"needs a*m < 0, got a = {a}, m = {m}")
    _, n2 = critical_dimensions(p_min, p_max)
    _require_below(n, n2, "N2")
    c, up, lo = _shifts(p_min, p_max, n)
    q = _exact(q)
    return q / (_exact(p_max) - 1) > c - lo and q / (_exact(p_min) - 1) < c + up


def log_reaction_conclusion(m) -> LiouvilleConclusion:
    """``u = 1`` when ``m > 0``; no positive bounded solution when ``m < 0``."""
    return LiouvilleConclusion("constant", (1.0,)) if _odd_rational(m) > 0 else LiouvilleConclusion("none")
