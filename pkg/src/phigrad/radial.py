"""Radial solutions on rotationally symmetric model spaces.

For ``u = u(r)`` the equation becomes ``(s**(n-1) G(u'))' + s**(n-1) psi(u**2) u = 0``
with ``G(w) = phi(w**2) w`` and warp ``s(r)``.  We integrate the first-order
system in the flux ``F = s**(n-1) G(u')``::

    u' = G^{-1}(F / s**(n-1)),      F' = -s**(n-1) psi(u**2) u.

The origin is a regular singular point.  Integration starts at ``eps = h/10``
from the leading-order series and uses geometrically graded substeps for
``r < 0.1`` (the solution varies on the scale ``r`` there); output nodes are
uniform with spacing ``h``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson, quad

from .coupling import Phi1Violation, PreconditionError
from .degree import degree_bounds
from .families import (
    DoublePower, GeneralSum, LogPower, PhiSpec, Power, PsiSpec, Zero,
    eval_psi, inverse_flux_fn,
)

__all__ = [
    "ModelSpace", "Diagnostics", "RadialSolution", "SweepRow", "SolverError",
    "solve_radial", "verify_estimate", "sweep_radii",
]

GRADED_RADIUS = 0.1
RESIDUAL_TOL = 1e-6


class SolverError(RuntimeError):
    """The integration was rejected by the post-hoc flux audit."""


@dataclass(frozen=True)
class ModelSpace:
    """Euclidean space (``k = 0``) or hyperbolic space of curvature ``-k``."""
    n: int
    k: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension must be at least 2, got {self.n}")
        if self.k < 0:
            raise ValueError(f"k must be nonnegative, got {self.k}")

    @property
    def K(self) -> float:
        """Ricci lower bound magnitude, ``(n-1) k``."""
        return (self.n - 1) * self.k

    def warp(self, r: float) -> float:
        if self.k == 0:
            return r
        rk = math.sqrt(self.k)
        return math.sinh(rk * r) / rk


@dataclass(frozen=True)
class Diagnostics:
    positive_ok: bool
    sup_ratio: float
    c_hat: float
    harnack_log: float
    residual_max: float


@dataclass(frozen=True)
class RadialSolution:
    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    flux: np.ndarray
    H_hat: np.ndarray
    diagnostics: Diagnostics
    R: float
    h: float
    space: ModelSpace


@dataclass(frozen=True)
class SweepRow:
    R: float
    c_hat: float
    harnack_log: float
    positive_ok: bool
    residual_max: float


def _reaction(psi: PsiSpec) -> Callable[[float], float]:
    """u -> psi(u**2) u for u > 0, specialized per family for speed."""
    if isinstance(psi, Zero):
        return lambda u: 0.0
    if isinstance(psi, Power):
        a, q = float(psi.a), float(psi.q)
        return lambda u: a * u ** q
    if isinstance(psi, DoublePower):
        m, k = float(psi.m), float(psi.k)
        return lambda u: u ** m - u ** k
    if isinstance(psi, LogPower):
        a, q, m = float(psi.a), float(psi.q), float(psi.m)

        def f(u):
            lg = math.log(u)
            return a * u ** q * math.copysign(abs(lg) ** m, lg) if lg else 0.0
        return f
    if isinstance(psi, GeneralSum):
        return lambda u: eval_psi(psi, u * u) * u
    raise TypeError(f"unknown psi family {psi!r}")


def _diagnostics(r, u, du, R, K, positive_ok, residual):
    mask = r <= R * (1 + 1e-12)
    reached = len(r) and r[-1] >= R * (1 - 1e-12)
    scale = 1 + math.sqrt(K) * R
    if not reached:
        return Diagnostics(positive_ok, math.nan, math.nan, math.nan, residual)
    uu, dd = u[mask], du[mask]
    sup_ratio = float(np.max(np.abs(dd) / uu))
    harnack = float(math.log(uu.max() / uu.min()))
    return Diagnostics(positive_ok, sup_ratio, sup_ratio * R / scale, harnack / scale, residual)


def solve_radial(phi: PhiSpec, psi: PsiSpec, space: ModelSpace, u0: float,
                 R: float, h: float) -> RadialSolution:
    """Integrate the radial problem on ``[0, 2R]`` from ``u(0) = u0``, ``u'(0) = 0``.

    Parameters
    ----------
    phi, psi : family specs
        ``phi`` must satisfy (phi1) so that the flux map is invertible.
    space : ModelSpace
    u0 : float
        Central value, positive.
    R : float
        Ball radius; the solution is computed on the double ball.
    h : float
        Nominal step, at most ``R/100``; the effective step divides ``2R``.

    Returns
    -------
    RadialSolution
        Diagnostics are measured on ``[0, R]``.  If ``u`` stops being
        positive the arrays end early and ``positive_ok`` is False.

    Raises
    ------
    Phi1Violation
        When ``phi`` fails (phi1).
    SolverError
        When the flux identity residual exceeds ``1e-6 max|F|``.
    """
    l, d, _ = degree_bounds(phi)
    if not (l > -1 and math.isfinite(d)):
        raise Phi1Violation(f"(phi1) fails: l = {l}, d = {d}")
    if not u0 > 0:
        raise ValueError(f"u0 must be positive, got {u0}")
    if not (0 < h <= R / 100):
        raise ValueError(f"need 0 < h <= R/100, got h = {h}, R = {R}")

    n = space.n
    warp = space.warp
    ginv = inverse_flux_fn(phi)
    react = _reaction(psi)
    N = int(math.ceil(2 * R / h - 1e-9))
    he = 2 * R / N

    def rhs(r, u, F):
        sw = warp(r) ** (n - 1)
        return ginv(F / sw), -sw * react(u)

    # leading-order start at eps
    eps = he / 10
    src = react(u0)
    F = -src * quad(lambda r: warp(r) ** (n - 1), 0, eps, epsabs=0, epsrel=1e-13)[0]
    u = u0 + quad(lambda r: ginv(-src * r / n), 0, eps, epsabs=0, epsrel=1e-13)[0]
    r = eps

    us, Fs = [u0], [0.0]
    positive_ok = True
    dxi = he / GRADED_RADIUS
    for j in range(1, N + 1):
        r1 = j * he
        try:
            while r < r1:
                sub = min(r * math.expm1(dxi), he) if r < GRADED_RADIUS else he
                if r + sub > r1 - 1e-13 * r1:
                    sub = r1 - r
                k1u, k1f = rhs(r, u, F)
                k2u, k2f = rhs(r + sub / 2, u + sub / 2 * k1u, F + sub / 2 * k1f)
                k3u, k3f = rhs(r + sub / 2, u + sub / 2 * k2u, F + sub / 2 * k2f)
                k4u, k4f = rhs(r + sub, u + sub * k3u, F + sub * k3f)
                u += sub / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
                F += sub / 6 * (k1f + 2 * k2f + 2 * k3f + k4f)
                r += sub
        except (OverflowError, ValueError, ZeroDivisionError):
            positive_ok = False
            break
        r = r1
        if not (math.isfinite(u) and math.isfinite(F)) or u <= 0:
            positive_ok = False
            break
        us.append(u)
        Fs.append(F)

    grid = he * np.arange(len(us))
    u_arr = np.array(us)
    F_arr = np.array(Fs)
    sw = np.array([warp(x) ** (n - 1) for x in grid])
    g = np.zeros_like(F_arr)
    g[1:] = F_arr[1:] / sw[1:]
    du = np.array([ginv(v) for v in g])

    integrand = sw * np.array([react(v) for v in u_arr])
    if len(grid) >= 3:
        cum = cumulative_simpson(integrand, dx=he, initial=0.0)
    else:
        cum = np.zeros_like(integrand)
    residual = float(np.max(np.abs(F_arr + cum))) if len(grid) else 0.0
    fmax = float(np.max(np.abs(F_arr))) if len(grid) else 0.0
    if fmax > 0 and residual > RESIDUAL_TOL * fmax:
        raise SolverError(f"flux residual {residual:.3g} exceeds {RESIDUAL_TOL:g} * max|F|; reduce h")
    rel_residual = residual / fmax if fmax > 0 else 0.0

    for arr in (grid, u_arr, du, g):
        arr.setflags(write=False)
    hh = (du / u_arr) ** 2
    hh.setflags(write=False)
    diag = _diagnostics(grid, u_arr, du, R, space.K, positive_ok, rel_residual)
    return RadialSolution(grid, u_arr, du, g, hh, diag, R, he, space)


def verify_estimate(sol: RadialSolution, space: Optional[ModelSpace] = None,
                    R: Optional[float] = None) -> Diagnostics:
    """Gradient-ratio and Harnack surrogates on ``B(R)``.

    Refuses solutions that are not positive on the whole double ball.
    """
    space = space or sol.space
    R = sol.R if R is None else R
    if not sol.diagnostics.positive_ok or sol.grid[-1] < 2 * R * (1 - 1e-12):
        raise PreconditionError("solution is not positive on B(2R); the estimate claims nothing")
    return _diagnostics(sol.grid, sol.u, sol.du, R, space.K, True, sol.diagnostics.residual_max)


def _sweep_one(args) -> SweepRow:
    phi, psi, space, u0, R, h = args
    sol = solve_radial(phi, psi, space, u0, R, h)
    dg = sol.diagnostics
    return SweepRow(R, dg.c_hat, dg.harnack_log, dg.positive_ok, dg.residual_max)


def sweep_radii(phi: PhiSpec, psi: PsiSpec, space: ModelSpace, u0: float,
                radii: Sequence[float], h: float, workers: int = 0) -> List[SweepRow]:
    """One solve per radius; rows that lose positivity are kept and flagged.

    ``workers > 1`` runs the solves in a process pool; row order always
    follows ``radii``.
    """
    radii = list(radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing")
    jobs = [(phi, psi, space, u0, R, h) for R in radii]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]
