"""Annulus criticality analysis: polygon configurations, sigma1(lambda, r),
lambda0/r0, Theorem-1 style condition reports, mu0, reduced radial profile,
empirical a_k thresholds, and the two-bubble certificate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bubbles import EnergyConstants
from .domain import annulus, lambda1
from .errors import (DegenerateDenominator, DomainError, GridTooCoarse,
                     NoPositiveStart, WrongRegime)
from .greens import green, robin
from .interaction import build_matrix, circulant_eigenvalues, eigen, psi

GRID_N = 129
# Relative inset of the radius grid from the annulus boundaries: g_lambda
# diverges to +infinity there, so the sigma1 minimum is always interior,
# while the mode series cost blows up as the boundary distance shrinks.
EDGE_MARGIN = 0.02
_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PolygonConfig:
    k: int
    r: float
    a: float

    def __post_init__(self):
        if self.k < 2:
            raise DomainError("polygon needs k >= 2")
        if not self.a < self.r < 1.0:
            raise DomainError(
                f"need a < r < 1, got a={self.a}, r={self.r}")


@dataclass(frozen=True)
class CriticalityReport:
    lambda0: float
    r0: float
    sigma1_at_crit: float
    d_sigma1_d_lambda: float
    radial_slope: float
    radial_curvature: float
    mu0_curve: tuple  # of (eps, mu0)
    lambda_star: float
    checks: dict
    diagnostics: dict

    def as_dict(self):
        return {
            "lambda0": self.lambda0, "r0": self.r0,
            "sigma1_at_crit": self.sigma1_at_crit,
            "d_sigma1_d_lambda": self.d_sigma1_d_lambda,
            "radial_slope": self.radial_slope,
            "radial_curvature": self.radial_curvature,
            "mu0_curve": [list(t) for t in self.mu0_curve],
            "lambda_star": self.lambda_star,
            "checks": dict(self.checks),
            "diagnostics": dict(self.diagnostics),
        }


def polygon_points(c: PolygonConfig):
    """k points at radius r, equally spaced in the z = 0 plane."""
    return [np.array([c.r * math.cos(2.0 * math.pi * j / c.k),
                      c.r * math.sin(2.0 * math.pi * j / c.k), 0.0])
            for j in range(c.k)]


def sigma1_polygon(a: float, k: int, lam: float, r: float,
                   tol: float = 1e-10) -> float:
    """Row-sum formula sigma1 = g(zeta_1) - sum_j G(zeta_1, zeta_j)."""
    c = PolygonConfig(k, r, a)
    pts = polygon_points(c)
    d = annulus(a)
    val = robin(d, lam, pts[0], tol)
    for j in range(1, k):
        val -= green(d, lam, pts[0], pts[j], tol).value
    return val


def _cheb_grid(lo: float, hi: float, n: int = GRID_N) -> np.ndarray:
    i = np.arange(n)
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(
        math.pi * (2 * i + 1) / (2 * n))
    return np.sort(nodes)


def golden_min(f, lo: float, hi: float, tol: float):
    """Golden-section minimizer; returns (argmin, min)."""
    c = hi - _PHI * (hi - lo)
    d = lo + _PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _PHI * (hi - lo)
            fd = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


def _refined_min(f, a: float, n: int = GRID_N, r_tol: float | None = None):
    """Grid minimum of f over (a, 1) plus golden-section refinement.

    Returns (r_min, f_min, grid_values).  Raises GridTooCoarse when the
    refinement undercuts the coarse minimum by more than the local grid
    variation (a spike the grid cannot see)."""
    pad = EDGE_MARGIN * (1.0 - a)
    grid = _cheb_grid(a + pad, 1.0 - pad, n)
    vals = np.array([f(r) for r in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, n - 1)]
    if r_tol is None:
        r_tol = 1e-6 * (1.0 - a)
    r_min, f_min = golden_min(f, lo, hi, r_tol)
    if f_min > vals[i]:
        r_min, f_min = grid[i], vals[i]
    spread = float(np.max(vals) - vals[i])
    if vals[i] - f_min > 0.25 * spread + 1e-12:
        raise GridTooCoarse(
            f"refined minimum {f_min:.6e} far below grid minimum "
            f"{vals[i]:.6e}")
    return float(r_min), float(f_min), vals


def _bisect_positivity(f_min_of_lam, lam_hi: float, tol: float) -> float:
    """Largest lambda in (tol, lam_hi) with f_min_of_lam(lambda) > 0,
    located by bisection; predicate must hold at the lower end."""
    lo = tol
    if f_min_of_lam(lo) <= 0.0:
        raise NoPositiveStart(
            "positivity predicate already fails near lambda = 0")
    hi = lam_hi
    if f_min_of_lam(hi) > 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f_min_of_lam(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def find_lambda0(a: float, k: int, tol: float = 1e-7):
    """(lambda0, r0): the positivity threshold of min_r sigma1(lambda, .)
    and the minimizing radius at lambda0."""
    lam1 = lambda1(annulus(a))

    def min_sigma(lam):
        _, m, _ = _refined_min(lambda r: sigma1_polygon(a, k, lam, r), a)
        return m

    lam0 = _bisect_positivity(min_sigma, lam1 - tol, tol)
    r0, _, _ = _refined_min(lambda r: sigma1_polygon(a, k, lam0, r), a)
    return lam0, r0


def lambda_star_ray(a: float, tol: float = 1e-7) -> float:
    """Zero crossing in lambda of min_r g_lambda(zeta_1(r)) on the polygon
    radius ray (g_lambda is radial on the annulus, so the ray suffices)."""
    d = annulus(a)
    lam1 = lambda1(d)

    def min_g(lam):
        _, m, _ = _refined_min(
            lambda r: robin(d, lam, (r, 0.0, 0.0), 1e-10), a)
        return m

    return _bisect_positivity(min_g, lam1 - tol, tol)


def f_lambda(a: float, k: int, lam: float, r: float,
             tol: float = 1e-10) -> float:
    """f_lambda(r) = k sigma1(lambda, r) (the circulant row-sum scale)."""
    return k * sigma1_polygon(a, k, lam, r, tol)


def mu0(a: float, k: int, lam: float, r: float,
        consts: EnergyConstants) -> float:
    """mu0 = -a1 f / (k a2 lambda - a3 f^2); the concentration rate in the
    post-critical regime f <= 0."""
    f = f_lambda(a, k, lam, r)
    if f > 0.0:
        raise WrongRegime(f"f_lambda(r) = {f:.6e} > 0 (pre-critical)")
    denom = k * consts.a2.closed * lam - consts.a3.closed * f * f
    if denom <= 1e-12 * max(1.0, k * consts.a2.closed * lam):
        raise DegenerateDenominator(
            f"k a2 lambda - a3 f^2 = {denom:.6e} not positive")
    return -consts.a1.closed * f / denom


def reduced_profile(a: float, k: int, lam: float, r_grid,
                    consts: EnergyConstants):
    """Table of (r, f, mu0, Phi) with Phi = F(mu0(r), r) - k a0, using the
    radial reduced energy F = k a0 + 2 a1 mu f + k a2 lam mu^2 - a3 mu^2 f^2.
    Rows with f >= 0 are marked out-of-regime."""
    a1c, a2c, a3c = (consts.a1.closed, consts.a2.closed, consts.a3.closed)
    rows = []
    for r in r_grid:
        f = f_lambda(a, k, lam, float(r))
        if f < 0.0:
            denom = k * a2c * lam - a3c * f * f
            mu = -a1c * f / denom
            phi = 2.0 * a1c * mu * f + denom * mu * mu
            rows.append({"r": float(r), "f": f, "mu": mu, "Phi": phi,
                         "in_regime": True})
        else:
            rows.append({"r": float(r), "f": f, "mu": None, "Phi": None,
                         "in_regime": False})
    # interior critical point of Phi (discrete local minimum)
    crit = None
    for i in range(1, len(rows) - 1):
        p = [rows[i - 1], rows[i], rows[i + 1]]
        if all(q["in_regime"] for q in p):
            if p[1]["Phi"] < p[0]["Phi"] and p[1]["Phi"] < p[2]["Phi"]:
                crit = rows[i]["r"]
                break
    return rows, crit


def a_threshold(k: int, tol: float = 1e-3, n_grid: int = 65):
    """Empirical threshold in a for the lambda = 0 positivity predicates:
    sigma1(0, r) > 0 on the grid (positiveSigma1Lambda0) and pairwise
    g0 > G0 (positivePairLambda0).  Bisection in a; returns the bracket
    with verdicts rather than raising."""
    if k < 2:
        raise DomainError("k >= 2 required")

    def predicate(a: float) -> bool:
        d = annulus(a)
        # absolute floor keeps the mode count feasible for very thin annuli
        pad = max(EDGE_MARGIN * (1.0 - a), 2e-3)
        grid = _cheb_grid(a + pad, 1.0 - pad, n_grid)
        for r in grid:
            c = PolygonConfig(k, float(r), a)
            pts = polygon_points(c)
            g = robin(d, 0.0, pts[0], 1e-10)
            Gs = [green(d, 0.0, pts[0], pts[j], 1e-10).value
                  for j in range(1, k)]
            if g - math.fsum(Gs) <= 0.0:
                return False
            if Gs and g - max(Gs) <= 0.0:
                return False
        return True

    lo, hi = 0.02, 0.98
    p_lo, p_hi = predicate(lo), predicate(hi)
    if p_lo:
        return {"threshold": lo, "bracket": (lo, lo),
                "verdicts": {"lo": True, "hi": p_hi},
                "note": "predicate already true at the lower bracket"}
    if not p_hi:
        return {"threshold": hi, "bracket": (hi, hi),
                "verdicts": {"lo": False, "hi": False},
                "note": "predicate false across the bracket"}
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return {"threshold": hi, "bracket": (lo, hi),
            "verdicts": {"lo": False, "hi": True}, "note": ""}


def two_bubble_certificate(a: float):
    """Sufficient two-bubble condition: q(t) = 4t^2 - (7a+1)t + 4a > 0 on
    (a, 1).  Returns (holds, margin, touch_t)."""
    if not 0.0 < a < 1.0:
        raise DomainError("need 0 < a < 1")
    tv = (7.0 * a + 1.0) / 8.0  # vertex

    def q(t):
        return 4.0 * t * t - (7.0 * a + 1.0) * t + 4.0 * a

    if a < tv < 1.0:
        tmin, qmin = tv, q(tv)
    else:
        qa, q1 = q(a), q(1.0)
        tmin, qmin = (a, qa) if qa <= q1 else (1.0, q1)
    holds = qmin > 0.0
    return holds, qmin, (None if holds else tmin)


def theorem1_report(a: float, k: int, tol: float = 1e-7) -> CriticalityReport:
    """End-to-end criticality analysis at (a, k); see CriticalityReport."""
    d = annulus(a)
    lam0, r0 = find_lambda0(a, k, tol)
    lam_star = lambda_star_ray(a, tol)
    lam1 = lambda1(d)

    from .bubbles import compute_constants
    consts = compute_constants(1e-9)

    sig = lambda lam, r: sigma1_polygon(a, k, lam, r)
    s_crit = sig(lam0, r0)

    # lambda-derivative (central, Richardson)
    hl = min(1e-4 * lam1, 0.49 * (lam1 - lam0), 0.49 * lam0)
    d1 = (sig(lam0 + hl, r0) - sig(lam0 - hl, r0)) / (2.0 * hl)
    d2 = (sig(lam0 + 0.5 * hl, r0) - sig(lam0 - 0.5 * hl, r0)) / hl
    ds_dlam = (4.0 * d2 - d1) / 3.0

    # radial derivatives at (lam0, r0)
    hr = 1e-4 * (1.0 - a)
    sp = sig(lam0, r0 + hr)
    sm = sig(lam0, r0 - hr)
    s0 = s_crit
    radial_slope = (sp - sm) / (2.0 * hr)
    radial_curv = (sp - 2.0 * s0 + sm) / hr ** 2

    pts = polygon_points(PolygonConfig(k, r0, a))
    M = build_matrix(d, lam0, pts, 1e-10)
    psi_val = psi(M)
    eig = eigen(M)

    eps_grid = np.geomspace(1e-3, 1e-1, 7)
    curve = []
    for eps in eps_grid:
        try:
            curve.append((float(eps), mu0(a, k, lam0 + eps, r0, consts)))
        except (WrongRegime, DegenerateDenominator):
            curve.append((float(eps), None))

    # monotone decrease of sigma1 in lambda across the radius grid
    pad = EDGE_MARGIN * (1.0 - a)
    grid = _cheb_grid(a + pad, 1.0 - pad, 17)
    monotone = True
    for r in grid:
        if (sig(lam0 + hl, r) - sig(lam0 - hl, r)) >= 0.0:
            monotone = False
            break

    # all near-zero local minima of sigma1(lambda0, .); global minimizer is r0
    rvals = np.array([sig(lam0, r) for r in grid])
    near_minima = [(r0, s_crit)]
    for i in range(1, len(grid) - 1):
        if rvals[i] < rvals[i - 1] and rvals[i] < rvals[i + 1]:
            if abs(rvals[i]) <= 100.0 * tol * max(1.0, abs(ds_dlam)):
                near_minima.append((float(grid[i]), float(rvals[i])))

    sigma_scale = max(1.0, abs(ds_dlam))
    checks = {
        "psi_zero": abs(s_crit) <= 10.0 * tol * sigma_scale,
        "psd": float(eig.values[0]) >= -10.0 * tol * sigma_scale,
        "radial_crit": abs(radial_slope) <= max(
            1e-3 * abs(radial_curv) * (1.0 - a), 1e-6),
        "monotone_lambda": monotone,
        "lambda0_below_lambda_star": lam0 <= lam_star + 2.0 * tol,
    }
    diagnostics = {
        "psi": psi_val,
        "eigenvalues": eig.values.tolist(),
        "lambda1": lam1,
        "tol": tol,
        "fd_steps": {"lambda": hl, "r": hr},
        "near_zero_minima": near_minima,
        "grid": {"n": GRID_N, "edge_margin": EDGE_MARGIN * (1.0 - a)},
    }
    return CriticalityReport(
        lambda0=lam0, r0=r0, sigma1_at_crit=s_crit,
        d_sigma1_d_lambda=ds_dlam, radial_slope=radial_slope,
        radial_curvature=radial_curv, mu0_curve=tuple(curve),
        lambda_star=lam_star, checks=checks, diagnostics=diagnostics)
