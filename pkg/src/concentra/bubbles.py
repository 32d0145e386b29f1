"""Standard bubbles w_{mu,zeta}, their parameter derivatives, and the
energy constants a0..a3 with quadrature verification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .errors import DomainError, QuadratureNotConverged

ALPHA3 = 3.0 ** 0.25


@dataclass(frozen=True)
class BubbleParams:
    mu: float
    center: tuple = (0.0, 0.0, 0.0)
    alpha3: float = ALPHA3

    def __post_init__(self):
        if not self.mu > 0.0:
            raise DomainError(f"mu must be positive, got {self.mu}")
        if abs(self.alpha3 ** 2 - math.sqrt(3.0)) > 1e-14:
            raise DomainError("alpha3^2 must equal sqrt(3)")
        object.__setattr__(self, "center",
                           tuple(float(c) for c in self.center))

    @property
    def zeta(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)


def eval_bubble(p: BubbleParams, x) -> float:
    """w_{mu,zeta}(x) = alpha3 mu^{1/2} (mu^2 + |x-zeta|^2)^{-1/2}.

    Accepts a single point (3,) or a batch (..., 3); returns matching shape.
    """
    d = np.asarray(x, dtype=float) - p.zeta
    rho2 = np.sum(d * d, axis=-1)
    out = p.alpha3 * math.sqrt(p.mu) / np.sqrt(p.mu ** 2 + rho2)
    return float(out) if out.ndim == 0 else out


def eval_bubble_laplacian(p: BubbleParams, x):
    """Closed-form Laplacian: -3 alpha3 mu^{5/2} (mu^2+rho^2)^{-5/2}.

    Derived from w'' + 2w'/rho for the radial profile; equals -w^5 because
    alpha3^5 = 3 alpha3 (that identity is what the PDE test checks).
    """
    d = np.asarray(x, dtype=float) - p.zeta
    rho2 = np.sum(d * d, axis=-1)
    out = -3.0 * p.alpha3 * p.mu ** 2.5 * (p.mu ** 2 + rho2) ** -2.5
    return float(out) if out.ndim == 0 else out


def eval_bubble_kernels(p: BubbleParams, x):
    """Translation derivatives z1..z3 = D_zeta w . e_j and dilation z4 = dw/dmu.

    Closed forms:
        z_j = alpha3 mu^{1/2} (x_j - zeta_j) (mu^2 + rho^2)^{-3/2}
        z_4 = alpha3 (rho^2 - mu^2) / (2 mu^{1/2} (mu^2 + rho^2)^{3/2})
    """
    d = np.asarray(x, dtype=float) - p.zeta
    rho2 = float(np.dot(d, d))
    denom = (p.mu ** 2 + rho2) ** 1.5
    trans = p.alpha3 * math.sqrt(p.mu) * d / denom
    z4 = p.alpha3 * (rho2 - p.mu ** 2) / (2.0 * math.sqrt(p.mu) * denom)
    return float(trans[0]), float(trans[1]), float(trans[2]), float(z4)


@dataclass(frozen=True)
class ConstPair:
    closed: float
    quadrature: float

    @property
    def rel_error(self) -> float:
        return abs(self.quadrature - self.closed) / abs(self.closed)


@dataclass(frozen=True)
class EnergyConstants:
    a0: ConstPair
    a1: ConstPair
    a2: ConstPair
    a3: ConstPair

    def as_dict(self):
        return {name: {"closed": getattr(self, name).closed,
                       "quadrature": getattr(self, name).quadrature,
                       "rel_error": getattr(self, name).rel_error}
                for name in ("a0", "a1", "a2", "a3")}


def _U(r):
    return ALPHA3 / np.sqrt(1.0 + r * r)


def _radial(integrand, power_decay, tol_abs, singular_origin=False):
    """Integrate 4 pi r^2 integrand(r) over (0, inf).

    Finite upper limit R is picked so the analytic tail bound of the
    integrand's power decay (integrand*r^2 ~ C r^{-p}) stays below tol_abs/10;
    the bound is folded into the returned error estimate.
    """
    probe = 100.0
    C = abs(integrand(probe)) * probe ** 2 * probe ** power_decay
    p = power_decay
    if p <= 1.0:
        raise QuadratureNotConverged("tail does not decay")
    # tail <= 4 pi C R^{1-p} / (p-1); R from the analytic bound
    R = (10.0 * 4.0 * math.pi * C / ((p - 1.0) * tol_abs)) ** (1.0 / (p - 1.0))
    R = max(R, 200.0)
    f = lambda r: 4.0 * math.pi * r * r * integrand(r)
    val1, err1 = quad(f, 0.0, 10.0, epsabs=tol_abs / 10, epsrel=1e-13,
                      limit=200)
    # [10, R] via u = 1/r: integrand becomes 4 pi u^{-4} integrand(1/u),
    # bounded and smooth for power-decaying tails.
    g = lambda u: 4.0 * math.pi * integrand(1.0 / u) / u ** 4
    val2, err2 = quad(g, 1.0 / R, 0.1, epsabs=tol_abs / 10, epsrel=1e-13,
                      limit=200)
    tail = 4.0 * math.pi * C * R ** (1.0 - p) / (p - 1.0)
    err = err1 + err2 + tail
    if err > tol_abs:
        raise QuadratureNotConverged(
            f"radial quadrature error {err:.2e} exceeds {tol_abs:.2e}")
    return val1 + val2, err


@lru_cache(maxsize=8)
def compute_constants(tol: float = 1e-10) -> EnergyConstants:
    """Quadrature of the defining integrals of a0..a3, paired with the
    closed forms.  tol is a relative tolerance per constant."""
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    s3 = math.sqrt(3.0)
    closed = {
        "a0": s3 * math.pi ** 2 / 4.0,
        "a1": 8.0 * s3 * math.pi ** 2,
        "a2": s3 * math.pi ** 2,
        "a3": 120.0 * s3 * math.pi ** 4,
    }

    # a0 = (1/3) int U^6 ; integrand*r^2 ~ r^{-4}
    q0, _ = _radial(lambda r: _U(r) ** 6 / 3.0, 4.0, tol * closed["a0"])
    # a1 = 2 pi alpha3 int U^5 ; ~ r^{-3}
    q1, _ = _radial(lambda r: 2.0 * math.pi * ALPHA3 * _U(r) ** 5, 3.0,
                    tol * closed["a1"])

    # a2 = (alpha3/2) int [ (1/|z| - 1/sqrt(1+|z|^2)) U + |z| U^5 / 2 ]
    # The bracket's first factor is evaluated cancellation-free as
    # 1/(r sqrt(1+r^2) (sqrt(1+r^2)+r)).
    def a2_integrand(r):
        s = math.sqrt(1.0 + r * r)
        gap = 1.0 / (r * s * (s + r))
        return ALPHA3 / 2.0 * (gap * _U(r) + 0.5 * r * _U(r) ** 5)

    q2, _ = _radial(a2_integrand, 2.0, tol * closed["a2"])
    # a3 = (5/2)(4 pi alpha3)^2 int U^4 ; ~ r^{-2}
    q3, _ = _radial(
        lambda r: 2.5 * (4.0 * math.pi * ALPHA3) ** 2 * _U(r) ** 4, 2.0,
        tol * closed["a3"])

    return EnergyConstants(
        a0=ConstPair(closed["a0"], q0), a1=ConstPair(closed["a1"], q1),
        a2=ConstPair(closed["a2"], q2), a3=ConstPair(closed["a3"], q3))


def beta_integral_check(q: float, alpha: float):
    """int_0^inf (r/(1+r^2))^q r^{-alpha-1} dr vs the Gamma closed form."""
    if not (q - alpha > 0.0 and q + alpha > 0.0):
        raise DomainError(
            f"need q-alpha>0 and q+alpha>0, got q={q}, alpha={alpha}")
    closed = math.exp(gammaln((q - alpha) / 2.0) + gammaln((q + alpha) / 2.0)
                      - math.log(2.0) - gammaln(q))

    def f(r):
        return (r / (1.0 + r * r)) ** q * r ** (-alpha - 1.0)

    v1, e1 = quad(f, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    v2, e2 = quad(f, 1.0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    if e1 + e2 > 1e-9 * max(1.0, abs(closed)):
        raise QuadratureNotConverged("beta integral quadrature error too big")
    return v1 + v2, closed
