"""The radial corrector D0: unique decaying radial solution of

    Delta D0 = -lambda alpha3 ( (1+|z|^2)^{-1/2} - 1/|z| )   on R^3.

Writing f for the right-hand side, the decaying solution is the double
integral  D0(rho) = int_rho^inf s^{-2} int_0^s t^2 f(t) dt ds.  The inner
integral has the closed form  -lambda alpha3 B(s)  with

    B(s) = (s/2) sqrt(1+s^2) - asinh(s)/2 - s^2/2,

so only the outer integral is done numerically.  B < 0 on (0, inf), hence
D0 < 0, with D0(rho) ~ -(lambda alpha3 / 2) log(rho)/rho at infinity.

D0 is linear in lambda; the cached spline profile is built once at
lambda*alpha3 = 1 and rescaled.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .bubbles import ALPHA3
from .errors import DomainError, QuadratureNotConverged

_TAIL_S = 50.0


def _B(s: float) -> float:
    """Inner-integral profile; stable for all s."""
    if s < 1e-4:
        # series: -s^2/2 + s^3/3 - s^5/10 + ...
        return s * s * (-0.5 + s / 3.0 - s ** 3 / 10.0)
    r = math.sqrt(1.0 + s * s)
    # (s/2) sqrt(1+s^2) - s^2/2 == s / (2 (sqrt(1+s^2) + s))
    return s / (2.0 * (r + s)) - math.asinh(s) / 2.0


def _tail_integral(rho: float) -> float:
    """int_rho^inf s^{-2} B(s) ds using the large-s expansion
    B = 1/4 - log(2s)/2 - 3/(16 s^2) + O(s^-4); valid for rho >= ~50."""
    return (1.0 / (4.0 * rho) - (math.log(2.0 * rho) + 1.0) / (2.0 * rho)
            - 1.0 / (16.0 * rho ** 3))


def _outer(rho: float) -> float:
    """int_rho^inf s^{-2} B(s) ds, exact inner closed form + adaptive quad."""
    if rho >= _TAIL_S:
        return _tail_integral(rho)
    val, err = quad(lambda s: _B(s) / (s * s), rho, _TAIL_S,
                    epsabs=1e-13, epsrel=1e-12, limit=200)
    if err > 1e-10:
        raise QuadratureNotConverged(f"D0 outer quadrature error {err:.2e}")
    return val + _tail_integral(_TAIL_S)


def compute_D0(rho: float, lam: float) -> float:
    """D0(rho) for -Delta D0 = lambda alpha3 ((1+rho^2)^{-1/2} - 1/rho)."""
    if rho < 0.0:
        raise DomainError("rho must be >= 0")
    if not lam > 0.0:
        raise DomainError("lambda must be positive")
    return lam * ALPHA3 * _outer(rho)


@lru_cache(maxsize=1)
def _profile() -> CubicSpline:
    """Spline of the unit profile int_rho^inf s^{-2} B ds on [0, 50]."""
    grid = np.concatenate([
        np.linspace(0.0, 2.0, 321),
        np.geomspace(2.0, _TAIL_S, 320)[1:],
    ])
    vals = np.array([_outer(float(r)) for r in grid])
    return CubicSpline(grid, vals)


def d0_values(rho, lam: float, exact: bool = False):
    """Vectorized D0; spline-backed unless exact=True (direct quadrature)."""
    if not lam > 0.0:
        raise DomainError("lambda must be positive")
    rho = np.asarray(rho, dtype=float)
    scalar = rho.ndim == 0
    rho = np.atleast_1d(rho)
    if np.any(rho < 0.0):
        raise DomainError("rho must be >= 0")
    if exact:
        out = np.array([_outer(float(r)) for r in rho])
    else:
        sp = _profile()
        out = np.empty_like(rho)
        inner = rho < _TAIL_S
        out[inner] = sp(rho[inner])
        if np.any(~inner):
            out[~inner] = np.array(
                [_tail_integral(float(r)) for r in rho[~inner]])
    out = lam * ALPHA3 * out
    return float(out[0]) if scalar else out
