"""Green function G_lambda, regular part H_lambda and Robin function g_lambda.

Everything is built on the mode-sum kernel Htilde (see _kernels_py), with the
free-space Helmholtz kernel cos(k|z|)/(4pi|z|) subtracted inside the engine:

    G_lambda(x, y)  = cos(k|x-y|)/(4pi|x-y|) - Htilde(x, y)
    H_lambda(x, y)  = Htilde(x, y) + (1 - cos(k|x-y|))/(4pi|x-y|)
    g_lambda(x)     = Htilde(x, x)

The coincident-point limit of (1-cos)/(4pi|z|) is zero, so the Robin function
comes straight from the smooth series with no cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..domain import ANNULUS, BALL, DomainSpec, lambda1
from ..errors import (CoincidentPoints, DomainError,
                      PointsTooCloseToBoundary, ResonantMode, StepOutOfRange)
from ._core import NEED_MORE_TERMS, htilde_series

LMAX = 10_000
DEFAULT_TOL = 1e-10
FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class GreenEval:
    value: float
    truncation_order: int
    tail_bound: float


def _check_lambda(d: DomainSpec, lam: float) -> None:
    if lam < 0.0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    if lam >= lambda1(d):
        raise ResonantMode(
            f"lambda={lam} is not below the first Dirichlet eigenvalue "
            f"{lambda1(d):.6f}")


def _check_interior(d: DomainSpec, x) -> None:
    if not d.contains(x):
        raise DomainError(f"point {np.asarray(x).tolist()} is not interior")


def _pair_geometry(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = float(np.linalg.norm(x))
    s = float(np.linalg.norm(y))
    if r < 1e-300 or s < 1e-300:
        costh = 1.0
    else:
        costh = float(np.dot(x, y) / (r * s))
        costh = min(1.0, max(-1.0, costh))
    return r, s, costh


def _htilde(d: DomainSpec, lam: float, r: float, s: float, costh: float,
            tol: float):
    a = d.inner_radius if d.kind == ANNULUS else -1.0
    value, L, tail, status = htilde_series(lam, a, r, s, costh, tol, LMAX)
    if status == NEED_MORE_TERMS:
        raise PointsTooCloseToBoundary(
            f"mode series needs more than {LMAX} terms "
            f"(r={r:.6f}, s={s:.6f}, a={max(a, 0):.3f})")
    return value, L, tail


def green(d: DomainSpec, lam: float, x, y, tol: float = DEFAULT_TOL
          ) -> GreenEval:
    """G_lambda(x, y) with series truncation metadata."""
    _check_lambda(d, lam)
    _check_interior(d, x)
    _check_interior(d, y)
    z = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    dist = float(np.linalg.norm(z))
    if dist < 1e-12:
        raise CoincidentPoints("green requires x != y")
    r, s, costh = _pair_geometry(x, y)
    ht, L, tail = _htilde(d, lam, r, s, costh, tol)
    gamma_free = math.cos(math.sqrt(lam) * dist) / (FOUR_PI * dist)
    return GreenEval(gamma_free - ht, L, tail)


def regular_part(d: DomainSpec, lam: float, x, y,
                 tol: float = DEFAULT_TOL) -> float:
    """H_lambda(x, y) = Gamma(y-x) - G_lambda(x, y); smooth on the diagonal.

    Computed as Htilde + (1-cos(k|z|))/(4pi|z|); the second term is evaluated
    as 2 sin^2(k|z|/2)/(4pi|z|) and vanishes in the coincident limit.
    """
    _check_lambda(d, lam)
    _check_interior(d, x)
    _check_interior(d, y)
    r, s, costh = _pair_geometry(x, y)
    ht, _, _ = _htilde(d, lam, r, s, costh, tol)
    z = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    dist = float(np.linalg.norm(z))
    if dist < 1e-12:
        return ht
    k = math.sqrt(lam)
    return ht + 2.0 * math.sin(0.5 * k * dist) ** 2 / (FOUR_PI * dist)


def robin(d: DomainSpec, lam: float, x, tol: float = DEFAULT_TOL) -> float:
    """Robin function g_lambda(x) = H_lambda(x, x)."""
    return regular_part(d, lam, x, x, tol)


def d_lambda(op: str, d: DomainSpec, lam: float, x, y=None,
             h: float | None = None, tol: float = DEFAULT_TOL):
    """Central-difference d/dlambda of robin or green, with one Richardson
    extrapolation level.  Returns (value, error_estimate, step_used)."""
    lam1 = lambda1(d)
    if h is None:
        h = 1e-4 * lam1
    if not (0.0 < lam - h and lam + h < lam1):
        raise StepOutOfRange(
            f"lambda +- h = {lam} +- {h} leaves (0, {lam1:.6f})")

    if op == "robin":
        def f(l):
            return robin(d, l, x, tol)
    elif op == "green":
        if y is None:
            raise DomainError("d_lambda(op='green') needs both points")

        def f(l):
            return green(d, l, x, y, tol).value
    else:
        raise DomainError(f"unknown op {op!r}; expected 'robin' or 'green'")

    def central(step):
        return (f(lam + step) - f(lam - step)) / (2.0 * step)

    d1 = central(h)
    d2 = central(0.5 * h)
    value = (4.0 * d2 - d1) / 3.0
    err = abs(d2 - d1) / 3.0
    return value, err, h
