"""Domain descriptions: the unit ball and concentric annuli a < |x| < 1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

BALL = "ball"
ANNULUS = "annulus"


@dataclass(frozen=True)
class DomainSpec:
    """Either the unit ball or the annulus {a < |x| < 1} (outer radius 1)."""

    kind: str
    inner_radius: float = 0.0

    def __post_init__(self):
        if self.kind not in (BALL, ANNULUS):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.kind == ANNULUS and not 0.0 < self.inner_radius < 1.0:
            raise DomainError(
                f"annulus needs 0 < a < 1, got a={self.inner_radius}")
        if self.kind == BALL and self.inner_radius != 0.0:
            raise DomainError("unit ball has no inner radius")

    @property
    def a(self) -> float:
        return self.inner_radius

    def contains(self, x, margin: float = 0.0) -> bool:
        r = float(np.linalg.norm(x))
        if self.kind == BALL:
            return r < 1.0 - margin
        return self.inner_radius + margin < r < 1.0 - margin

    def boundary_distance(self, x) -> float:
        r = float(np.linalg.norm(x))
        if self.kind == BALL:
            return 1.0 - r
        return min(1.0 - r, r - self.inner_radius)

    @property
    def thickness(self) -> float:
        return 1.0 if self.kind == BALL else 1.0 - self.inner_radius


def unit_ball() -> DomainSpec:
    return DomainSpec(BALL)


def annulus(a: float) -> DomainSpec:
    return DomainSpec(ANNULUS, a)


def lambda1(d: DomainSpec) -> float:
    """First Dirichlet eigenvalue of -Laplace.

    Radial substitution u = v(r)/r turns the mode-0 problem into v'' = -lam v
    with v vanishing at both ends, so the first eigenvalue is (pi/width)^2.
    """
    if d.kind == BALL:
        return math.pi ** 2
    return math.pi ** 2 / (1.0 - d.inner_radius) ** 2
