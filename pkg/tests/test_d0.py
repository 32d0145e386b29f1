"""The radial correction profile D0."""

import math

import numpy as np
import pytest

from concentra.bubbles import ALPHA3
from concentra.d0 import compute_D0, d0_values
from concentra.errors import DomainError


def test_d0_linear_in_lambda():
    assert abs(compute_D0(0.7, 4.0) - 2.0 * compute_D0(0.7, 2.0)) < 1e-12


def test_d0_ode_residual():
    """-Delta D0 = lam alpha3 ((1+rho^2)^{-1/2} - 1/rho), radial Laplacian
    by central differences on the exact (quadrature) profile."""
    lam = 3.0
    h = 1e-3
    for rho in (0.4, 1.0, 2.5):
        grid = np.array([rho - h, rho, rho + h])
        f = d0_values(grid, lam, exact=True)
        d2 = (f[0] - 2.0 * f[1] + f[2]) / h ** 2
        d1 = (f[2] - f[0]) / (2.0 * h)
        lap = d2 + 2.0 * d1 / rho
        rhs = -lam * ALPHA3 * ((1.0 + rho * rho) ** -0.5 - 1.0 / rho)
        assert abs(lap - rhs) < 1e-5, f"rho={rho}"


def test_d0_spline_matches_exact():
    lam = 2.0
    rho = np.linspace(0.1, 8.0, 17)
    spline = d0_values(rho, lam)
    exact = d0_values(rho, lam, exact=True)
    assert np.max(np.abs(spline - exact)) < 1e-7


def test_d0_center_finite():
    v = compute_D0(0.0, 1.0)
    assert math.isfinite(v)
    # the profile is negative at the origin (the 1/rho source term wins)
    assert v < 0.0


def test_d0_decays():
    v1 = abs(compute_D0(5.0, 1.0))
    v2 = abs(compute_D0(50.0, 1.0))
    assert v2 < v1


def test_d0_validation():
    with pytest.raises(DomainError):
        compute_D0(-0.1, 1.0)
    with pytest.raises(DomainError):
        compute_D0(1.0, 0.0)
