"""Green/Robin engine: closed-form oracles, symmetry, PDE consistency."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concentra.domain import annulus, lambda1, unit_ball
from concentra.errors import (CoincidentPoints, DomainError,
                              PointsTooCloseToBoundary, ResonantMode)
from concentra.greens import BACKEND, green, regular_part, robin

FOUR_PI = 4.0 * math.pi


def ball_robin_center(lam):
    """g_lambda(0) on the unit ball: sqrt(lam) cot(sqrt(lam)) / 4 pi."""
    k = math.sqrt(lam)
    return k / math.tan(k) / FOUR_PI


def image_green_laplace(x, y):
    """Laplace Green function of the unit ball by the Kelvin image method."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    r = np.linalg.norm(x)
    direct = 1.0 / np.linalg.norm(x - y)
    image = 1.0 / (r * np.linalg.norm(x / r ** 2 - y)) if r > 0 \
        else 1.0
    return (direct - image) / FOUR_PI


def test_backend_selected():
    assert BACKEND in ("compiled", "python")


def test_ball_robin_closed_form():
    d = unit_ball()
    for lam in (0.5, 2.0, 5.0, 9.0):
        assert abs(robin(d, lam, (0, 0, 0)) - ball_robin_center(lam)) < 1e-10


def test_ball_laplace_robin_center():
    # criterion-3 oracle: g at the center tends to 1/(4 pi) as lam -> 0
    d = unit_ball()
    assert abs(robin(d, 1e-8, (0, 0, 0)) - 1.0 / FOUR_PI) < 1e-6


def test_ball_laplace_green_vs_image():
    d = unit_ball()
    pairs = [((0.3, 0.0, 0.0), (-0.2, 0.4, 0.1)),
             ((0.0, 0.0, 0.0), (0.5, 0.0, 0.0)),
             ((0.6, 0.1, -0.1), (0.55, 0.15, -0.05))]
    for x, y in pairs:
        got = green(d, 0.0, x, y).value
        assert abs(got - image_green_laplace(x, y)) < 1e-9


def test_ball_laplace_robin_vs_image():
    # g_0(x) = 1/(4 pi (1 - |x|^2)) from the image method
    d = unit_ball()
    for r in (0.0, 0.3, 0.6, 0.9):
        want = 1.0 / (FOUR_PI * (1.0 - r * r))
        assert abs(robin(d, 0.0, (r, 0, 0)) - want) < 1e-9


def test_druet_threshold_ball():
    # the Robin function at the center crosses zero at lambda = pi^2/4
    d = unit_ball()
    lo, hi = 0.5, 9.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if robin(d, mid, (0, 0, 0)) > 0.0:
            lo = mid
        else:
            hi = mid
    assert abs(0.5 * (lo + hi) - math.pi ** 2 / 4.0) < 1e-6


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.85), st.floats(0.05, 0.85),
       st.floats(0.0, 2.0 * math.pi), st.floats(-0.9, 0.9),
       st.floats(0.1, 8.0))
def test_green_symmetry_ball(r1, r2, phi, cz, lam):
    d = unit_ball()
    s = math.sqrt(1.0 - cz * cz)
    x = np.array([r1, 0.0, 0.0])
    y = r2 * np.array([s * math.cos(phi), s * math.sin(phi), cz])
    if np.linalg.norm(x - y) < 1e-6:
        return
    g1 = green(d, lam, x, y).value
    g2 = green(d, lam, y, x).value
    assert abs(g1 - g2) <= 1e-12 * max(1.0, abs(g1))


def test_green_symmetry_annulus(thin_annulus):
    x = np.array([0.95, 0.0, 0.0])
    y = np.array([0.0, 0.93, 0.05])
    g1 = green(thin_annulus, 300.0, x, y).value
    g2 = green(thin_annulus, 300.0, y, x).value
    assert abs(g1 - g2) <= 1e-12 * max(1.0, abs(g1))


def test_helmholtz_pde_vs_fd(thick_annulus):
    """(Delta_x + lam) G = 0 away from the source (kernel-vs-FD)."""
    lam = 7.0
    y = np.array([0.6, 0.0, 0.0])
    x = np.array([-0.2, 0.55, 0.1])
    h = 1e-4
    lap = 0.0
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        lap += (green(thick_annulus, lam, x + e, y).value
                - 2.0 * green(thick_annulus, lam, x, y).value
                + green(thick_annulus, lam, x - e, y).value) / h ** 2
    resid = lap + lam * green(thick_annulus, lam, x, y).value
    assert abs(resid) < 1e-4


def test_regular_part_smooth_at_diagonal(thick_annulus):
    x = np.array([0.6, 0.1, 0.0])
    g = robin(thick_annulus, 5.0, x)
    h = regular_part(thick_annulus, 5.0, x + 1e-7, x)
    assert abs(h - g) < 1e-5


def test_lambda1_values(thin_annulus):
    assert abs(lambda1(unit_ball()) - math.pi ** 2) < 1e-12
    assert abs(lambda1(thin_annulus) - math.pi ** 2 / 0.01) < 1e-8


def test_resonant_lambda_rejected(thin_annulus):
    with pytest.raises(ResonantMode):
        robin(thin_annulus, lambda1(thin_annulus) + 1.0, (0.95, 0, 0))


def test_exterior_point_rejected():
    with pytest.raises(DomainError):
        robin(unit_ball(), 1.0, (1.5, 0, 0))


def test_coincident_green_rejected():
    with pytest.raises(CoincidentPoints):
        green(unit_ball(), 1.0, (0.3, 0, 0), (0.3, 0, 0))


def test_boundary_pair_rejected(thin_annulus):
    # two points hugging the outer boundary need more modes than LMAX allows
    with pytest.raises(PointsTooCloseToBoundary):
        green(thin_annulus, 100.0, (0.9999998, 0, 0), (0, 0.9999999, 0))


def test_backends_agree(thin_annulus):
    """Compiled and pure kernels produce the same mode sums."""
    from concentra.greens import _core
    from concentra.greens import _kernels_py
    args = (300.0, 0.9, 0.95, 0.93, 0.2, 1e-12, 10_000)
    v1, L1, t1, s1 = _core.htilde_series(*args)
    v2, L2, t2, s2 = _kernels_py.htilde_series(*args)
    assert s1 == s2 == _kernels_py.OK
    assert abs(v1 - v2) <= 1e-13 * max(1.0, abs(v1))
