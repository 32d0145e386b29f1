"""Annulus lambda=0: mode engine vs the classical image-series formulas."""

import numpy as np
import pytest

from concentra.domain import annulus
from concentra.greens import (annulus_G0_antipodal, annulus_g0_series, green,
                              robin, series_metadata)


@pytest.mark.parametrize("a", [0.3, 0.5, 0.8])
def test_robin_series_vs_engine(a):
    """g_0 by the P_m series against the mode engine at 10 radii, after the
    one-point normalization calibration of the series."""
    d = annulus(a)
    radii = np.linspace(a + 0.08 * (1 - a), 1 - 0.08 * (1 - a), 10)
    for r in radii:
        x = np.array([r, 0.0, 0.0])
        want = annulus_g0_series(a, x)
        got = robin(d, 0.0, x)
        assert abs(got - want) < 1e-6, f"a={a}, r={r}"


@pytest.mark.parametrize("a", [0.3, 0.5, 0.8])
def test_antipodal_series_vs_engine(a):
    d = annulus(a)
    radii = np.linspace(a + 0.1 * (1 - a), 1 - 0.1 * (1 - a), 10)
    for r in radii:
        x = np.array([r, 0.0, 0.0])
        want = annulus_G0_antipodal(a, x)
        got = green(d, 0.0, x, -x).value
        assert abs(got - want) < 1e-6, f"a={a}, r={r}"


def test_series_metadata_calibration():
    meta = series_metadata()
    # the calibrated normalization should come out as omega_2 = 4 pi
    assert abs(meta["omega2"] - meta["expected"]) < 1e-9 * meta["expected"]
    assert meta["reference"]["a"] == 0.5


def test_robin_radial_symmetry():
    """g_0 depends only on |x| on the annulus."""
    d = annulus(0.5)
    v1 = robin(d, 0.0, (0.7, 0.0, 0.0))
    v2 = robin(d, 0.0, (0.0, 0.7 / np.sqrt(2), 0.7 / np.sqrt(2)))
    assert abs(v1 - v2) < 1e-11
