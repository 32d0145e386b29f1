from ._core import BACKEND
from .engine import (DEFAULT_TOL, LMAX, GreenEval, d_lambda, green,
                     regular_part, robin)
from .series_g0 import (annulus_G0_antipodal, annulus_g0_series,
                        series_metadata)

__all__ = [
    "BACKEND", "DEFAULT_TOL", "LMAX", "GreenEval", "green", "regular_part",
    "robin", "d_lambda", "annulus_g0_series", "annulus_G0_antipodal",
    "series_metadata",
]
