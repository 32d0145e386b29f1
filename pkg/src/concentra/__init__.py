"""concentra: Green/Robin functions of -Laplace - lambda on balls and annuli,
multi-bubble interaction matrices and reduced-energy diagnostics."""

__version__ = "0.1.0"

from .domain import DomainSpec, annulus, lambda1, unit_ball

__all__ = ["DomainSpec", "annulus", "unit_ball", "lambda1", "__version__"]
