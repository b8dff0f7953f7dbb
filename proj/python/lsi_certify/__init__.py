"""Python access to the log-Sobolev certification core."""

from ._core import (
    ConfigError,
    Grid,
    Potential,
    Spectrum,
    certify,
    converse,
    curvature_lower_bound,
    dirichlet_form,
    entropy,
    run,
    spectral_gap,
)

__all__ = [
    "ConfigError",
    "Grid",
    "Potential",
    "Spectrum",
    "certify",
    "converse",
    "curvature_lower_bound",
    "dirichlet_form",
    "entropy",
    "run",
    "spectral_gap",
]
