"""Exact spectra of a free particle on a ring closed by a U(2) junction."""

__version__ = "0.1.0"

from .algebra import BoundaryParams, Unitary2, from_params, parity_family, to_params
from .eigensolver import ScanWindow, Spectrum, SpectralPoint, Tolerances, solve_spectrum
from .errors import (
    DiscretizationError,
    InconsistentRootError,
    InvalidParameterError,
    SpectrumError,
)
from .presets import preset, quasiperiodic
from .spectral import spectral_function, zero_mode_condition
from .symmetry import SpectralClass, isospectral_family, spectral_class

__all__ = [
    "BoundaryParams", "Unitary2", "from_params", "parity_family", "to_params",
    "ScanWindow", "Spectrum", "SpectralPoint", "Tolerances", "solve_spectrum",
    "DiscretizationError", "InconsistentRootError", "InvalidParameterError", "SpectrumError",
    "preset", "quasiperiodic", "spectral_function", "zero_mode_condition",
    "SpectralClass", "isospectral_family", "spectral_class",
]
