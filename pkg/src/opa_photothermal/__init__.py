"""Photothermal noise in a degenerate optical parametric amplifier.

Quantum-noise spectra of a seeded, pumped OPA including absorption-driven
temperature fluctuations, and their projection onto GW interferometer noise.
"""
from .config import OpaParams, derive_rates, load_params, load_params_file, serialize
from .errors import OpaError
from .spectra import build_model, cutoff_estimate, log_grid, spectrum, variance_spectrum
from .steady_state import operating_point

__all__ = [
    "OpaParams", "OpaError", "build_model", "cutoff_estimate", "derive_rates", "load_params",
    "load_params_file", "log_grid", "operating_point", "serialize", "spectrum", "variance_spectrum",
]
