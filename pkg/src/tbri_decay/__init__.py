"""Decay of excited basis states in finite systems of interacting fermions.

Random two-body interaction (TBRI) model: exact survival probabilities,
strength functions and their analytic counterparts.
"""
__version__ = "0.1.0"

from .exceptions import TBRIError
from .fock_basis import FockBasis, OrbitalSet, enumerate_basis
from .tbri_model import ModelConfig, build_realization, direct_coupling_stats, sample_model
from .spectral import diagonalize, strength_function, density_of_states
from .dynamics import TimeGrid, SurvivalSeries, survival_probability, saturation_value
from .analytic import BreitWigner, Gaussian, Hybrid, hybrid_amplitude, crossover_time, fit_decay

__all__ = [
    "TBRIError", "FockBasis", "OrbitalSet", "enumerate_basis", "ModelConfig", "build_realization",
    "direct_coupling_stats", "sample_model", "diagonalize", "strength_function", "density_of_states",
    "TimeGrid", "SurvivalSeries", "survival_probability", "saturation_value", "BreitWigner",
    "Gaussian", "Hybrid", "hybrid_amplitude", "crossover_time", "fit_decay",
]
