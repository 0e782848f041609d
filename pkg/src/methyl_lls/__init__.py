"""Relaxation of symmetry-polarized methyl-group spin states into Zeeman order.

Modules: ``spinalg`` (Pauli algebra), ``symmetry_basis`` (C3 eigenbasis and
seed states), ``dipolar`` (rank-2 tensors), ``master_equation`` (Lindblad and
rate-equation engines), ``observables`` (NMR peaks), ``cli``.
"""

from .master_equation import (
    LindbladTerm,
    SpectralDensitySet,
    het_generator,
    homo_generator,
    lindblad_propagate,
    populations,
    rate_matrix,
    rate_propagate,
    seed_populations,
)
from .observables import PeakSet, SpectrumConfig, carbon_peaks, proton_peaks
from .symmetry_basis import FULL_LEVELS, PROTON_LEVELS, PolarizationParams, SymmetryLabel

__version__ = "0.1.0"

__all__ = [
    "FULL_LEVELS",
    "LindbladTerm",
    "PROTON_LEVELS",
    "PeakSet",
    "PolarizationParams",
    "SpectralDensitySet",
    "SpectrumConfig",
    "SymmetryLabel",
    "carbon_peaks",
    "het_generator",
    "homo_generator",
    "lindblad_propagate",
    "populations",
    "proton_peaks",
    "rate_matrix",
    "rate_propagate",
    "seed_populations",
]
