"""Casimir stress inside planar inhomogeneous dielectrics.

Units throughout: hbar = c = 1, lengths in an implicit unit L, imaginary
wavenumbers in 1/L and stress in hbar*c/L**4.
"""

from casimir_stress.profile import (
    Beltrami,
    DispersionParams,
    DomainError,
    EdgeDescriptor,
    ExponentialDispersive,
    Profile,
    Segment,
    Tabulated,
    Uniform,
    ValidationError,
    detect_edges,
    load_profile,
    permittivity,
    permeability,
    refractive_index,
)
from casimir_stress.analytic import EdgeLaw, casimir_ideal, near_edge_stress
from casimir_stress.stress import QuadratureParams, StressResult, stress_at, stress_profile

__version__ = "0.1.0"

__all__ = [
    "Beltrami",
    "DispersionParams",
    "DomainError",
    "EdgeDescriptor",
    "EdgeLaw",
    "ExponentialDispersive",
    "Profile",
    "QuadratureParams",
    "Segment",
    "StressResult",
    "Tabulated",
    "Uniform",
    "ValidationError",
    "casimir_ideal",
    "detect_edges",
    "load_profile",
    "near_edge_stress",
    "permeability",
    "permittivity",
    "refractive_index",
    "stress_at",
    "stress_profile",
]
