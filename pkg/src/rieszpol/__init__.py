"""Riesz polarization (max-min potential) and energy on spheres, balls, the
circle and the segment."""

from .constants import (
    BoundValue,
    RieszDomainError,
    UnavailableConstantError,
    polarization_bound,
    tau,
    wiener_constant,
)
from .domains import Configuration, Domain, maximal_delta_net, roots_of_unity, sample_uniform
from .energy import energy, minimize_energy, polarization_lower_bound_from_energy
from .polarization import (
    MaxMinResult,
    NonConvergenceError,
    PolarizationResult,
    SolverOptions,
    discrete_polarization,
    equally_spaced_value,
    inner_min,
    maximize_polarization,
)
from .potentials import circle_A, riesz_potential

__version__ = "0.1.0"
