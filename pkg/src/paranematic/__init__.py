"""Interaction energies and annealing dynamics for disk colloids in a
weakly ordered (paranematic) host fluid.

Submodules:
    specfun      scaled Bessel functions, theta series, polylogarithm
    model        boundary data, particles, configurations, config files
    asymptotics  closed-form pair and multi-particle energies
    fieldsolver  exterior PDE solvers (collocation and finite difference)
    montecarlo   Metropolis simulated annealing of many colloids
    cli          command line entry point
"""

__version__ = "0.1.0"

import os as _os

# cap library thread pools before numpy/scipy load their BLAS backends
_threads = _os.environ.get("COLLOIDS_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .errors import (
    ConfigError,
    IllConditioned,
    InsufficientDecay,
    MeshTooCoarse,
    NonConverged,
    OverlapError,
    ParanematicError,
)
from .specfun import (
    bessel_k_scaled,
    bessel_ratio,
    interaction_coefficient,
    polylog_half,
    theta_k,
)
from .model import (
    BoundaryData,
    Particle,
    ParticleConfiguration,
    PotentialParameters,
    closest_boundary_points,
    load_particle_config,
    make_canonical,
    neck_gap,
    stacked_pair,
)
from .asymptotics import (
    EnergyBreakdown,
    PairPotentialSpec,
    mc_pair_potential,
    multi_particle_energy,
    nonconstant_pair_energy,
    order_one_neck_bracket,
    order_one_self_bracket,
    self_energy_mode,
    two_particle_O1,
    two_particle_large_b,
)

__all__ = [
    "__version__",
    "ParanematicError", "ConfigError", "OverlapError", "IllConditioned",
    "NonConverged", "MeshTooCoarse", "InsufficientDecay",
    "bessel_k_scaled", "bessel_ratio", "polylog_half", "theta_k",
    "interaction_coefficient",
    "BoundaryData", "Particle", "ParticleConfiguration", "PotentialParameters",
    "make_canonical", "neck_gap", "closest_boundary_points",
    "load_particle_config", "stacked_pair",
    "EnergyBreakdown", "PairPotentialSpec", "self_energy_mode",
    "two_particle_large_b", "two_particle_O1", "nonconstant_pair_energy",
    "multi_particle_energy", "mc_pair_potential",
    "order_one_self_bracket", "order_one_neck_bracket",
]
