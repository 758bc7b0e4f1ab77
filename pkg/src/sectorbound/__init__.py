"""Certified cost bounds for uncertain open quantum systems with
sector-bounded nonlinear Hamiltonian perturbations.

The package assembles a linear matrix inequality whose feasibility
certifies an upper bound on a time-averaged non-quadratic cost, solves the
associated conic program, and cross-checks certificates against truncated
Fock-space master-equation simulation.
"""

__version__ = "0.1.0"

from .errors import (AllInfeasible, ConfigError, IntegrationError,
                     SectorBoundError, SolverFailure, ValidationError)
from .model import (AnalysisConfig, Certificate, CostSpec, NonlinearitySpec,
                    PlantModel, SearchConfig, SectorConstants,
                    doubled_matrices, load_config, serialize_config,
                    validate_plant)

__all__ = [
    "__version__",
    "AllInfeasible",
    "AnalysisConfig",
    "Certificate",
    "ConfigError",
    "CostSpec",
    "IntegrationError",
    "NonlinearitySpec",
    "PlantModel",
    "SearchConfig",
    "SectorBoundError",
    "SectorConstants",
    "SolverFailure",
    "ValidationError",
    "doubled_matrices",
    "load_config",
    "serialize_config",
    "validate_plant",
]
