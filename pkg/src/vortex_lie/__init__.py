"""Pseudo-spectral simulation of closed vortex filaments under the localized
induction equation with an external flow, the regularized exponential-Euler
scheme, modified-energy diagnostics and verification experiments."""
from .config import RunConfig, load_config, parse_config
from .errors import (
    ConfigurationError,
    DataIntegrityError,
    FilamentDegenerateError,
    HasimotoUndefinedError,
    InputError,
    PicardDivergedError,
)
from .filament import Filament, circle, ellipse, geometry_report, perturbed_circle
from .flows import FlowField
from .solver import SolverConfig, Trajectory, evolve

__version__ = "0.1.0"
