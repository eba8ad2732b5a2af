"""Pseudo-spectral lab for the Euler-Poincare equations on periodic 1D/2D grids."""
from .config import ExperimentConfig, parse_config, format_config
from .fields import SimulationState, MomentumField
from .grid import Grid

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "Grid",
    "MomentumField",
    "SimulationState",
    "format_config",
    "parse_config",
    "__version__",
]
