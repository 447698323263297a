"""Pseudo-spectral solver and regularity-monitor harness for the 3D periodic
MHD-Boussinesq system (full, non-diffusive, and fully inviscid regimes)."""

from .dynamics import Params, State, Tendency, advect, pressure_recover, rhs, scalar_advect
from .errors import (
    BlowupError,
    ConfigurationError,
    DataCorruptionError,
    SnapshotFormatError,
)
from .spectral import Grid, grid_for
from .timestepper import StepReport, cfl_dt, step

__version__ = "0.1.0"

__all__ = [
    "Params", "State", "Tendency", "advect", "scalar_advect", "rhs",
    "pressure_recover", "Grid", "grid_for", "StepReport", "step", "cfl_dt",
    "BlowupError", "ConfigurationError", "DataCorruptionError",
    "SnapshotFormatError", "__version__",
]
