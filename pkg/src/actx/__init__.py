"""Phase-field flow with transport and geometric-measure diagnostics."""

__version__ = "0.1.0"

from .grid import GridSpec, ScalarField, VectorField
from .potential import DoubleWell
from .scenario import ScenarioConfig
from .solver import SimState, SolverConfig, Trajectory

__all__ = [
    "GridSpec",
    "ScalarField",
    "VectorField",
    "DoubleWell",
    "ScenarioConfig",
    "SimState",
    "SolverConfig",
    "Trajectory",
    "__version__",
]
