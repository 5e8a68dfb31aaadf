"""Exact solutions of the quantum Hamilton-Jacobi equation for one-dimensional wells."""
from .errors import DomainError, QHJError, SolverError
from .model import EnergySlice, PotentialModel, classify_region, turning_points
from .spectrum import EigenResult, find_eigenvalue, shooting_oracle

__version__ = "0.1.0"

__all__ = [
    "DomainError", "EigenResult", "EnergySlice", "PotentialModel", "QHJError", "SolverError",
    "classify_region", "find_eigenvalue", "shooting_oracle", "turning_points",
]
