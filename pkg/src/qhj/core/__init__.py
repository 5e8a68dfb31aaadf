"""Exact quantum Hamilton-Jacobi solvers: closed forms, ODE paths and oracles."""
from .analytic import general_solution_ho, ho_eigenfunction, special_action_ho, special_momentum_ho
from .fields import ActionField, MomentumSeries, qhje_residual, split_residuals
from .numeric import finite_difference_XE, integrate_X, integrate_XE, integrate_Y_forbidden
from .oracle import companion_oracle
from .wavefunction import continuity_defect, count_nodes, wavefunction_from_action

__all__ = [
    "ActionField", "MomentumSeries", "companion_oracle", "continuity_defect", "count_nodes",
    "finite_difference_XE", "general_solution_ho", "ho_eigenfunction", "integrate_X", "integrate_XE",
    "integrate_Y_forbidden", "qhje_residual", "special_action_ho", "special_momentum_ho",
    "split_residuals", "wavefunction_from_action",
]
