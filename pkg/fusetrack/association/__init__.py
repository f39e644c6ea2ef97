from .cost import (
    COST_COVARIANCES,
    COST_TRACK,
    COST_TRACK_PLUS_OBS,
    CostMatrix,
    cost_matrix,
    mahalanobis_cost,
    quadratic_costs,
)
from .hungarian import (
    Assignment,
    forbidden_mask,
    hungarian_solve,
    solve_assignment,
)

__all__ = [
    'COST_COVARIANCES',
    'COST_TRACK',
    'COST_TRACK_PLUS_OBS',
    'Assignment',
    'CostMatrix',
    'cost_matrix',
    'forbidden_mask',
    'hungarian_solve',
    'mahalanobis_cost',
    'quadratic_costs',
    'solve_assignment',
]
