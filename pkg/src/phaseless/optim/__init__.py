from .l1 import (
    L1BallResult,
    min_l1_affine,
    min_l1_offsupport_affine,
    min_l1_residual_ball,
    project_l1_ball,
)
from .simplex import LpSolution, solve_lp

__all__ = [
    "L1BallResult",
    "LpSolution",
    "min_l1_affine",
    "min_l1_offsupport_affine",
    "min_l1_residual_ball",
    "project_l1_ball",
    "solve_lp",
]
