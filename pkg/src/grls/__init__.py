"""Geometrically robust least squares on R^n x Gr(k, n)."""

from .errors import (
    ConfigError,
    DimensionError,
    DivergenceError,
    InfeasibleError,
    RankDeficiencyError,
    UnsupportedInstanceError,
)
from .geometry import (
    GrassmannPoint,
    HorizontalTangent,
    PrincipalAngles,
    StiefelRepresentative,
    chordal_distance,
    exp_map,
    orthonormalize,
    principal_angles,
    projection_matrix,
    random_point,
    random_tangent,
    tangent_project,
)
from .objective import ObjectivePoint, PenaltyParams, ProblemInstance, paper_instance
from .solver import SolveResult, SolverConfig, solve, stationarity, step

__version__ = "0.1.0"
