"""Normalized solutions of a coupled cubic-critical Schrodinger system on R^4.

Computes ground states (local minimizers) and mountain-pass states with
prescribed masses, together with the certificates that make a computed
pair checkable: Pohozaev balance, Lagrange multiplier identities, fiber
geometry, and asymptotic limits.
"""

from .asymptotics import (
    AsymptoticsReport,
    BubbleFit,
    DecayBound,
    FitNotApplicable,
    RateFit,
    bubble_fit,
    collapse_rate,
    collapse_scaling,
    decay_check,
    grad_seminorm_dist,
    ground_limit_check,
    limit_multiplier,
    mp_limit_check,
    pure_scalar_field,
    pure_scalar_level,
    suggest_grid,
    threshold_rescale,
)
from .fiber import (
    FiberProjection,
    FiberReport,
    FiberRoots,
    GeometryRefusal,
    ProjectionUndefined,
    classify,
    fiber_roots,
    project_minus,
    project_plus,
)
from .functionals import (
    Aggregates,
    ModelParams,
    PairState,
    SignReport,
    aggregates,
    energy,
    fiber_derivatives,
    fiber_value,
    gradient,
    multiplier_identity_residual,
    multipliers,
    pohozaev,
    sign_diagnostic,
)
from .grid import (
    GridError,
    GridMismatchError,
    RadialField,
    RadialGrid,
    ResolutionError,
    build_grid,
    dilate,
    norms,
    radial_laplacian,
)
from .profiles import (
    AdmissibilityError,
    CoupledConstants,
    GeometryConstants,
    ScalarProfile,
    ShootingError,
    bubble,
    cache_clear,
    cache_dir,
    cache_list,
    cache_warm,
    coupled_constants,
    cutoff_bubble,
    gamma_p,
    geometry_constants,
    gn_constant,
    sobolev_constant,
    solve_scalar_profile,
)
from .solvers import (
    ProbeReport,
    SolveResult,
    nonexistence_probe,
    scalar_geometry,
    solve_local_min,
    solve_mountain_pass,
    solve_scalar_branch,
    sweep,
    threshold_sequence_energy,
)

__all__ = [
    "AdmissibilityError",
    "Aggregates",
    "AsymptoticsReport",
    "BubbleFit",
    "CoupledConstants",
    "DecayBound",
    "FiberProjection",
    "FiberReport",
    "FiberRoots",
    "FitNotApplicable",
    "GeometryConstants",
    "GeometryRefusal",
    "GridError",
    "GridMismatchError",
    "ModelParams",
    "PairState",
    "ProbeReport",
    "ProjectionUndefined",
    "RadialField",
    "RadialGrid",
    "RateFit",
    "ResolutionError",
    "ScalarProfile",
    "ShootingError",
    "SignReport",
    "SolveResult",
    "aggregates",
    "bubble",
    "bubble_fit",
    "build_grid",
    "cache_clear",
    "cache_dir",
    "cache_list",
    "cache_warm",
    "classify",
    "collapse_rate",
    "collapse_scaling",
    "coupled_constants",
    "cutoff_bubble",
    "decay_check",
    "dilate",
    "energy",
    "fiber_derivatives",
    "fiber_roots",
    "fiber_value",
    "gamma_p",
    "geometry_constants",
    "gn_constant",
    "grad_seminorm_dist",
    "gradient",
    "ground_limit_check",
    "limit_multiplier",
    "mp_limit_check",
    "multiplier_identity_residual",
    "multipliers",
    "nonexistence_probe",
    "norms",
    "pohozaev",
    "project_minus",
    "project_plus",
    "pure_scalar_field",
    "pure_scalar_level",
    "radial_laplacian",
    "scalar_geometry",
    "sign_diagnostic",
    "sobolev_constant",
    "solve_local_min",
    "solve_mountain_pass",
    "solve_scalar_branch",
    "solve_scalar_profile",
    "suggest_grid",
    "sweep",
    "threshold_rescale",
    "threshold_sequence_energy",
]

__version__ = "0.1.0"
