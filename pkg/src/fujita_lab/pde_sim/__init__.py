"""Radial semilinear heat solver."""

from .model import (
    Exterior,
    InitialData,
    ProblemSpec,
    Snapshot,
    SolveOutcome,
    SolverConfig,
    SolverError,
    Verdict,
    WholeSpace,
)
from .solver import (
    BoundaryWarning,
    build_grid,
    coefficient_residual,
    solve_radial,
    solve_v_equation,
    transform_to_v,
    v_problem,
)

__all__ = [
    "BoundaryWarning",
    "Exterior",
    "InitialData",
    "ProblemSpec",
    "Snapshot",
    "SolveOutcome",
    "SolverConfig",
    "SolverError",
    "Verdict",
    "WholeSpace",
    "build_grid",
    "coefficient_residual",
    "solve_radial",
    "solve_v_equation",
    "transform_to_v",
    "v_problem",
]

from .probe import (  # noqa: E402
    ComparisonFit,
    KernelProbe,
    fit_comparison_constants,
    fit_shape,
    probe_config,
    shape_samples,
    solve_exterior_kernel_probe,
)

__all__ += [
    "ComparisonFit",
    "KernelProbe",
    "fit_comparison_constants",
    "fit_shape",
    "probe_config",
    "shape_samples",
    "solve_exterior_kernel_probe",
]
