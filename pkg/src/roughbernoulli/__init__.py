"""Exterior Bernoulli free-boundary problem on rough discs and its wall law."""

__version__ = "0.1.0"

from .bernoulli import (  # noqa: E402
    BernoulliParams,
    EffectiveComparison,
    FreeBoundaryState,
    compare_to_effective,
    mesh_for_spacing,
    residual,
    solve_free_boundary,
)
from .cell import (  # noqa: E402
    CellSolution,
    WallLawConstant,
    compute_b0,
    decay_check,
    fourier_trace,
    mode_slopes,
    solve_cell,
    trace_mean,
)
from .elliptic import AnnularMesh, GridField, boundary_gradient, build_mesh, solve_dirichlet  # noqa: E402
from .geometry import (  # noqa: E402
    AnnulusBounds,
    RoughnessProfile,
    StarCurve,
    eval_profile,
    inner_boundary,
    metric_d1,
    metric_d2,
    metric_hausdorff,
)
from .radial import RadialSolution, eval_u, solve_radius  # noqa: E402

__all__ = [
    "BernoulliParams",
    "EffectiveComparison",
    "FreeBoundaryState",
    "compare_to_effective",
    "mesh_for_spacing",
    "residual",
    "solve_free_boundary",
    "CellSolution",
    "WallLawConstant",
    "compute_b0",
    "decay_check",
    "fourier_trace",
    "mode_slopes",
    "solve_cell",
    "trace_mean",
    "AnnularMesh",
    "GridField",
    "boundary_gradient",
    "build_mesh",
    "solve_dirichlet",
    "AnnulusBounds",
    "RoughnessProfile",
    "StarCurve",
    "eval_profile",
    "inner_boundary",
    "metric_d1",
    "metric_d2",
    "metric_hausdorff",
    "RadialSolution",
    "eval_u",
    "solve_radius",
]
