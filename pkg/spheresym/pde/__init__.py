from .dirac_plane import (
    DiracProblem,
    FundamentalSolution,
    RadialSolution,
    dirichlet_divergence_demo,
    fundamental_solution,
    singularity_gap,
    solve_dirac_plane,
    solve_radial,
    weighted_lq_check,
)
from .pde_sphere import (
    DecayReport,
    SolverConfig,
    SphereProblem,
    decay_estimate,
    lq_norm_via_rearrangement,
    median_normalize,
    solve_sphere,
)

__all__ = [
    "DiracProblem",
    "FundamentalSolution",
    "RadialSolution",
    "dirichlet_divergence_demo",
    "fundamental_solution",
    "singularity_gap",
    "solve_dirac_plane",
    "solve_radial",
    "weighted_lq_check",
    "DecayReport",
    "SolverConfig",
    "SphereProblem",
    "decay_estimate",
    "lq_norm_via_rearrangement",
    "median_normalize",
    "solve_sphere",
]
