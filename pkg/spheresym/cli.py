"""
Spheresym Command-Line Interface (CLI)

This script runs the symmetrization and p-Laplace experiments as batch
subcommands. It ties together:
- Settings (validated run configuration)
- Geometry and analysis (meshes, rearrangement, variation, heat flow)
- PDE solvers (sphere problems, Dirac problems in the plane)
- The artifact layer (CSV/JSON outputs plus a run log)

Usage examples:
    python -m spheresym.cli mesh --subdivisions 0 --out out/mesh
    python -m spheresym.cli symmetrize --seed 7 --out out/sym
    python -m spheresym.cli solve-sphere --config sphere.json
    python -m spheresym.cli verify --seed 42 --subdivisions 4 --out out/verify

Exit status: 0 on success, 1 when a check fails, 2 for an invalid configuration.
"""

import argparse
import logging
import sys

import numpy as np
from pydantic import ValidationError

from .analysis import geometric_measure, rearrange
from .dao import artifacts
from .db.settings import REPORT_NAME, WEIGHTED_LQ_EXPONENT, WEIGHTED_LQ_RADII, RunConfig, load_config
from .errors import ConfigError, SpheresymError
from .geometry.sphere_mesh import (
    CellSet,
    SphereFunction,
    SphereMesh,
    build_icosphere,
    cap_colatitude,
    coordinate,
    polar_cap,
    random_set,
    smooth_random_function,
)
from .pde import dirac_plane, pde_sphere
from .verification import run_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


# -------------------------------------------------------------------
# Utility: test functions and sets named in a parameter block
# -------------------------------------------------------------------
def make_function(mesh: SphereMesh, params, rng: np.random.Generator) -> tuple[SphereFunction, "CellSet | None"]:
    """Build the function a symmetrize/variation/heat run works on (and its set, if any)."""
    if params.function == "coordinate":
        return coordinate(mesh, params.axis), None
    if params.function == "random-set":
        e = random_set(mesh, params.area, rng)
        return e.indicator(), e
    if params.function == "cap":
        e = polar_cap(mesh, float(cap_colatitude(params.area)))
        return e.indicator(), e
    return smooth_random_function(mesh, rng, params.degree), None


def solver_config(config: RunConfig) -> pde_sphere.SolverConfig:
    return pde_sphere.SolverConfig(tolerance=1e-8 * config.tolerance_scale, seed=config.seed)


# -------------------------------------------------------------------
# Core command handlers
# -------------------------------------------------------------------

def cmd_mesh(config: RunConfig) -> int:
    """Build the icosphere and write its vertex and edge tables."""
    mesh = build_icosphere(config.mesh_subdivisions)
    artifacts.export_mesh_csv("mesh", mesh, config.output_dir)
    print(f"Mesh: {mesh.n_vertices} vertices, {mesh.edges.shape[0]} edges, area {mesh.total_area:.12f}")
    return EXIT_OK


def cmd_symmetrize(config: RunConfig) -> int:
    """Distribution function, decreasing rearrangement and polar-cap symmetrization."""
    params = config.command_params()
    rng = np.random.default_rng(config.seed)
    mesh = build_icosphere(config.mesh_subdivisions)
    u, _ = make_function(mesh, params, rng)
    mu = rearrange.distribution_function(u)
    profile = rearrange.decreasing_rearrangement(u)
    u_star = rearrange.symmetrize(u)

    out = config.output_dir
    artifacts.export_distribution_csv("symmetrize", mu, out)
    artifacts.export_profile_csv("symmetrize", profile, out, samples=params.profile_samples)
    artifacts.export_sphere_function_csv("symmetrize", u_star, out, name="symmetrized.csv", column="u_star")
    summary = {
        "integral": u.integral(),
        "integral_symmetrized": u_star.integral(),
        "sup": float(np.max(u.values)),
        "sup_symmetrized": float(np.max(u_star.values)),
        "distribution_distance": rearrange.distribution_distance(u, u_star),
        "max_cell_area": mesh.max_cell_area,
        "layer_cake_gap": float(np.max(np.abs(rearrange.layer_cake_symmetrize(u).values - u_star.values))),
        "inputs_digest": artifacts.inputs_digest(u.values),
    }
    artifacts.write_json("symmetrize", out, "symmetrize_summary.json", summary)
    print(f"Symmetrized {mesh.n_vertices} values; distribution distance {summary['distribution_distance']:.3e}")
    return EXIT_OK


def cmd_variation(config: RunConfig) -> int:
    """Total variation, coarea, semicontinuity sweep and (for sets) isoperimetry."""
    params = config.command_params()
    rng = np.random.default_rng(config.seed)
    mesh = build_icosphere(config.mesh_subdivisions)
    u, e = make_function(mesh, params, rng)
    report = geometric_measure.variation_report(u)
    levels, perimeters = geometric_measure.level_set_perimeters(u)
    sweep = geometric_measure.semicontinuity_sweep(u, params.quantization_levels)

    out = config.output_dir
    artifacts.export_series_csv("variation", out, "level_perimeters.csv", {"t": levels, "perimeter": perimeters})
    artifacts.export_series_csv(
        "variation", out, "semicontinuity.csv", {"levels": np.asarray(params.quantization_levels, dtype=float), "tv_graph": sweep}
    )
    summary = {
        "tv_graph": report.tv_graph,
        "tv_pl": report.tv_pl,
        "coarea_integral": report.coarea_integral,
        "symmetrized_variation": geometric_measure.symmetrized_variation(u),
        "inputs_digest": artifacts.inputs_digest(u.values),
    }
    if e is not None:
        summary["area"] = e.area
        summary["perimeter"] = geometric_measure.perimeter(e)
        summary["isoperimetric_lower_bound"] = geometric_measure.isoperimetric_lower_bound(e.area)
        summary["isoperimetric_deficit"] = geometric_measure.isoperimetric_deficit(e)
    artifacts.write_json("variation", out, "variation_report.json", summary)
    print(f"V(u): graph {report.tv_graph:.6f}, PL {report.tv_pl:.6f}, coarea {report.coarea_integral:.6f}")
    return EXIT_OK


def cmd_heat(config: RunConfig) -> int:
    """Implicit heat flow with the total variation recorded at every step."""
    params = config.command_params()
    rng = np.random.default_rng(config.seed)
    mesh = build_icosphere(config.mesh_subdivisions)
    u, _ = make_function(mesh, params, rng)
    trace = geometric_measure.heat_flow_trace(u, params.step, params.nsteps, params.c)

    out = config.output_dir
    artifacts.export_series_csv("heat", out, "heat_trace.csv", {"time": trace.times, "tv": trace.tv, "damped": trace.damped()})
    monotone = trace.is_monotone(1e-9 * config.tolerance_scale)
    artifacts.write_json(
        "heat",
        out,
        "heat_summary.json",
        {"monotone": monotone, "c": trace.c, "small_time_gap": trace.small_time_gap(trace.tv[0]), "steps": params.nsteps},
    )
    print(f"Heat flow: TV {trace.tv[0]:.6f} -> {trace.tv[-1]:.6f} ({'monotone' if monotone else 'NOT monotone'})")
    return EXIT_OK if monotone else EXIT_CHECK_FAILED


def cmd_solve_sphere(config: RunConfig) -> int:
    """Solve a preset sphere problem and run the decay analysis on it."""
    params = config.command_params()
    mesh = build_icosphere(config.mesh_subdivisions)
    exact = None
    if params.preset == "harmonic":
        problem, exact = pde_sphere.harmonic_problem(mesh, params.degree)
    elif params.preset == "bump-pair":
        problem = pde_sphere.bump_pair_problem(mesh, params.axis, params.radius, params.mass)
    else:
        plane = dirac_plane.DiracProblem(
            points=params.points, charges=params.charges, mollifier_radius=params.mollifier_radius
        )
        problem = dirac_plane.transported_sphere_problem(plane, mesh)
    problem = pde_sphere.SphereProblem(problem.f, p=params.p, normalization=params.normalization)

    u = pde_sphere.apply_normalization(problem, pde_sphere.solve_sphere(problem, solver_config(config)))
    out = config.output_dir
    artifacts.export_sphere_function_csv("solve-sphere", u, out)
    summary = {"preset": params.preset, "p": params.p, "residual": pde_sphere.weak_residual(u, problem.f, problem.p)}
    status = EXIT_OK
    if exact is not None:
        diff = mesh.integrate((u.values - u.integral() / mesh.total_area - exact.values) ** 2)
        summary["l2_relative_error"] = float(np.sqrt(diff / mesh.integrate(exact.values ** 2)))
    if params.p == 2.0:
        report = pde_sphere.decay_estimate(pde_sphere.median_normalize(u), problem.f, params.qs)
        artifacts.export_series_csv("solve-sphere", out, "decay.csv", {"t": report.t_grid, "mu": report.mu, "neg_mu_prime": report.neg_mu_prime})
        artifacts.write_json("solve-sphere", out, "decay_report.json", report.to_dict())
        summary["decay_pass"] = report.passed
        status = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    artifacts.write_json("solve-sphere", out, "solve_summary.json", summary)
    print(f"Solved {params.preset} problem (p={params.p:g}) on {mesh.n_vertices} vertices")
    return status


def cmd_dirac(config: RunConfig) -> int:
    """Plane Dirac problem through the sphere, plus one radial single-charge profile."""
    params = config.command_params()
    problem = dirac_plane.DiracProblem(
        points=params.points,
        charges=params.charges,
        mollifier_radius=params.mollifier_radius,
        domain_radius=params.domain_radius,
    )
    out = config.output_dir
    radial = dirac_plane.solve_radial(
        params.radial_p, params.radial_n, params.radial_gamma, params.mollifier_radius, params.radial_R, params.radial_bc
    )
    artifacts.export_radial_csv("dirac", radial, out)

    mesh = build_icosphere(params.plane_subdivisions)
    xs, ys = dirac_plane.default_plane_grid(problem, params.grid_size)
    u = dirac_plane.solve_dirac_plane(problem, solver_config(config), mesh, xs, ys)
    pts = u.points
    keep = dirac_plane.annulus_mask(problem, pts)
    gap = np.full(pts.shape[0], np.nan)
    gap[keep] = np.abs(u.values.ravel()[keep] - dirac_plane.superposition(problem, pts[keep]))
    artifacts.export_plane_grid_csv("dirac", u, out, gap)

    phi = dirac_plane.fundamental_solution(params.radial_p, params.radial_n)
    profile = dirac_plane.singularity_gap_profile(u, problem)
    summary = {
        "fundamental": {"p": phi.p, "n": phi.n, "C": phi.constant, "branch": phi.branch},
        "radial_flux_error": radial.flux_identity_error(),
        "gap_sup": float(np.nanmax(gap)) if np.any(keep) else 0.0,
        "gap_profile": {"shells": profile.shells, "gaps": profile.gaps, "counts": profile.counts},
        "sup_error_relative": dirac_plane.plane_sup_error(u, problem),
    }
    if params.radial_p < params.radial_n:
        weighted = dirac_plane.weighted_lq_check(
            params.radial_p,
            params.radial_n,
            q=WEIGHTED_LQ_EXPONENT,
            gamma=params.radial_gamma,
            eps=params.mollifier_radius,
            radii=WEIGHTED_LQ_RADII,
        )
        summary["weighted_lq"] = weighted.to_dict()
        summary["C_dom"] = weighted.c_dom
    artifacts.write_json("dirac", out, "dirac_summary.json", summary)
    print(f"Dirac problem: {len(problem.points)} poles, gap sup {summary['gap_sup']:.4e}")
    return EXIT_OK


# -------------------------------------------------------------------
# Verification suite
# -------------------------------------------------------------------
def cmd_verify(config: RunConfig) -> int:
    """Run every property check and write the consolidated report."""
    params = config.command_params()
    report = run_checks(
        subdivisions=config.mesh_subdivisions,
        seed=config.seed,
        samples=params.samples,
        plane_subdivisions=params.plane_subdivisions,
        tolerance_scale=config.tolerance_scale,
    )
    out = config.output_dir
    for check in report.checks:
        artifacts.write_json("verify", out, f"checks/{check.check_id}.json", check.to_dict())
    artifacts.write_json("verify", out, REPORT_NAME, report.to_dict())
    summary = report.summary
    print(f"{summary['passed']}/{summary['total']} checks passed")
    for check in report.checks:
        if not check.passed:
            print(f"  FAIL {check.check_id}: {check.value_left:.6g} > {check.value_right:.6g} + {check.tolerance:.3g}")
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


HANDLERS = {
    "mesh": cmd_mesh,
    "symmetrize": cmd_symmetrize,
    "variation": cmd_variation,
    "heat": cmd_heat,
    "solve-sphere": cmd_solve_sphere,
    "dirac": cmd_dirac,
    "verify": cmd_verify,
}


# -------------------------------------------------------------------
# CLI parser setup
# -------------------------------------------------------------------
def build_parser():
    """Build the argparse command-line parser with subcommands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file matching the run configuration schema")
    common.add_argument("--seed", type=int)
    common.add_argument("--subdivisions", type=int, dest="mesh_subdivisions")
    common.add_argument("--out", dest="output_dir")
    common.add_argument("--tolerance-scale", type=float, dest="tolerance_scale")
    common.add_argument("--verbose", "-v", action="store_true")

    p = argparse.ArgumentParser(prog="python -m spheresym.cli", description="Sphere symmetrization experiments")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("mesh", parents=[common], help="Build the icosphere and export it")
    sub.add_parser("symmetrize", parents=[common], help="Rearrange and symmetrize a function")
    sub.add_parser("variation", parents=[common], help="Total variation and coarea")
    sub.add_parser("heat", parents=[common], help="Heat-flow variation trace")
    sub.add_parser("solve-sphere", parents=[common], help="Solve a sphere problem and analyse its decay")
    sub.add_parser("dirac", parents=[common], help="Dirac problems in the plane")
    sub.add_parser("verify", parents=[common], help="Run the full property suite")
    return p


# -------------------------------------------------------------------
# Entry point
# -------------------------------------------------------------------
def main(argv=None) -> int:
    """CLI entry point when invoked via `python -m spheresym.cli`."""
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(
            args.config,
            command=args.command,
            seed=args.seed,
            mesh_subdivisions=args.mesh_subdivisions,
            output_dir=args.output_dir,
            tolerance_scale=args.tolerance_scale,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return HANDLERS[config.command](config)
    except ValidationError as exc:
        print(f"error: invalid problem: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpheresymError as exc:
        logger.error("%s failed: %s", config.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
