"""Consolidated property checks across all modules.

Each check compares a measured left value against a right value with a
tolerance (``passed = left <= right + tolerance``); error-type checks put
the error on the left and 0 on the right. ``anchor`` names the statement a
check realizes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .analysis.geometric_measure import (
    coarea_integral,
    heat_flow_trace,
    isoperimetric_lower_bound,
    perimeter,
    semicontinuity_sweep,
    symmetrized_variation,
    total_variation_graph,
    total_variation_pl,
)
from .analysis.rearrange import distribution_distance, rearranged_product_integral, symmetrize
from .dao.artifacts import inputs_digest
from .geometry.sphere_mesh import (
    SPHERE_AREA,
    SphereFunction,
    SphereMesh,
    build_icosphere,
    cap_area,
    cap_colatitude,
    cap_perimeter,
    random_set,
    smooth_random_function,
)
from .geometry.stereographic import conformal_transport, stereographic_forward, stereographic_inverse
from .pde.dirac_plane import (
    dipole_problem,
    dirichlet_divergence_demo,
    fundamental_solution,
    mollification_deviation,
    plane_sup_error,
    radial_profile_error,
    scaling_law_error,
    singularity_gap_profile,
    solve_dirac_plane,
    solve_radial,
    weighted_lq_check,
)
from .pde.pde_sphere import (
    bump_pair_problem,
    decay_estimate,
    harmonic_problem,
    lq_constant_spread,
    lq_norm_via_rearrangement,
    median_normalize,
    solve_sphere,
)

logger = logging.getLogger(__name__)

HEAT_SAMPLES = 20
# smooth functions and random sets re-drawn on the refined mesh
REFINED_SAMPLES = 10
MAX_REFINED_SUBDIVISIONS = 8


@dataclass(frozen=True)
class Check:
    check_id: str
    anchor: str
    value_left: float
    value_right: float
    tolerance: float
    passed: bool
    inputs_digest: str = ""

    def to_dict(self) -> dict:
        out = asdict(self)
        out["check"] = out.pop("check_id")
        out["pass"] = out.pop("passed")
        return out


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def summary(self) -> dict[str, int]:
        passed = sum(1 for c in self.checks if c.passed)
        return {"total": len(self.checks), "passed": passed, "failed": len(self.checks) - passed}

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"checks": [c.to_dict() for c in self.checks], "summary": self.summary}


def _check(check_id: str, anchor: str, left: float, right: float, tolerance: float, digest: str = "") -> Check:
    left, right, tolerance = float(left), float(right), float(tolerance)
    passed = bool(np.isfinite(left) and left <= right + tolerance)
    level = logging.INFO if passed else logging.WARNING
    logger.log(level, "%-28s %s  left=%.6g right=%.6g tol=%.3g", check_id, "pass" if passed else "FAIL", left, right, tolerance)
    return Check(check_id, anchor, left, right, tolerance, passed, digest)


def _noisy_function(mesh: SphereMesh, rng: np.random.Generator) -> SphereFunction:
    base = smooth_random_function(mesh, rng)
    return base.with_values(base.values + 0.1 * rng.normal(size=mesh.n_vertices))


def _scale(*fns: SphereFunction) -> float:
    return 1.0 + max(float(np.max(np.abs(f.values))) for f in fns)


def _l2_relative(u: SphereFunction, exact: SphereFunction) -> float:
    mesh = u.mesh
    return math.sqrt(mesh.integrate((u.values - exact.values) ** 2) / mesh.integrate(exact.values ** 2))


# -----------------------------
# Check groups
# -----------------------------

def check_geometry(mesh: SphereMesh, plane_mesh: SphereMesh, rng: np.random.Generator, scale: float) -> list[Check]:
    area_error = abs(mesh.total_area - SPHERE_AREA) / SPHERE_AREA
    theta = np.linspace(0.0, math.pi, 1000)
    cap_error = float(np.max(np.abs(cap_colatitude(cap_area(theta)) - theta)))
    p = rng.normal(size=(1000, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    p = p[p[:, 2] < 0.99]
    projection_error = float(np.max(np.abs(stereographic_inverse(stereographic_forward(p)) - p)))

    gaussian = conformal_transport(plane_mesh, lambda x: np.exp(-np.sum(x * x, axis=-1)))
    disc = conformal_transport(plane_mesh, lambda x: (np.sum(x * x, axis=-1) < 1.0).astype(float))
    transport_anchor = "f = λ g∘π"
    return [
        _check("mesh_area_partition", "endowed with the Riemannian structure induced by the imbedding Sⁿ ⊂ ℝⁿ⁺¹", area_error, 0.0, 1e-9),
        _check("cap_round_trip", "geodesic balls about the North pole", cap_error, 0.0, 1e-12),
        _check("stereographic_round_trip", "stereographic projection Sⁿ →π ℝⁿ", projection_error, 0.0, 1e-12),
        _check("transport_mass_gaussian", transport_anchor + " (g = exp(-|x|^2))", abs(gaussian.integral() / math.pi - 1.0), 0.0, 0.01 * scale),
        _check("transport_mass_disc", transport_anchor + " (g = unit disc)", abs(disc.integral() / math.pi - 1.0), 0.0, 0.01 * scale),
    ]


def check_coarea(mesh: SphereMesh, rng: np.random.Generator, samples: int, scale: float) -> list[Check]:
    worst, excess, digest = 0.0, -math.inf, []
    total_weight = float(np.sum(mesh.edge_weight))
    for _ in range(samples):
        u = _noisy_function(mesh, rng)
        tv = total_variation_graph(u)
        worst = max(worst, abs(coarea_integral(u) - tv) / tv)
        sweep = semicontinuity_sweep(u)
        # quantizing to 1024 levels moves each value by at most half a step
        slack = total_weight * float(np.ptp(u.values)) / 1024.0
        excess = max(excess, tv - float(sweep[-1]) - slack)
        digest.append(u.values)
    return [
        _check("coarea_identity", "V(u) = ∫ P(u > t) dt", worst, 0.0, 1e-10 * scale, inputs_digest(*digest)),
        _check("lower_semicontinuity", "V(u) ≤ liminf V(u_m)", excess, 0.0, 1e-9 * scale),
    ]


def check_rearrangement_laws(mesh: SphereMesh, rng: np.random.Generator, samples: int, scale: float) -> list[Check]:
    translation = dilation = monotone = contraction = integral = coupling = 0.0
    spread = negation = 0.0
    for _ in range(samples):
        u, v = _noisy_function(mesh, rng), _noisy_function(mesh, rng)
        c, lam = float(rng.normal() * 3.0), float(rng.uniform(0.1, 5.0))
        su, sv = symmetrize(u), symmetrize(v)
        size = _scale(u, v) * (1.0 + abs(c) + lam)
        translation = max(translation, float(np.max(np.abs(symmetrize(u + c).values - (su.values + c)))) / size)
        dilation = max(dilation, float(np.max(np.abs(symmetrize(u * lam).values - lam * su.values))) / size)
        above = u.with_values(u.values + rng.uniform(0.0, 1.0, size=mesh.n_vertices))
        monotone = max(monotone, float(np.max(su.values - symmetrize(above).values)) / size)
        contraction = max(contraction, (mesh.integrate(np.abs(su.values - sv.values)) - mesh.integrate(np.abs(u.values - v.values))) / size)
        integral = max(integral, abs(su.integral() - u.integral()) / size)
        sw = symmetrize(u.with_values(np.maximum(u.values, v.values)))
        coupling = max(coupling, float(np.max(np.maximum(su.values, sv.values) - sw.values)) / _scale(u, v))
        spread = max(spread, distribution_distance(su, u))
        e = random_set(mesh, float(rng.uniform(0.5, SPHERE_AREA - 0.5)), rng)
        chi = e.indicator()
        negation = max(negation, distribution_distance(symmetrize(-chi), -symmetrize(chi)))
    tol = 1e-10 * scale
    cell = mesh.max_cell_area
    return [
        _check("rearrange_equimeasurable", "μ(t) = meas (u > t)", spread, cell, 1e-12),
        _check("rearrange_translation", "(u + C)* = u* + C", translation, 0.0, tol),
        _check("rearrange_scaling", "(λu)* = λu*", dilation, 0.0, tol),
        _check("rearrange_negated_indicator", "(−χ_E)* = −χ*_{E'}", negation, 2.0 * cell, 1e-12),
        _check("rearrange_monotone", "u ≤ v pointwise ⇒ u* ≤ v*", monotone, 0.0, tol),
        _check("rearrange_l1_contraction", "‖u* − v*‖_{L¹} ≤ ‖u − v‖_{L¹}", contraction, 0.0, tol),
        _check("rearrange_integral", "symmetrization preserves the integral", integral, 0.0, tol),
        _check("rearrange_sup_coupling", "as w* ≥ sup(u*,v*)", coupling, 0.0, tol),
    ]


def check_hardy_littlewood(mesh: SphereMesh, rng: np.random.Generator, samples: int, scale: float) -> list[Check]:
    worst = -math.inf
    for _ in range(samples):
        u, v = _noisy_function(mesh, rng), _noisy_function(mesh, rng)
        worst = max(worst, mesh.integrate(u.values * v.values) - rearranged_product_integral(u, v))
    return [_check("hardy_littlewood", "by the Hardy-Littlewood theorem", worst, 0.0, 1e-10 * scale)]


@dataclass(frozen=True)
class _SymmetrizationSample:
    variation_ratio: float
    perimeter_ratio: float
    isoperimetric_gap: float
    complement_gap: float


def _symmetrization_sample(mesh: SphereMesh, seed: int) -> _SymmetrizationSample:
    """One smooth function and one random set drawn from ``seed``; the same seed gives the same polynomial on every mesh."""
    local = np.random.default_rng(seed)
    u = smooth_random_function(mesh, local)
    e = random_set(mesh, float(local.uniform(0.5, SPHERE_AREA - 0.5)), local)
    p = perimeter(e)
    return _SymmetrizationSample(
        variation_ratio=symmetrized_variation(u) / total_variation_pl(u),
        perimeter_ratio=float(cap_perimeter(min(e.area, SPHERE_AREA))) / p,
        isoperimetric_gap=isoperimetric_lower_bound(e.area) - p,
        complement_gap=abs(p - perimeter(e.complement())),
    )


def _excess(ratios: list[float]) -> float:
    return max(0.0, max(ratios) - 1.0)


def check_polya_szego(
    mesh: SphereMesh,
    rng: np.random.Generator,
    samples: int,
    scale: float,
    refined: Optional[SphereMesh] = None,
) -> list[Check]:
    seeds = rng.integers(0, 2 ** 32, size=samples).tolist()
    coarse = [_symmetrization_sample(mesh, s) for s in seeds]
    out = [
        _check("symmetrization_variation", "V(u*) ≤ V(u)", max(c.variation_ratio for c in coarse), 1.0, 0.02 * scale),
        _check("symmetrization_perimeter", "P(E) ≥ P(E*)", max(c.perimeter_ratio for c in coarse), 1.0, 0.05 * scale),
        _check(
            "isoperimetric_inequality",
            "P(E) ≥ C min(|E|,|Sⁿ∖E|)^{1−1/n}",
            max(c.isoperimetric_gap for c in coarse),
            0.0,
            0.0,
        ),
        _check("perimeter_complement", "P(Sⁿ∖E) = P(E)", max(c.complement_gap for c in coarse), 0.0, 0.0),
    ]
    if refined is not None:
        count = min(samples, REFINED_SAMPLES)
        fine = [_symmetrization_sample(refined, s) for s in seeds[:count]]
        head = coarse[:count]
        out.append(
            _check(
                "symmetrization_variation_refined",
                f"V(u*) ≤ V(u) (margin at subdivisions {refined.subdivisions})",
                _excess([c.variation_ratio for c in fine]),
                _excess([c.variation_ratio for c in head]),
                1e-12,
            )
        )
        out.append(
            _check(
                "symmetrization_perimeter_refined",
                f"P(E) ≥ P(E*) (margin at subdivisions {refined.subdivisions})",
                _excess([c.perimeter_ratio for c in fine]),
                _excess([c.perimeter_ratio for c in head]),
                1e-12,
            )
        )
    return out


def check_heat_flow(mesh: SphereMesh, rng: np.random.Generator, samples: int, scale: float) -> list[Check]:
    growth, gap = -math.inf, 0.0
    for _ in range(min(samples, HEAT_SAMPLES)):
        u = smooth_random_function(mesh, rng)
        trace = heat_flow_trace(u, step=1e-3, nsteps=50)
        growth = max(growth, float(np.max(np.diff(trace.damped()))))
        gap = max(gap, trace.small_time_gap(total_variation_pl(u)))
    return [
        _check("heat_monotone", "e^{−ct}∫|du(t)| is non-increasing", growth, 0.0, 1e-9 * scale),
        _check("heat_small_time", "Its limit as t↓0 is equal to V(u)", gap, 0.0, 0.02 * scale),
    ]


def check_sphere_solver(mesh: SphereMesh, rng: np.random.Generator, samples: int, scale: float) -> list[Check]:
    out = []
    for degree, source in ((1, "f = 2z"), (2, "f = 6(z²−1/3)")):
        problem, exact = harmonic_problem(mesh, degree)
        u = solve_sphere(problem)
        out.append(
            _check(
                f"sphere_harmonic_l{degree}",
                f"−div(|Du|^{{n−2}} Du) = f in Sⁿ ({source})",
                _l2_relative(u, exact),
                0.0,
                0.01 * scale,
            )
        )

    problem = bump_pair_problem(mesh)
    u = median_normalize(solve_sphere(problem))
    report = decay_estimate(u, problem.f)
    ratio = float(np.max(report.mu / (report.mu[0] * np.exp(-0.95 * report.rate_bound * report.t_grid)))) if report.mu.size else 0.0
    out.append(_check("decay_exponential", "−μ′ ≥ Cμ", ratio, 1.0, 1e-12))
    out.append(_check("decay_log_tail", "ū⁺(s) = O(|ln s|)", report.log_fit[1], report.slope_bound, 0.0))

    doubled = bump_pair_problem(mesh, mass=2.0)
    report2 = decay_estimate(median_normalize(solve_sphere(doubled)), doubled.f)
    out.append(
        _check(
            "decay_rate_scaling",
            "−d/dt ∫_{u>t}|Du|ⁿ = ∫_{u>t} f ≤ ‖f‖_{L¹(Sⁿ)}",
            abs(report2.rate_bound * 2.0 / report.rate_bound - 1.0),
            0.0,
            0.05 * scale,
        )
    )
    out.append(_check("decay_scaled_exponential", "P(u>t) ≥ C μ^{1−1/n}(t)", 0.0 if report2.exponential_ok else 1.0, 0.0, 0.0))

    worst = 0.0
    for q in (2.0, 3.0, 4.0):
        direct = mesh.integrate(np.maximum(u.values, 0.0) ** q)
        worst = max(worst, abs(lq_norm_via_rearrangement(u, q) - direct) / direct)
    out.append(_check("lq_identity", "∫_{u>0} u^q = ∫ (ū⁺)^q", worst, 0.0, 1e-10 * scale))

    spread = lq_constant_spread(mesh, rng, trials=10)
    median = float(np.median(spread))
    out.append(
        _check(
            "lq_constant_stable",
            "one can bound ‖u‖_{L^q(Sⁿ)} in terms of ‖f‖_{L¹(Sⁿ)}",
            float(np.max(np.abs(spread / median - 1.0))),
            0.0,
            0.10 * scale,
        )
    )
    return out


def check_fundamental_solutions(scale: float) -> list[Check]:
    worst = max(fundamental_solution(p, n).flux_identity_error() for p, n in ((2, 2), (2, 3), (1.5, 2), (3, 2), (3, 3)))
    c22 = fundamental_solution(2.0, 2).constant
    c23 = fundamental_solution(2.0, 3).constant
    closed_form = "φ(x) = C|x|^{(p−n)/(p−1)} (resp. C ln(1/|x|) if p = n)"
    return [
        _check("fundamental_flux", "C is adjusted to make φ a solution of −div(|Dφ|^{p−2}Dφ) = δ", worst, 0.0, 1e-12 * scale),
        _check("fundamental_constant_2d", closed_form + " (p = n = 2)", abs(c22 - 1.0 / (2.0 * math.pi)), 0.0, 1e-14),
        _check("fundamental_constant_3d", closed_form + " (p = 2, n = 3)", abs(c23 - 1.0 / (4.0 * math.pi)), 0.0, 1e-14),
    ]


def check_radial(scale: float) -> list[Check]:
    anchors = {
        "dirichlet": "Au_k = f_k in |x| < k",
        "decay": "Au_k = f_k in ℝⁿ, u_k → 0 at infinity",
    }
    cases = [(2.0, 2, "dirichlet"), (2.0, 3, "decay"), (3.0, 2, "dirichlet")]
    out = []
    for p, n, bc in cases:
        solution = solve_radial(p, n, 1.0, 0.1, 10.0, bc)
        err = radial_profile_error(solution, 1.0, 10.0, bc, 0.1)
        out.append(_check(f"radial_p{p:g}_n{n}_{bc}", f"{anchors[bc]} (p = {p:g}, n = {n})", err, 0.0, 1e-8 * scale))
    out.append(_check("radial_scaling_law", "Au_k = f_k", scaling_law_error(3.0, 2, -2.5, 0.1, 10.0), 0.0, 1e-8 * scale))
    deviation = mollification_deviation(2.0, 2, [0.2, 0.1, 0.05])
    out.append(_check("mollification_consistency", "φ_k tends to φ in a suitable way", float(np.max(np.diff(deviation))), 0.0, 0.0))

    radii = np.exp([1.0, 2.0, 4.0])
    centers = dirichlet_divergence_demo(radii)
    err = float(np.max(np.abs(centers - (0.25 + 0.5 * np.log(radii)))))
    diffs = float(np.max(np.abs(np.diff(centers) - 0.5 * np.diff(np.log(radii)))))
    out.append(_check("dirichlet_divergence", "u_R tends to infinity pointwise", err, 0.0, 1e-8 * scale))
    out.append(_check("dirichlet_divergence_growth", "admits as solution C ln(1/|x|)", diffs, 0.0, 1e-8 * scale))

    weighted = weighted_lq_check()
    out.append(
        _check(
            "weighted_lq_inequality",
            "∫_{|x|≤k} e^{−|x|²}|u_k|^q ≤ C ∫_{ℝⁿ} e^{−|x|²} φ^q",
            float(np.max(weighted.lhs)),
            weighted.c_dom ** 2 * weighted.rhs,
            1e-9,
        )
    )
    out.append(_check("weighted_lq_uniform", "|u_k|* ≤ Cφ", 0.0 if weighted.contracting else 1.0, 0.0, 0.0))
    return out


def check_dipole(plane_mesh: SphereMesh, scale: float) -> list[Check]:
    problem = dipole_problem()
    u = solve_dirac_plane(problem, mesh=plane_mesh)
    profile = singularity_gap_profile(u, problem, shells=np.linspace(0.0, problem.domain_radius, 6))
    nonempty = profile.gaps[profile.counts > 0]
    return [
        _check("dipole_pipeline", "−div(|Du|^{p−2}Du) = Σ γ_i δ(x − a_i)", plane_sup_error(u, problem), 0.0, 0.02 * scale),
        _check("dipole_gap_outer", "u − Σ γ_i φ(x − a_i) ∈ L^∞(ℝⁿ)", float(nonempty[-1]), float(nonempty[0]), 0.0),
    ]


# -----------------------------
# Suite
# -----------------------------

def run_checks(
    subdivisions: int = 4,
    seed: int = 42,
    samples: int = 100,
    plane_subdivisions: int = 6,
    tolerance_scale: float = 1.0,
    mesh: Optional[SphereMesh] = None,
    plane_mesh: Optional[SphereMesh] = None,
) -> VerificationReport:
    """Run every check group on meshes built from the given levels.

    The symmetrization margins are compared against ``plane_mesh`` when it
    is finer than ``mesh``, and against the next subdivision level otherwise.
    """
    rng = np.random.default_rng(seed)
    mesh = mesh or build_icosphere(subdivisions)
    plane_mesh = plane_mesh or (mesh if plane_subdivisions == mesh.subdivisions else build_icosphere(plane_subdivisions))
    if plane_mesh.subdivisions > mesh.subdivisions:
        refined = plane_mesh
    else:
        refined = build_icosphere(min(mesh.subdivisions + 1, MAX_REFINED_SUBDIVISIONS))
    groups: list[Callable[[], list[Check]]] = [
        lambda: check_geometry(mesh, plane_mesh, rng, tolerance_scale),
        lambda: check_coarea(mesh, rng, samples, tolerance_scale),
        lambda: check_rearrangement_laws(mesh, rng, samples, tolerance_scale),
        lambda: check_hardy_littlewood(mesh, rng, samples, tolerance_scale),
        lambda: check_polya_szego(mesh, rng, samples, tolerance_scale, refined),
        lambda: check_heat_flow(mesh, rng, samples, tolerance_scale),
        lambda: check_sphere_solver(mesh, rng, samples, tolerance_scale),
        lambda: check_fundamental_solutions(tolerance_scale),
        lambda: check_radial(tolerance_scale),
        lambda: check_dipole(plane_mesh, tolerance_scale),
    ]
    report = VerificationReport()
    for group in groups:
        report.checks.extend(group())
    logger.info("verification: %(passed)d/%(total)d checks passed", report.summary)
    return report
