import math

import numpy as np
import pytest
from scipy import integrate

from spheresym.errors import DomainError, PreconditionError, UnsupportedProblemError
from spheresym.geometry.stereographic import PlaneFunction
from spheresym.pde.dirac_plane import (
    DiracProblem,
    annulus_mask,
    check_radial_parameters,
    check_weighted_lq_parameters,
    charge_scale,
    default_plane_grid,
    dipole_problem,
    dirichlet_divergence_demo,
    exact_plane_solution,
    fundamental_solution,
    mollification_deviation,
    mollifier,
    plane_sup_error,
    radial_profile_error,
    scaling_law_error,
    singularity_gap,
    singularity_gap_profile,
    solve_dirac_plane,
    solve_radial,
    surface_area_unit_sphere,
    superposition,
    transported_sphere_problem,
    weighted_lq_check,
)

# ----------------------------
# Fundamental solutions
# ----------------------------

@pytest.mark.parametrize("n, area", [(2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi ** 2)])
def test_unit_sphere_area(n, area):
    assert surface_area_unit_sphere(n) == pytest.approx(area, rel=1e-14)


def test_plane_constant():
    phi = fundamental_solution(2.0, 2)
    assert phi.branch == "log"
    assert phi.constant == pytest.approx(1.0 / (2 * math.pi), abs=1e-14)


def test_newtonian_constant():
    phi = fundamental_solution(2.0, 3)
    assert phi.branch == "power"
    assert phi.exponent == -1.0
    assert phi.constant == pytest.approx(1.0 / (4 * math.pi), abs=1e-14)
    assert phi(2.0) == pytest.approx(1.0 / (8 * math.pi))


def test_conformal_case_constant():
    phi = fundamental_solution(3.0, 3)
    assert phi.branch == "log"
    assert phi.constant == pytest.approx((4 * math.pi) ** -0.5)


def test_supercritical_branch_vanishes_at_one():
    phi = fundamental_solution(3.0, 2)
    assert phi(1.0) == 0.0
    assert phi(4.0) < 0.0


@pytest.mark.parametrize("p, n", [(2, 2), (2, 3), (1.5, 2), (3, 2), (3, 3)])
def test_unit_flux(p, n):
    assert fundamental_solution(p, n).flux_identity_error() <= 1e-12


@pytest.mark.parametrize("p, n", [(1.0, 2), (0.5, 3), (2.0, 1)])
def test_fundamental_domain(p, n):
    with pytest.raises(DomainError):
        fundamental_solution(p, n)


def test_charge_scale():
    assert charge_scale(8.0, 4.0) == pytest.approx(2.0)
    assert charge_scale(-8.0, 4.0) == pytest.approx(-2.0)
    assert charge_scale(0.0, 3.0) == 0.0
    assert charge_scale(-2.5, 2.0) == -2.5

# ----------------------------
# Mollifier and radial solves
# ----------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_mollifier_has_unit_mass(n):
    bump = mollifier(0.2, n)
    mass, _ = integrate.quad(lambda r: float(bump.density(r)) * r ** (n - 1), 0.0, 0.2)
    assert surface_area_unit_sphere(n) * mass == pytest.approx(1.0, rel=1e-10)
    assert bump.enclosed_mass(0.2) == pytest.approx(1.0, rel=1e-12)
    assert bump.enclosed_mass(5.0) == pytest.approx(1.0, rel=1e-12)


def test_mollifier_radius_positive():
    with pytest.raises(DomainError):
        mollifier(0.0)


@pytest.mark.parametrize("p, n, bc", [(2.0, 2, "dirichlet"), (2.0, 3, "decay"), (3.0, 2, "dirichlet")])
def test_radial_oracles(p, n, bc):
    solution = solve_radial(p, n, 1.0, 0.1, 10.0, bc)
    assert radial_profile_error(solution, 1.0, 10.0, bc, 0.1) <= 1e-8
    assert solution.flux_identity_error() <= 1e-10


def test_radial_dirichlet_log_profile():
    solution = solve_radial(2.0, 2, 1.0, 0.1, 10.0, "dirichlet")
    r = np.array([0.5, 1.0, 5.0])
    np.testing.assert_allclose(solution(r), np.log(10.0 / r) / (2 * math.pi), atol=1e-6)
    assert solution.u[-1] == 0.0


def test_radial_newtonian_tail():
    solution = solve_radial(2.0, 3, 1.0, 0.1, 10.0, "decay")
    outside = solution.r >= 0.1
    np.testing.assert_allclose(solution.u[outside], 1.0 / (4 * math.pi * solution.r[outside]), atol=1e-8)


def test_decay_unsupported_for_conformal_charge():
    with pytest.raises(UnsupportedProblemError):
        solve_radial(2.0, 2, 1.0, 0.1, 10.0, "decay")
    with pytest.raises(UnsupportedProblemError):
        solve_radial(3.0, 2, 1.0, 0.1, 10.0, "decay")


@pytest.mark.parametrize("eps, R, bc", [(0.0, 10.0, "dirichlet"), (10.0, 10.0, "dirichlet"), (0.1, 10.0, "neumann")])
def test_radial_domain(eps, R, bc):
    with pytest.raises(DomainError):
        solve_radial(2.0, 2, 1.0, eps, R, bc)


def test_scaling_law():
    assert scaling_law_error(3.0, 2, -2.5, 0.1, 10.0) <= 1e-8
    assert scaling_law_error(1.5, 3, 4.0, 0.1, 10.0, "decay") <= 1e-8


def test_mollification_deviation_shrinks():
    deviation = mollification_deviation(2.0, 2, [0.2, 0.1, 0.05])
    assert np.all(deviation > 0)
    assert np.all(np.diff(deviation) < 0)


def test_mollification_deviation_needs_small_eps():
    with pytest.raises(DomainError):
        mollification_deviation(2.0, 2, [0.5, 2.0], r0=1.0)

# ----------------------------
# Dirichlet divergence
# ----------------------------

def test_divergence_center_values():
    centers = dirichlet_divergence_demo([math.e, math.e ** 2])
    np.testing.assert_allclose(centers, [0.75, 1.25], atol=1e-8)
    assert centers[1] - centers[0] == pytest.approx(0.5, abs=1e-8)


@pytest.mark.parametrize("radii", [[1.0, 2.0], [0.5], [3.0, 2.0]])
def test_divergence_domain(radii):
    with pytest.raises(DomainError):
        dirichlet_divergence_demo(radii)

# ----------------------------
# Plane problems
# ----------------------------

def test_problem_validation():
    with pytest.raises(ValueError):
        DiracProblem(points=[[0.0, 0.0]], charges=[1.0, -1.0])
    with pytest.raises(ValueError):
        DiracProblem(points=[[0.0, 0.0], [0.0, 0.0]], charges=[1.0, -1.0])
    with pytest.raises(ValueError):
        DiracProblem(points=[[0.0, 0.0, 0.0]], charges=[1.0])
    with pytest.raises(ValueError):
        DiracProblem(points=[[0.0, 0.0], [1.0, 0.0]], charges=[1.0, 1.0], p=3.0)


def test_separation_precondition():
    with pytest.raises(ValueError, match="pole separation"):
        dipole_problem(eps=1.2)
    assert dipole_problem(eps=0.9).mollifier_radius == 0.9


@pytest.mark.parametrize(
    "p, n, gamma, eps, R, bc",
    [(1.0, 2, 1.0, 0.1, 10.0, "dirichlet"), (2.0, 2, 1.0, 10.0, 10.0, "dirichlet"), (2.0, 2, 1.0, 0.1, 10.0, "decay")],
)
def test_radial_parameters_rejected(p, n, gamma, eps, R, bc):
    with pytest.raises((DomainError, UnsupportedProblemError)):
        check_radial_parameters(p, n, gamma, eps, R, bc)


def test_weighted_parameters_rejected():
    check_weighted_lq_parameters(2.0, 3, 2.0, 0.1, (4.0, 8.0))
    with pytest.raises(DomainError, match="diverges"):
        check_weighted_lq_parameters(1.5, 3, 2.0, 0.1, (4.0, 8.0))
    with pytest.raises(DomainError):
        check_weighted_lq_parameters(2.0, 3, 2.0, 5.0, (4.0, 8.0))


def test_plane_pipeline_scope():
    with pytest.raises(UnsupportedProblemError):
        solve_dirac_plane(DiracProblem(points=[[0.0, 0.0]], charges=[1.0]))
    with pytest.raises(UnsupportedProblemError):
        solve_dirac_plane(DiracProblem(points=[[0.0, 0.0], [1.0, 0.0]], charges=[1.0, -1.0], p=3.0))


def test_zero_charges_give_zero(mesh3):
    problem = DiracProblem(points=[[-1.0, 0.0], [1.0, 0.0]], charges=[0.0, 0.0])
    u = solve_dirac_plane(problem, mesh=mesh3)
    assert not np.any(u.values)


def test_transported_problem_carries_the_charges(mesh5):
    problem = dipole_problem()
    sphere_problem = transported_sphere_problem(problem, mesh5)
    f = sphere_problem.f
    assert f.integral() == pytest.approx(0.0, abs=1e-12)
    assert f.positive_part().integral() == pytest.approx(1.0, rel=1e-12)


def test_gap_of_exact_solution():
    problem = dipole_problem()
    exact = exact_plane_solution(problem)
    pts = exact.points[annulus_mask(problem, exact.points)]
    assert singularity_gap(exact, problem, pts) <= 1e-10
    shifted = PlaneFunction(exact.xs, exact.ys, exact.values + 0.3)
    assert singularity_gap(shifted, problem, pts) == pytest.approx(0.3, abs=1e-10)


def test_gap_rejects_points_on_poles():
    problem = dipole_problem()
    with pytest.raises(PreconditionError):
        singularity_gap(exact_plane_solution(problem), problem, np.array([[-1.0, 0.05]]))


def test_superposition_is_antisymmetric():
    problem = dipole_problem()
    x = np.array([[0.3, 0.7], [2.0, -1.5]])
    mirrored = x * np.array([-1.0, 1.0])
    np.testing.assert_allclose(superposition(problem, x), -superposition(problem, mirrored), atol=1e-14)
    np.testing.assert_allclose(superposition(problem, [[0.0, 2.0]]), 0.0, atol=1e-14)


@pytest.fixture(scope="module")
def dipole_solution(mesh6):
    problem = dipole_problem()
    return problem, solve_dirac_plane(problem, mesh=mesh6)


def test_dipole_matches_log_dipole(dipole_solution):
    problem, u = dipole_solution
    assert plane_sup_error(u, problem) <= 0.02


def test_dipole_gap_bounded_and_decreasing(dipole_solution):
    problem, u = dipole_solution
    profile = singularity_gap_profile(u, problem, shells=np.linspace(0.0, problem.domain_radius, 6))
    assert profile.bounded
    gaps = profile.gaps[profile.counts > 0]
    assert gaps[-1] <= gaps[0]


def test_dipole_is_translation_equivariant(dipole_solution, mesh6):
    problem, u = dipole_solution
    c = np.array([0.3, -0.2])
    shifted = dipole_problem(a1=problem.poles[0] + c, a2=problem.poles[1] + c)
    v = solve_dirac_plane(shifted, mesh=mesh6, xs=u.xs + c[0], ys=u.ys + c[1])
    keep = annulus_mask(problem, u.points)
    reference = u.values.ravel()[keep]
    gap = np.max(np.abs(v.values.ravel()[keep] - reference))
    assert gap <= 1e-2 * np.max(np.abs(reference))


def test_default_grid_is_square():
    xs, ys = default_plane_grid(dipole_problem(domain_radius=3.0), 11)
    np.testing.assert_array_equal(xs, ys)
    assert xs[0] == -3.0 and xs[-1] == 3.0

# ----------------------------
# Weighted L^q bound
# ----------------------------

def test_weighted_lq_default_case():
    report = weighted_lq_check()
    assert report.passed
    assert report.c_dom > 0
    assert np.all(report.lhs <= report.c_dom ** 2 * report.rhs * (1 + 1e-9))


def test_weighted_lq_zero_charge():
    report = weighted_lq_check(gamma=0.0)
    np.testing.assert_array_equal(report.lhs, 0.0)
    assert report.passed


@pytest.mark.parametrize("p, n, q", [(2.0, 2, 2.0), (3.0, 3, 3.0), (2.0, 3, 1.0), (2.0, 3, 3.0)])
def test_weighted_lq_domain(p, n, q):
    with pytest.raises(DomainError):
        weighted_lq_check(p=p, n=n, q=q)
