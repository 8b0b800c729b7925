"""p-Laplace equations in R^n with Dirac right-hand sides.

Everything here is radial or goes through the sphere:

- fundamental solutions and their unit-flux normalization;
- radial solves of mollified single-charge problems, by exact flux
  integration (``|u'|^{p-2} u' = -Q(r) / (n w_n r^{n-1})``);
- the multi-pole p = n = 2 problem, transported to S^2, solved there and
  pulled back;
- the gap ``u - sum gamma_i phi(x - a_i)`` and the weighted L^q bound for
  Dirichlet solutions on growing balls.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, special
from scipy.spatial.distance import pdist

from ..errors import DomainError, PreconditionError, UnsupportedProblemError
from ..geometry.sphere_mesh import SphereFunction, SphereMesh, build_icosphere
from ..geometry.stereographic import PlaneFunction, conformal_transport, pull_back
from .pde_sphere import SolverConfig, SphereProblem, solve_sphere

logger = logging.getLogger(__name__)

# Poles closer than this multiple of the mollifier radius are excluded from comparisons.
EXCLUSION_FACTOR = 3.0
RADIAL_GRID_SIZE = 400

Branch = Literal["power", "log"]
BoundaryCondition = Literal["decay", "dirichlet"]


def surface_area_unit_sphere(n: int) -> float:
    """``n w_n = 2 pi^(n/2) / Gamma(n/2)``, the area of the unit sphere in R^n."""
    if n < 1:
        raise DomainError(f"dimension must be positive, got {n!r}")
    return float(2.0 * math.pi ** (n / 2.0) / special.gamma(n / 2.0))


# -----------------------------
# Fundamental solutions
# -----------------------------

@dataclass(frozen=True)
class FundamentalSolution:
    """Radial ``phi`` with ``-div(|D phi|^{p-2} D phi) = delta``.

    ``log``:   ``phi = C ln(1/r)`` (p = n)
    ``power``: ``phi = C r^beta`` (p < n) or ``C (1 - r^beta)`` (p > n),
    with ``beta = (p - n) / (p - 1)``.
    """

    p: float
    n: int
    constant: float
    branch: Branch

    @property
    def exponent(self) -> float:
        return (self.p - self.n) / (self.p - 1.0)

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.branch == "log":
            return self.constant * np.log(1.0 / r)
        if self.p < self.n:
            return self.constant * r ** self.exponent
        return self.constant * (1.0 - r ** self.exponent)

    def derivative(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.branch == "log":
            return -self.constant / r
        beta = self.exponent
        sign = 1.0 if self.p < self.n else -1.0
        return sign * self.constant * beta * r ** (beta - 1.0)

    def flux(self, r: np.ndarray) -> np.ndarray:
        """``|phi'(r)|^{p-1} * |S^{n-1}| r^{n-1}``; identically 1."""
        r = np.asarray(r, dtype=float)
        return np.abs(self.derivative(r)) ** (self.p - 1.0) * surface_area_unit_sphere(self.n) * r ** (self.n - 1)

    def flux_identity_error(self, radii: Optional[np.ndarray] = None) -> float:
        radii = np.geomspace(1e-6, 1e6, 121) if radii is None else np.asarray(radii, dtype=float)
        return float(np.max(np.abs(self.flux(radii) - 1.0)))


def fundamental_solution(p: float, n: int) -> FundamentalSolution:
    """Branch and constant fixed by a unit flux through every sphere about the origin."""
    if p <= 1:
        raise DomainError(f"exponent p must exceed 1, got {p!r}")
    if n < 2:
        raise DomainError(f"dimension must be at least 2, got {n!r}")
    area = surface_area_unit_sphere(n)
    if p == n:
        return FundamentalSolution(p=p, n=n, constant=area ** (-1.0 / (n - 1.0)), branch="log")
    beta = (p - n) / (p - 1.0)
    return FundamentalSolution(p=p, n=n, constant=area ** (-1.0 / (p - 1.0)) / abs(beta), branch="power")


def charge_scale(gamma: float, p: float) -> float:
    """``sign(gamma) |gamma|^{1/(p-1)}``: a charge ``gamma`` scales solutions by this factor."""
    return math.copysign(abs(gamma) ** (1.0 / (p - 1.0)), gamma) if gamma else 0.0


# -----------------------------
# Mollifier
# -----------------------------

@dataclass(frozen=True)
class Mollifier:
    """Unit-mass radial bump ``c (1 - (r/eps)^2)^2`` supported in ``|x| < eps``."""

    eps: float
    n: int

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise DomainError(f"mollifier radius must be positive, got {self.eps!r}")

    @property
    def height(self) -> float:
        n = self.n
        shape_mass = 1.0 / n - 2.0 / (n + 2.0) + 1.0 / (n + 4.0)
        return 1.0 / (surface_area_unit_sphere(n) * self.eps ** n * shape_mass)

    def density(self, r: np.ndarray) -> np.ndarray:
        y = np.asarray(r, dtype=float) / self.eps
        return np.where(y < 1.0, self.height * (1.0 - y * y) ** 2, 0.0)

    def enclosed_mass(self, r: np.ndarray) -> np.ndarray:
        """Mass inside radius ``r`` (closed form; 1 for ``r >= eps``)."""
        n = self.n
        y = np.clip(np.asarray(r, dtype=float) / self.eps, 0.0, 1.0)
        shape = y ** n / n - 2.0 * y ** (n + 2) / (n + 2.0) + y ** (n + 4) / (n + 4.0)
        return surface_area_unit_sphere(n) * self.height * self.eps ** n * shape


def mollifier(eps: float, n: int = 2) -> Mollifier:
    return Mollifier(eps=eps, n=n)


# -----------------------------
# Radial solutions
# -----------------------------

@dataclass(frozen=True, eq=False)
class RadialSolution:
    """``u(r)`` of a single mollified charge on a log-spaced grid, with its flux data."""

    r: np.ndarray
    u: np.ndarray
    Q: np.ndarray
    slope: np.ndarray
    p: float
    n: int

    def __call__(self, r: np.ndarray) -> np.ndarray:
        """Interpolated in ``log r``; constant below the first grid point."""
        return np.interp(np.log(np.asarray(r, dtype=float)), np.log(self.r), self.u)

    def flux_identity_error(self) -> float:
        """Max of ``| |u'|^{p-2} u' + Q / (n w_n r^{n-1}) |`` over the grid."""
        lhs = np.sign(self.slope) * np.abs(self.slope) ** (self.p - 1.0)
        rhs = -self.Q / (surface_area_unit_sphere(self.n) * self.r ** (self.n - 1))
        return float(np.max(np.abs(lhs - rhs)))


def _radial_slope(Q: np.ndarray, r: np.ndarray, p: float, n: int) -> np.ndarray:
    """``u'(r) = -sign(Q) (|Q| / (n w_n r^{n-1}))^{1/(p-1)}``."""
    flux = np.asarray(Q, dtype=float) / (surface_area_unit_sphere(n) * np.asarray(r, dtype=float) ** (n - 1))
    return -np.sign(flux) * np.abs(flux) ** (1.0 / (p - 1.0))


def _integrate_inward(slope_fn: Callable[[float], float], grid: np.ndarray, boundary_value: float) -> np.ndarray:
    """``u(r_k) = boundary_value - int_{r_k}^{R} u'(s) ds`` interval by interval."""
    pieces = np.array(
        [integrate.quad(slope_fn, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0] for a, b in zip(grid[:-1], grid[1:])]
    )
    tail = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    return boundary_value - tail


def exact_radial_profile(p: float, n: int, gamma: float, R: float, bc: BoundaryCondition) -> Callable[[np.ndarray], np.ndarray]:
    """Closed-form solution outside the mollifier: scaled ``phi``, shifted to vanish at ``R`` for Dirichlet."""
    phi = fundamental_solution(p, n)
    scale = charge_scale(gamma, p)
    if bc == "dirichlet":
        return lambda r: scale * (phi(r) - phi(R))
    if p >= n and gamma != 0:
        raise UnsupportedProblemError("no decaying exact profile when p >= n with nonzero charge")
    return lambda r: scale * phi(r)


def check_radial_parameters(p: float, n: int, gamma: float, eps: float, R: float, bc: BoundaryCondition) -> None:
    """Raise unless ``solve_radial`` accepts these parameters."""
    if p <= 1:
        raise DomainError(f"exponent p must exceed 1, got {p!r}")
    if n < 2:
        raise DomainError(f"dimension must be at least 2, got {n!r}")
    if not 0 < eps < R:
        raise DomainError(f"need 0 < eps < R, got eps={eps!r}, R={R!r}")
    if bc not in ("decay", "dirichlet"):
        raise DomainError(f"unknown boundary condition {bc!r}")
    if bc == "decay" and p >= n and gamma != 0:
        raise UnsupportedProblemError(f"no decaying solution for p={p} >= n={n} with nonzero charge")


def check_weighted_lq_parameters(p: float, n: int, q: float, eps: float, radii: Sequence[float]) -> None:
    """Raise unless ``weighted_lq_check`` accepts these parameters."""
    if p <= 1:
        raise DomainError(f"exponent p must exceed 1, got {p!r}")
    if p >= n:
        raise DomainError(f"the weighted bound needs p < n, got p={p}, n={n}")
    if q <= p - 1.0:
        raise DomainError(f"q must exceed p - 1, got {q!r}")
    if q * (n - p) / (p - 1.0) >= n:
        raise DomainError(f"right side diverges for q={q}, p={p}, n={n}")
    if not radii or not 0 < eps < min(radii):
        raise DomainError(f"need 0 < eps below every radius, got eps={eps!r}")


def solve_radial(
    p: float,
    n: int,
    gamma: float,
    eps: float,
    R: float,
    bc: BoundaryCondition = "dirichlet",
    size: int = RADIAL_GRID_SIZE,
) -> RadialSolution:
    """Radial solution of ``-div(|Du|^{p-2} Du) = gamma * eta_eps``.

    ``dirichlet`` sets ``u(R) = 0``; ``decay`` sets ``u(R)`` to the exact
    far-field tail, so ``u -> 0`` at infinity.

    Raises
    ------
    UnsupportedProblemError
        For ``decay`` with ``p >= n`` and ``gamma != 0``: the far field does not vanish.
    """
    check_radial_parameters(p, n, gamma, eps, R, bc)

    bump = mollifier(eps, n)
    grid = np.union1d(np.geomspace(eps / 10.0, R, size), [eps])

    def slope_at(r: float) -> float:
        return float(_radial_slope(gamma * bump.enclosed_mass(r), r, p, n))

    if bc == "dirichlet":
        boundary_value = 0.0
    else:
        boundary_value = float(exact_radial_profile(p, n, gamma, R, "decay")(R))
    u = _integrate_inward(slope_at, grid, boundary_value)
    Q = gamma * bump.enclosed_mass(grid)
    logger.debug("solve_radial p=%g n=%d gamma=%g eps=%g R=%g bc=%s", p, n, gamma, eps, R, bc)
    return RadialSolution(r=grid, u=u, Q=Q, slope=_radial_slope(Q, grid, p, n), p=p, n=n)


def radial_profile_error(solution: RadialSolution, gamma: float, R: float, bc: BoundaryCondition, eps: float) -> float:
    """Max deviation from the closed form on grid points outside the mollifier."""
    exact = exact_radial_profile(solution.p, solution.n, gamma, R, bc)
    outside = solution.r >= eps
    return float(np.max(np.abs(solution.u[outside] - exact(solution.r[outside]))))


def dirichlet_divergence_demo(R_list: Sequence[float]) -> np.ndarray:
    """Center values ``u_R(0)`` for ``-Delta u = chi_{B(1)}`` in ``B(R)`` (plane), ``u = 0`` on ``|x| = R``.

    The exact value is ``1/4 + ln(R) / 2``: the Dirichlet solutions blow
    up pointwise as the ball grows.
    """
    radii = np.asarray(R_list, dtype=float)
    if np.any(radii <= 1.0):
        raise DomainError("every radius must exceed 1")
    if np.any(np.diff(radii) <= 0):
        raise DomainError("radii must be strictly increasing")

    def enclosed(r: float) -> float:
        return math.pi * min(r, 1.0) ** 2

    def slope_at(r: float) -> float:
        return float(_radial_slope(enclosed(r), r, 2.0, 2)) if r > 0 else 0.0

    out = []
    for R in radii:
        value, _ = integrate.quad(slope_at, 0.0, R, points=[1.0], epsabs=1e-14, epsrel=1e-13, limit=200)
        out.append(-value)
    return np.asarray(out)


def scaling_law_error(p: float, n: int, gamma: float, eps: float, R: float, bc: BoundaryCondition = "dirichlet") -> float:
    """``max |u_gamma - charge_scale(gamma) u_1|`` relative to ``max |u_gamma|``."""
    unit = solve_radial(p, n, 1.0, eps, R, bc)
    charged = solve_radial(p, n, gamma, eps, R, bc)
    scale = max(float(np.max(np.abs(charged.u))), np.finfo(float).tiny)
    return float(np.max(np.abs(charged.u - charge_scale(gamma, p) * unit.u)) / scale)


def mollification_deviation(
    p: float,
    n: int,
    eps_list: Sequence[float],
    r0: float = 1.0,
    gamma: float = 1.0,
    R: float = 10.0,
    bc: BoundaryCondition = "dirichlet",
) -> np.ndarray:
    """``int_{|x| < r0} |u_eps - u_exact| dx`` for each ``eps``.

    Outside the mollifier the two agree, so the deviation lives in the
    ball of radius ``eps`` and shrinks with it.
    """
    eps_arr = np.asarray(eps_list, dtype=float)
    if np.any(eps_arr >= r0):
        raise DomainError("every mollifier radius must be below r0")
    exact = exact_radial_profile(p, n, gamma, R, bc)
    area = surface_area_unit_sphere(n)
    out = []
    for eps in eps_arr:
        solution = solve_radial(p, n, gamma, float(eps), R, bc)

        def integrand(r: float) -> float:
            return abs(float(solution(r)) - float(exact(r))) * r ** (n - 1)

        inner, _ = integrate.quad(integrand, 0.0, float(eps), limit=200)
        outer, _ = integrate.quad(integrand, float(eps), r0, limit=200)
        out.append(area * (inner + outer))
    return np.asarray(out)


# -----------------------------
# Multi-pole plane problems
# -----------------------------

class DiracProblem(BaseModel):
    """``-div(|Du|^{p-2} Du) = sum_i gamma_i delta(x - a_i)`` in R^n.

    The mollified poles may not overlap: ``mollifier_radius`` stays below
    half the smallest pole distance.
    """

    model_config = ConfigDict(frozen=True)

    points: list[list[float]]
    charges: list[float]
    p: float = Field(default=2.0, gt=1)
    n: int = Field(default=2, ge=2)
    mollifier_radius: float = Field(default=0.1, gt=0)
    domain_radius: float = Field(default=5.0, gt=0)

    @model_validator(mode="after")
    def _check_structure(self) -> "DiracProblem":
        if len(self.points) != len(self.charges):
            raise ValueError("points and charges must have the same length")
        if any(len(a) != self.n for a in self.points):
            raise ValueError(f"every point must have {self.n} coordinates")
        if len(self.points) > 1 and np.min(pdist(np.asarray(self.points, dtype=float))) == 0:
            raise ValueError("points must be distinct")
        if self.p > self.n and abs(sum(self.charges)) > 1e-12:
            raise ValueError("charges must sum to zero when p > n")
        self.check_separation()
        return self

    @property
    def poles(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(-1, self.n)

    @property
    def total_charge(self) -> float:
        return float(sum(self.charges))

    def check_separation(self) -> None:
        """Raise ``PreconditionError`` unless ``eps`` is below half the smallest pole distance."""
        if len(self.points) < 2:
            return
        gap = float(np.min(pdist(self.poles)))
        if self.mollifier_radius >= 0.5 * gap:
            raise PreconditionError(
                f"mollifier radius {self.mollifier_radius} must be below half the pole separation {gap:.4g}"
            )


def dipole_problem(
    a1: Sequence[float] = (-1.0, 0.0),
    a2: Sequence[float] = (1.0, 0.0),
    eps: float = 0.1,
    domain_radius: float = 5.0,
) -> DiracProblem:
    """Charge +1 at ``a1`` and -1 at ``a2`` in the plane, p = n = 2."""
    return DiracProblem(
        points=[list(a1), list(a2)],
        charges=[1.0, -1.0],
        p=2.0,
        n=2,
        mollifier_radius=eps,
        domain_radius=domain_radius,
    )


def default_plane_grid(problem: DiracProblem, size: int = 101) -> tuple[np.ndarray, np.ndarray]:
    axis = np.linspace(-problem.domain_radius, problem.domain_radius, size)
    return axis, axis.copy()


def superposition(problem: DiracProblem, points: np.ndarray) -> np.ndarray:
    """``sum_i gamma_i phi(x - a_i)``."""
    phi = fundamental_solution(problem.p, problem.n)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros(pts.shape[0])
    for pole, gamma in zip(problem.poles, problem.charges):
        if gamma:
            out += gamma * phi(np.linalg.norm(pts - pole, axis=1))
    return out


def exact_plane_solution(problem: DiracProblem, xs: Optional[np.ndarray] = None, ys: Optional[np.ndarray] = None) -> PlaneFunction:
    """The superposition sampled on a grid (nodes on a pole get the value 0)."""
    if xs is None or ys is None:
        xs, ys = default_plane_grid(problem)
    shell = PlaneFunction(xs, ys, np.zeros((len(xs), len(ys))))
    pts = shell.points
    with np.errstate(divide="ignore", invalid="ignore"):
        values = superposition(problem, pts)
    values = np.where(np.isfinite(values), values, 0.0)
    return PlaneFunction(xs, ys, values.reshape(len(xs), len(ys)))


def solve_dirac_plane(
    problem: DiracProblem,
    config: Optional[SolverConfig] = None,
    mesh: Optional[SphereMesh] = None,
    xs: Optional[np.ndarray] = None,
    ys: Optional[np.ndarray] = None,
) -> PlaneFunction:
    """Solve the p = n = 2 multi-pole problem through the sphere.

    Each Dirac is mollified at radius ``eps``, transported to S^2, and
    rescaled so its discrete mass is exactly ``gamma_i``. The sphere
    solution ``w`` is pulled back and shifted so that ``w(north pole) = 0``,
    which is ``u -> 0`` at infinity.

    Raises
    ------
    UnsupportedProblemError
        Unless p = n = 2 and the charges sum to zero.
    PreconditionError
        If a mollified pole falls below the mesh resolution.
    """
    if problem.p != 2 or problem.n != 2:
        raise UnsupportedProblemError("the plane pipeline covers p = n = 2 only")
    if abs(problem.total_charge) > 1e-12:
        raise UnsupportedProblemError("p = n requires charges summing to zero for a decaying solution")
    config = config or SolverConfig()
    if xs is None or ys is None:
        xs, ys = default_plane_grid(problem)
    mesh = mesh or build_icosphere(6)
    grid = PlaneFunction(xs, ys, np.zeros((len(xs), len(ys))))

    if not any(problem.charges):
        return grid

    w = solve_sphere(transported_sphere_problem(problem, mesh), config)
    at_infinity = float(mesh.interpolate(w.values, np.array([[0.0, 0.0, 1.0]]))[0])
    values = pull_back(mesh, w, grid.points) - at_infinity
    logger.info("dirac plane solve: %d poles, %d mesh vertices, %d grid nodes", len(problem.points), mesh.n_vertices, values.size)
    return PlaneFunction(xs, ys, values.reshape(len(xs), len(ys)))


def transported_sphere_problem(problem: DiracProblem, mesh: SphereMesh) -> SphereProblem:
    """Mollify every pole, move it to S^2 and rescale its discrete mass to ``gamma_i``."""
    bump = mollifier(problem.mollifier_radius, 2)
    f = None
    for pole, gamma in zip(problem.poles, problem.charges):
        if not gamma:
            continue

        def density(x: np.ndarray, center: np.ndarray = pole.copy()) -> np.ndarray:
            return bump.density(np.linalg.norm(x - center, axis=-1))

        piece = conformal_transport(mesh, density)
        mass = piece.integral()
        if mass <= 0:
            raise PreconditionError(f"mollified pole at {pole.tolist()} is below the mesh resolution")
        piece = piece * (gamma / mass)
        f = piece if f is None else f + piece
    if f is None:
        f = SphereFunction(mesh, np.zeros(mesh.n_vertices))
    return SphereProblem(f, p=2.0)


# -----------------------------
# Singularity gap
# -----------------------------

def pole_distance(problem: DiracProblem, points: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.min(np.linalg.norm(pts[:, None, :] - problem.poles[None, :, :], axis=2), axis=1)


def annulus_mask(problem: DiracProblem, points: np.ndarray, outer: Optional[float] = None, factor: float = EXCLUSION_FACTOR) -> np.ndarray:
    """Points at least ``factor * eps`` from every pole and inside ``|x| <= outer``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    outer = problem.domain_radius if outer is None else outer
    far = pole_distance(problem, pts) >= factor * problem.mollifier_radius
    return far & (np.linalg.norm(pts, axis=1) <= outer)


def singularity_gap(u: PlaneFunction, problem: DiracProblem, points: Optional[np.ndarray] = None) -> float:
    """``sup |u - sum gamma_i phi(x - a_i)|`` over ``points`` (default: the grid nodes).

    Raises
    ------
    PreconditionError
        If an evaluation point lies within ``eps`` of a pole.
    """
    pts = u.points if points is None else np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return 0.0
    if np.any(pole_distance(problem, pts) <= problem.mollifier_radius):
        raise PreconditionError("evaluation points must avoid the eps-neighborhoods of the poles")
    values = u.values.ravel() if points is None else u(pts)
    return float(np.max(np.abs(values - superposition(problem, pts))))


@dataclass(frozen=True, eq=False)
class GapProfile:
    shells: np.ndarray
    gaps: np.ndarray
    counts: np.ndarray

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.gaps)))


def singularity_gap_profile(u: PlaneFunction, problem: DiracProblem, shells: Optional[Sequence[float]] = None) -> GapProfile:
    """Gap on annular shells ``shells[k] <= |x| < shells[k+1]`` away from the poles."""
    edges = np.asarray(shells if shells is not None else np.linspace(0.0, problem.domain_radius, 6), dtype=float)
    pts = u.points
    keep = annulus_mask(problem, pts, outer=float(edges[-1]))
    radius = np.linalg.norm(pts, axis=1)
    values = u.values.ravel()
    gaps, counts = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = keep & (radius >= lo) & (radius < hi)
        counts.append(int(np.sum(sel)))
        gaps.append(float(np.max(np.abs(values[sel] - superposition(problem, pts[sel])))) if np.any(sel) else 0.0)
    return GapProfile(shells=edges, gaps=np.asarray(gaps), counts=np.asarray(counts))


def plane_sup_error(u: PlaneFunction, problem: DiracProblem, outer: Optional[float] = None) -> float:
    """``sup |u - exact| / sup |exact|`` on the test annulus."""
    pts = u.points
    keep = annulus_mask(problem, pts, outer=outer)
    if not np.any(keep):
        return 0.0
    exact = superposition(problem, pts[keep])
    scale = max(float(np.max(np.abs(exact))), np.finfo(float).tiny)
    return float(np.max(np.abs(u.values.ravel()[keep] - exact)) / scale)


# -----------------------------
# Weighted L^q bound
# -----------------------------

@dataclass(frozen=True, eq=False)
class WeightedLqReport:
    """Weighted integrals ``int_{|x|<=k} exp(-|x|^2) |u_k|^q`` against ``C^q int exp(-|x|^2) phi^q``."""

    radii: np.ndarray
    lhs: np.ndarray
    rhs: float
    c_dom: float
    inequality_ok: bool
    contracting: bool

    @property
    def passed(self) -> bool:
        return self.inequality_ok and self.contracting

    def to_dict(self) -> dict:
        return {
            "radii": self.radii.tolist(),
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs,
            "c_dom": self.c_dom,
            "inequality_ok": self.inequality_ok,
            "contracting": self.contracting,
            "pass": self.passed,
        }


def weighted_lq_check(
    p: float = 2.0,
    n: int = 3,
    q: float = 2.0,
    gamma: float = 1.0,
    eps: float = 0.1,
    radii: Sequence[float] = (4.0, 8.0, 16.0, 32.0),
) -> WeightedLqReport:
    """Gaussian-weighted L^q bound for Dirichlet radial solutions on growing balls (p < n).

    ``c_dom = max |u_k| / phi`` over the grids; the left sides must sit below
    ``c_dom^q`` times the right side, and their successive changes must
    shrink as the ball grows.

    Raises
    ------
    DomainError
        If ``p >= n``, ``q <= p - 1`` or the right side diverges.
    """
    check_weighted_lq_parameters(p, n, q, eps, radii)

    phi = fundamental_solution(p, n)
    scale = abs(charge_scale(gamma, p))
    area = surface_area_unit_sphere(n)
    rhs, _ = integrate.quad(lambda r: math.exp(-r * r) * (scale * float(phi(r))) ** q * r ** (n - 1), 0.0, np.inf, limit=400)
    rhs *= area

    lhs, ratios = [], [0.0]
    for k in radii:
        solution = solve_radial(p, n, gamma, eps, float(k), "dirichlet")
        r = np.concatenate([[0.0], solution.r])
        u = np.concatenate([[solution.u[0]], solution.u])
        lhs.append(area * float(integrate.trapezoid(np.exp(-r * r) * np.abs(u) ** q * r ** (n - 1), r)))
        if scale > 0:
            ratios.append(float(np.max(np.abs(solution.u) / (scale * phi(solution.r)))))
    lhs = np.asarray(lhs)
    c_dom = max(ratios)
    inequality_ok = bool(np.all(lhs <= c_dom ** q * rhs * (1.0 + 1e-9) + 1e-300))
    changes = np.abs(np.diff(lhs))
    contracting = bool(np.all(changes[1:] <= changes[:-1] + 1e-12))
    logger.info("weighted L^q: c_dom=%.4f rhs=%.6g lhs=%s", c_dom, rhs, np.array2string(lhs, precision=6))
    return WeightedLqReport(
        radii=np.asarray(radii, dtype=float),
        lhs=lhs,
        rhs=float(rhs),
        c_dom=c_dom,
        inequality_ok=inequality_ok,
        contracting=contracting,
    )
