"""Triangulated unit 2-sphere and the functions and sets that live on it.

The mesh is the measure space for everything else in the package:

- ``vertex_area`` is the lumped measure (one third of the spherical area of
  every incident triangle), so the areas partition the sphere exactly.
- ``edge_weight`` is the Cauchy-Crofton length weight of an edge, so a cut
  sum ``sum w_e |u_i - u_j|`` of an indicator estimates boundary length.
- ``cot_weight`` is the dual/primal (cotangent) weight used by the
  stiffness matrix of the surface Laplacian.

All arrays are treated as read-only after construction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from ..errors import DomainError, PreconditionError, ResourceError

logger = logging.getLogger(__name__)

SPHERE_AREA = 4.0 * math.pi
MAX_SUBDIVISIONS = 8

# Fixed generic orientation: no vertex lands on a pole or on the equator.
_TILT = Rotation.from_euler("zyx", [0.3141, 0.5772, 0.2718])

ArrayLike = Union[float, np.ndarray]


# -----------------------------
# Cap geometry (exact formulas)
# -----------------------------

def _check_range(values: np.ndarray, lo: float, hi: float, name: str) -> None:
    if np.any(~np.isfinite(values)) or np.any(values < lo) or np.any(values > hi):
        raise DomainError(f"{name} must lie in [{lo:.17g}, {hi:.17g}], got {values!r}")


def _scalar_or_array(values: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(like) == 0 else values


def cap_area(theta: ArrayLike) -> ArrayLike:
    """Area of the geodesic ball of radius ``theta`` about the north pole.

    Evaluated as ``4*pi*sin(theta/2)**2`` which equals ``2*pi*(1 - cos theta)``
    without the cancellation near ``theta = 0``.
    """
    t = np.asarray(theta, dtype=float)
    _check_range(t, 0.0, math.pi, "theta")
    return _scalar_or_array(SPHERE_AREA * np.sin(0.5 * t) ** 2, theta)


def cap_colatitude(area: ArrayLike) -> ArrayLike:
    """Inverse of :func:`cap_area`: the colatitude whose cap has ``area``."""
    a = np.asarray(area, dtype=float)
    _check_range(a, 0.0, SPHERE_AREA, "area")
    return _scalar_or_array(2.0 * np.arctan2(np.sqrt(a), np.sqrt(SPHERE_AREA - a)), area)


def cap_perimeter(area: ArrayLike) -> ArrayLike:
    """Sharp isoperimetric profile of S^2: ``sqrt(area * (4*pi - area))``."""
    a = np.asarray(area, dtype=float)
    _check_range(a, 0.0, SPHERE_AREA, "area")
    return _scalar_or_array(np.sqrt(a * (SPHERE_AREA - a)), area)


# -----------------------------
# Mesh
# -----------------------------

@dataclass(frozen=True, eq=False)
class SphereMesh:
    """Immutable triangulation of the unit sphere.

    Attributes
    ----------
    vertices : (N, 3) float array of unit vectors.
    triangles : (T, 3) int array of vertex indices.
    vertex_area : (N,) lumped spherical area per vertex (steradians).
    edges : (E, 2) int array, ``edges[:, 0] < edges[:, 1]``.
    edge_weight : (E,) Crofton length weight per edge.
    cot_weight : (E,) cotangent (dual/primal) weight per edge.
    colatitude : (N,) geodesic distance to the north pole.
    subdivisions : refinement level the mesh was built with.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    vertex_area: np.ndarray
    edges: np.ndarray
    edge_weight: np.ndarray
    cot_weight: np.ndarray
    colatitude: np.ndarray
    subdivisions: int

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def total_area(self) -> float:
        return float(np.sum(self.vertex_area))

    @property
    def max_cell_area(self) -> float:
        return float(np.max(self.vertex_area))

    @cached_property
    def triangle_area(self) -> np.ndarray:
        """Flat (chordal) area of every triangle."""
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    @cached_property
    def mass_matrix(self) -> sparse.csr_matrix:
        """Lumped (diagonal) mass matrix."""
        return sparse.diags(self.vertex_area).tocsr()

    @cached_property
    def stiffness_matrix(self) -> sparse.csr_matrix:
        """Cotangent stiffness matrix ``K`` with ``u^T K u = int |grad u|^2``."""
        n = self.n_vertices
        i, j = self.edges[:, 0], self.edges[:, 1]
        w = self.cot_weight
        rows = np.concatenate([i, j, i, j])
        cols = np.concatenate([j, i, i, j])
        vals = np.concatenate([-w, -w, w, w])
        return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    @cached_property
    def vertex_triangles(self) -> np.ndarray:
        """(N, max valence) table of incident triangles, padded with -1."""
        corners = self.triangles.ravel()
        tri_ids = np.repeat(np.arange(self.triangles.shape[0]), 3)
        order = np.argsort(corners, kind="stable")
        counts = np.bincount(corners, minlength=self.n_vertices)
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        slot = np.arange(corners.size) - np.repeat(starts, counts)
        table = np.full((self.n_vertices, int(counts.max())), -1, dtype=np.int64)
        table[corners[order], slot] = tri_ids[order]
        return table

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.vertices)

    def dirichlet_energy(self, values: np.ndarray) -> float:
        """Discrete ``int |grad u|^2 dV`` of the piecewise-linear interpolant."""
        values = np.asarray(values, dtype=float)
        return float(values @ (self.stiffness_matrix @ values))

    def integrate(self, values: np.ndarray) -> float:
        """Lumped quadrature ``sum area_v * values_v``."""
        return float(np.dot(self.vertex_area, values))

    def interpolate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate the piecewise-linear interpolant of ``values`` at ``points``.

        Points are unit vectors. Each point is located in the star of its
        nearest vertex by central projection onto the candidate triangles.
        """
        values = np.asarray(values, dtype=float)
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        _, nearest = self._tree.query(pts)
        cand = self.vertex_triangles[nearest]  # (Q, V)
        valid = cand >= 0
        tri = self.triangles[np.where(valid, cand, 0)]  # (Q, V, 3)
        corners = self.vertices[tri]  # (Q, V, 3 corners, 3 coords)
        # Solve corners^T w = p for the central-projection weights.
        lhs = np.swapaxes(corners, -1, -2)
        rhs = np.broadcast_to(pts[:, None, :], lhs.shape[:-1])[..., None]
        weights = np.linalg.solve(lhs, rhs)[..., 0]
        score = np.where(valid, weights.min(axis=-1), -np.inf)
        best = np.argmax(score, axis=1)
        rows = np.arange(pts.shape[0])
        w = np.clip(weights[rows, best], 0.0, None)
        w = w / np.sum(w, axis=1, keepdims=True)
        return np.sum(w * values[tri[rows, best]], axis=1)


# -----------------------------
# Construction
# -----------------------------

def _icosahedron() -> tuple[np.ndarray, np.ndarray]:
    t = (1.0 + math.sqrt(5.0)) / 2.0
    vertices = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=float,
    )
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    return vertices / np.linalg.norm(vertices, axis=1, keepdims=True), faces


def _face_edges(faces: np.ndarray) -> np.ndarray:
    """Edges of every face, in the order (01, 12, 20), sorted per row."""
    return np.sort(np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]), axis=1)


def _subdivide(vertices: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    edges, inverse = np.unique(_face_edges(faces), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    mid = vertices[edges[:, 0]] + vertices[edges[:, 1]]
    mid /= np.linalg.norm(mid, axis=1, keepdims=True)

    t = faces.shape[0]
    m = vertices.shape[0] + inverse
    m01, m12, m20 = m[:t], m[t:2 * t], m[2 * t:]
    a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
    new_faces = np.concatenate(
        [
            np.stack([a, m01, m20], axis=1),
            np.stack([m01, b, m12], axis=1),
            np.stack([m20, m12, c], axis=1),
            np.stack([m01, m12, m20], axis=1),
        ]
    )
    return np.concatenate([vertices, mid]), new_faces


def _spherical_triangle_area(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    triple = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    denom = 1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum("ij,ij->i", c, a)
    return 2.0 * np.arctan2(triple, denom)


def _cot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", u, v) / np.linalg.norm(np.cross(u, v), axis=1)


def build_icosphere(subdivisions: int) -> SphereMesh:
    """Icosahedron refined ``subdivisions`` times and projected to the sphere.

    Raises
    ------
    ResourceError
        If ``subdivisions`` exceeds :data:`MAX_SUBDIVISIONS`.
    """
    if subdivisions < 0:
        raise DomainError(f"subdivisions must be non-negative, got {subdivisions}")
    if subdivisions > MAX_SUBDIVISIONS:
        raise ResourceError(f"subdivisions={subdivisions} exceeds the guard of {MAX_SUBDIVISIONS}")

    vertices, faces = _icosahedron()
    for _ in range(subdivisions):
        vertices, faces = _subdivide(vertices, faces)
    vertices = _TILT.apply(vertices)
    vertices /= np.linalg.norm(vertices, axis=1, keepdims=True)

    n = vertices.shape[0]
    a, b, c = (vertices[faces[:, k]] for k in range(3))

    # Lumped spherical areas: one third of each incident spherical triangle.
    sph = _spherical_triangle_area(a, b, c)
    vertex_area = np.bincount(faces.ravel(), weights=np.repeat(sph, 3), minlength=n) / 3.0

    # Per face edge (01, 12, 20) the opposite corner is (2, 0, 1).
    edges, inverse = np.unique(_face_edges(faces), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    cot_opposite = np.concatenate([_cot(a - c, b - c), _cot(b - a, c - a), _cot(c - b, a - b)])
    cot_weight = 0.5 * np.bincount(inverse, weights=cot_opposite, minlength=edges.shape[0])

    flat = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
    length = np.linalg.norm(vertices[edges[:, 0]] - vertices[edges[:, 1]], axis=1)
    side_area = np.bincount(inverse, weights=np.tile(flat, 3), minlength=edges.shape[0])
    edge_weight = (math.pi / 6.0) * side_area / length

    if np.any(cot_weight < 0):
        logger.warning("negative cotangent weights on %d edges", int(np.sum(cot_weight < 0)))

    mesh = SphereMesh(
        vertices=vertices,
        triangles=faces,
        vertex_area=vertex_area,
        edges=edges,
        edge_weight=edge_weight,
        cot_weight=cot_weight,
        colatitude=np.arccos(np.clip(vertices[:, 2], -1.0, 1.0)),
        subdivisions=subdivisions,
    )
    logger.debug("icosphere s=%d: %d vertices, %d triangles", subdivisions, n, faces.shape[0])
    return mesh


# -----------------------------
# Functions and sets on the mesh
# -----------------------------

@dataclass(frozen=True, eq=False)
class SphereFunction:
    """Real values attached to the vertices of a mesh."""

    mesh: SphereMesh
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.mesh.n_vertices,):
            raise ValueError(f"expected {self.mesh.n_vertices} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("SphereFunction values must be finite")
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray) -> "SphereFunction":
        return SphereFunction(self.mesh, values)

    def integral(self) -> float:
        return self.mesh.integrate(self.values)

    def l1_norm(self) -> float:
        return self.mesh.integrate(np.abs(self.values))

    def positive_part(self) -> "SphereFunction":
        return self.with_values(np.maximum(self.values, 0.0))

    def negative_part(self) -> "SphereFunction":
        return self.with_values(np.maximum(-self.values, 0.0))

    def __add__(self, other: Union["SphereFunction", float]) -> "SphereFunction":
        other_values = other.values if isinstance(other, SphereFunction) else other
        return self.with_values(self.values + other_values)

    def __sub__(self, other: Union["SphereFunction", float]) -> "SphereFunction":
        other_values = other.values if isinstance(other, SphereFunction) else other
        return self.with_values(self.values - other_values)

    def __mul__(self, scale: float) -> "SphereFunction":
        return self.with_values(scale * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> "SphereFunction":
        return self.with_values(-self.values)


@dataclass(frozen=True, eq=False)
class CellSet:
    """A measurable set of the discrete sphere: a membership flag per vertex."""

    mesh: SphereMesh
    membership: np.ndarray

    def __post_init__(self) -> None:
        membership = np.asarray(self.membership, dtype=bool)
        if membership.shape != (self.mesh.n_vertices,):
            raise ValueError(f"expected {self.mesh.n_vertices} flags, got shape {membership.shape}")
        object.__setattr__(self, "membership", membership)

    @property
    def area(self) -> float:
        return float(np.sum(self.mesh.vertex_area[self.membership]))

    def complement(self) -> "CellSet":
        return CellSet(self.mesh, ~self.membership)

    def indicator(self) -> SphereFunction:
        return SphereFunction(self.mesh, self.membership.astype(float))


def coordinate(mesh: SphereMesh, axis: int) -> SphereFunction:
    """Ambient coordinate ``x``, ``y`` or ``z`` (axis 0, 1, 2) restricted to S^2."""
    return SphereFunction(mesh, mesh.vertices[:, axis].copy())


def polar_cap(mesh: SphereMesh, theta: float) -> CellSet:
    """Discrete geodesic ball ``{colatitude <= theta}`` about the north pole."""
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta!r}")
    return CellSet(mesh, mesh.colatitude <= theta)


def random_set(mesh: SphereMesh, area: float, rng: np.random.Generator) -> CellSet:
    """Random vertex subset whose area is the first cumulative area reaching ``area``."""
    if not 0.0 <= area <= SPHERE_AREA:
        raise DomainError(f"area must lie in [0, 4*pi], got {area!r}")
    order = rng.permutation(mesh.n_vertices)
    cumulative = np.cumsum(mesh.vertex_area[order])
    count = int(np.searchsorted(cumulative, area, side="left")) + 1 if area > 0 else 0
    membership = np.zeros(mesh.n_vertices, dtype=bool)
    membership[order[:min(count, mesh.n_vertices)]] = True
    return CellSet(mesh, membership)


def _monomial_exponents(degree: int) -> list[tuple[int, int, int]]:
    return [(a, b, d - a - b) for d in range(degree + 1) for a in range(d + 1) for b in range(d - a + 1)]


def smooth_random_function(mesh: SphereMesh, rng: np.random.Generator, degree: int = 3) -> SphereFunction:
    """Random combination of ambient monomials ``x^a y^b z^c`` with ``a+b+c <= degree``."""
    x, y, z = mesh.vertices.T
    values = np.zeros(mesh.n_vertices)
    for a, b, c in _monomial_exponents(degree):
        values += rng.normal() * x ** a * y ** b * z ** c
    return SphereFunction(mesh, values)


def geodesic_bump(mesh: SphereMesh, center: np.ndarray, radius: float, mass: float = 1.0) -> SphereFunction:
    """Polynomial bump ``(1 - (d/radius)^2)^2`` of discrete mass ``mass`` about ``center``.

    Raises
    ------
    PreconditionError
        If no vertex lies strictly inside the bump.
    """
    if radius <= 0:
        raise DomainError(f"radius must be positive, got {radius!r}")
    center = np.asarray(center, dtype=float)
    center = center / np.linalg.norm(center)
    dist = np.arccos(np.clip(mesh.vertices @ center, -1.0, 1.0))
    shape = np.where(dist < radius, (1.0 - (dist / radius) ** 2) ** 2, 0.0)
    total = mesh.integrate(shape)
    if total <= 0:
        raise PreconditionError(f"bump radius {radius} is below the mesh resolution")
    return SphereFunction(mesh, shape * (mass / total))
