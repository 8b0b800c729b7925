"""Stereographic projection from the north pole and conformal transport.

The projection is normalized so that the equator maps to the unit circle:
``x = (X, Y) / (1 - Z)``. Its area element gives the conformal factor
``lambda = dx / dV = 1 / (1 - Z)**2`` used to move plane densities onto
the sphere with their total mass preserved.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..errors import DomainError, SingularityError
from .sphere_mesh import SphereFunction, SphereMesh

logger = logging.getLogger(__name__)

# Points closer than this (in 1 - Z) to the north pole are treated as the point at infinity.
POLE_TOLERANCE = 1e-12

PlaneDensity = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class PlaneFunction:
    """Values on a tensor grid of the plane (``values[i, j]`` at ``(xs[i], ys[j])``)."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (xs.size, ys.size):
            raise ValueError(f"values shape {values.shape} does not match grid ({xs.size}, {ys.size})")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError("grid nodes must be distinct and increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("PlaneFunction values must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "values", values)

    @property
    def points(self) -> np.ndarray:
        """(nx*ny, 2) node coordinates in ``values.ravel()`` order."""
        gx, gy = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def __call__(self, points: np.ndarray) -> np.ndarray:
        interp = RegularGridInterpolator((self.xs, self.ys), self.values, bounds_error=False, fill_value=0.0)
        return interp(np.atleast_2d(points))


def stereographic_forward(points: np.ndarray) -> np.ndarray:
    """Project unit vectors (``(3,)`` or ``(N, 3)``) to the plane.

    Raises
    ------
    SingularityError
        If any point is the north pole.
    """
    p = np.asarray(points, dtype=float)
    gap = 1.0 - p[..., 2]
    if np.any(gap <= POLE_TOLERANCE):
        raise SingularityError("the north pole has no stereographic image")
    return p[..., :2] / gap[..., None]


def stereographic_inverse(points: np.ndarray) -> np.ndarray:
    """Lift plane points (``(2,)`` or ``(N, 2)``) back to the unit sphere."""
    x = np.asarray(points, dtype=float)
    rho2 = np.sum(x * x, axis=-1)
    denom = 1.0 + rho2
    return np.concatenate([2.0 * x / denom[..., None], ((rho2 - 1.0) / denom)[..., None]], axis=-1)


def conformal_factor(points: np.ndarray) -> np.ndarray:
    """``lambda = 1 / (1 - Z)**2``, the ratio of plane to sphere area elements."""
    p = np.asarray(points, dtype=float)
    return 1.0 / (1.0 - p[..., 2]) ** 2


def _check_decay(g: PlaneDensity) -> None:
    """Reject densities whose far field does not fall off faster than ``|x|^-2``."""
    angles = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    ring = np.column_stack([np.cos(angles), np.sin(angles)])
    weighted = []
    for radius in (1e3, 1e4):
        values = np.asarray(g(radius * ring), dtype=float)
        if not np.all(np.isfinite(values)):
            raise DomainError("plane density is not finite in the far field")
        weighted.append(radius ** 2 * float(np.max(np.abs(values))))
    if weighted[1] > 0 and weighted[1] >= weighted[0]:
        raise DomainError("plane density does not decay fast enough to be integrable")


def conformal_transport(mesh: SphereMesh, g: Union[PlaneFunction, PlaneDensity]) -> SphereFunction:
    """Pull a plane density back to the sphere as ``f = lambda * (g o pi)``.

    ``int_{S^2} f dV`` equals ``int_{R^2} g dx`` up to quadrature error. The
    vertex at (or next to) the north pole carries the point at infinity and
    is assigned the limit value 0.
    """
    if not isinstance(g, PlaneFunction):
        _check_decay(g)
    finite = (1.0 - mesh.vertices[:, 2]) > POLE_TOLERANCE
    verts = mesh.vertices[finite]
    sampled = np.asarray(g(stereographic_forward(verts)), dtype=float)
    if not np.all(np.isfinite(sampled)):
        raise DomainError("plane density is not finite at the mesh nodes")
    values = np.zeros(mesh.n_vertices)
    values[finite] = conformal_factor(verts) * sampled
    return SphereFunction(mesh, values)


def pull_back(mesh: SphereMesh, w: SphereFunction, points: np.ndarray) -> np.ndarray:
    """Evaluate ``w o pi^{-1}`` at plane points by mesh interpolation."""
    return mesh.interpolate(w.values, stereographic_inverse(np.atleast_2d(points)))
