"""Total variation, perimeter and the coarea identity on the discrete sphere.

Two discretizations of ``V(u) = int |du|`` coexist:

- the graph 1-seminorm ``sum_e w_e |u_i - u_j|`` (Crofton edge weights), for
  which the coarea formula is an algebraic identity;
- the piecewise-linear ``sum_T area_T |grad u_T|``, which is the geometrically
  accurate one and is used for heat-flow smoothing and symmetrization.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.linalg import factorized

from ..errors import DomainError
from ..geometry.sphere_mesh import SPHERE_AREA, CellSet, SphereFunction, cap_perimeter
from .rearrange import distribution_function

logger = logging.getLogger(__name__)

# Constant of the weak isoperimetric inequality P(E) >= C min(|E|, |S^2 \ E|)^(1/2).
ISOPERIMETRIC_CONSTANT = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class VariationReport:
    tv_graph: float
    tv_pl: float
    coarea_integral: float


@dataclass(frozen=True, eq=False)
class HeatTrace:
    """Total variation along a discrete heat flow, with monotonicity constant ``c``."""

    times: np.ndarray
    tv: np.ndarray
    c: float = 0.0

    def damped(self) -> np.ndarray:
        return np.exp(-self.c * self.times) * self.tv

    def is_monotone(self, tol: float = 1e-9) -> bool:
        """True when ``exp(-c t) * tv(t)`` never increases by more than ``tol``."""
        return bool(np.all(np.diff(self.damped()) <= tol))

    def small_time_gap(self, reference: float) -> float:
        """Relative distance between the first recorded step and ``reference``."""
        if reference == 0:
            return float(abs(self.tv[1] if self.tv.size > 1 else self.tv[0]))
        first = self.tv[1] if self.tv.size > 1 else self.tv[0]
        return float(abs(first - reference) / reference)


# -----------------------------
# Total variation
# -----------------------------

def total_variation_graph(u: SphereFunction) -> float:
    """``sum_e edge_weight_e * |u_i - u_j|``."""
    i, j = u.mesh.edges[:, 0], u.mesh.edges[:, 1]
    return float(np.sum(u.mesh.edge_weight * np.abs(u.values[i] - u.values[j])))


def triangle_gradients(u: SphereFunction) -> np.ndarray:
    """In-plane gradient of the linear interpolant on every (flat) triangle."""
    mesh = u.mesh
    tri = mesh.triangles
    p = [mesh.vertices[tri[:, k]] for k in range(3)]
    normal = np.cross(p[1] - p[0], p[2] - p[0])
    double_area = np.linalg.norm(normal, axis=1)
    unit = normal / double_area[:, None]
    grad = np.zeros_like(normal)
    # grad u = sum_k u_k (n x e_k) / (2A), e_k the edge opposite corner k.
    for k in range(3):
        edge = p[(k + 2) % 3] - p[(k + 1) % 3]
        grad += u.values[tri[:, k]][:, None] * np.cross(unit, edge)
    return grad / double_area[:, None]


def total_variation_pl(u: SphereFunction) -> float:
    """``sum_T area_T * |grad u_T|`` for the piecewise-linear interpolant."""
    grads = triangle_gradients(u)
    return float(np.sum(u.mesh.triangle_area * np.linalg.norm(grads, axis=1)))


def perimeter(e: CellSet) -> float:
    """De Giorgi perimeter of a vertex set: the graph variation of its indicator."""
    return total_variation_graph(e.indicator())


# -----------------------------
# Coarea
# -----------------------------

def level_set_perimeters(u: SphereFunction) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values ``t_k`` (ascending) and ``P({u > t_k})`` for each of them.

    An edge is cut at level ``t_k`` exactly when ``min(u_i, u_j) <= t_k <
    max(u_i, u_j)``, so its weight enters a contiguous range of levels;
    the ranges are accumulated through a difference array.
    """
    levels, rank = np.unique(u.values, return_inverse=True)
    rank = rank.reshape(-1)
    i, j = u.mesh.edges[:, 0], u.mesh.edges[:, 1]
    lo = np.minimum(rank[i], rank[j])
    hi = np.maximum(rank[i], rank[j])
    w = u.mesh.edge_weight
    diff = np.bincount(lo, weights=w, minlength=levels.size + 1) - np.bincount(hi, weights=w, minlength=levels.size + 1)
    return levels, np.cumsum(diff)[: levels.size]


def coarea_integral(u: SphereFunction) -> float:
    """``int P(u > t) dt`` as ``sum_k (t_{k+1} - t_k) * P({u > t_k})``."""
    levels, perimeters = level_set_perimeters(u)
    if levels.size < 2:
        return 0.0
    return float(np.sum(np.diff(levels) * perimeters[:-1]))


def variation_report(u: SphereFunction) -> VariationReport:
    return VariationReport(
        tv_graph=total_variation_graph(u),
        tv_pl=total_variation_pl(u),
        coarea_integral=coarea_integral(u),
    )


def semicontinuity_sweep(u: SphereFunction, levels: Sequence[int] = (2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)) -> np.ndarray:
    """Graph variation of ``u`` quantized to ``m`` equally spaced levels, for each ``m``.

    The quantizations converge to ``u`` in L^1, so their variations must not
    fall below ``V(u)`` in the limit.
    """
    lo, hi = float(np.min(u.values)), float(np.max(u.values))
    out = []
    for m in levels:
        if hi == lo:
            out.append(0.0)
            continue
        step = (hi - lo) / m
        quantized = lo + step * np.round((u.values - lo) / step)
        out.append(total_variation_graph(u.with_values(quantized)))
    return np.asarray(out)


# -----------------------------
# Heat flow
# -----------------------------

def heat_flow_trace(u: SphereFunction, step: float, nsteps: int, c: float = 0.0) -> HeatTrace:
    """Implicit Euler heat flow ``(M + step K) u_{n+1} = M u_n`` with ``tv_pl`` recorded.

    ``c`` is the monotonicity constant; the sphere has nonnegative
    curvature, so 0 is the default.
    """
    if step <= 0:
        raise DomainError(f"step must be positive, got {step!r}")
    if nsteps < 1:
        raise DomainError(f"nsteps must be at least 1, got {nsteps!r}")
    mesh = u.mesh
    solve = factorized((mesh.mass_matrix + step * mesh.stiffness_matrix).tocsc())
    values = u.values.copy()
    tv = [total_variation_pl(u)]
    for _ in range(nsteps):
        values = solve(mesh.vertex_area * values)
        tv.append(total_variation_pl(u.with_values(values)))
    times = step * np.arange(nsteps + 1)
    logger.debug("heat flow: %d steps of %.3g, tv %.6g -> %.6g", nsteps, step, tv[0], tv[-1])
    return HeatTrace(times=times, tv=np.asarray(tv), c=c)


# -----------------------------
# Isoperimetry and symmetrization
# -----------------------------

def isoperimetric_lower_bound(area: float) -> float:
    """``sqrt(2 pi) * min(area, 4 pi - area)^(1/2)``."""
    return ISOPERIMETRIC_CONSTANT * math.sqrt(max(min(area, SPHERE_AREA - area), 0.0))


def isoperimetric_deficit(e: CellSet) -> float:
    """``P(E) - cap_perimeter(|E|)``: zero on caps, positive for other sets."""
    return perimeter(e) - cap_perimeter(min(e.area, SPHERE_AREA))


def symmetrized_variation(u: SphereFunction) -> float:
    """``V(u*) = int cap_perimeter(mu(t)) dt`` by coarea over caps."""
    mu = distribution_function(u)
    if mu.levels.size < 2:
        return 0.0
    masses = np.clip(mu.mass_above[:-1], 0.0, SPHERE_AREA)
    return float(np.sum(np.diff(mu.levels) * cap_perimeter(masses)))
