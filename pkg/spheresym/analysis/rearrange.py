"""Distribution functions, decreasing rearrangement and polar-cap symmetrization.

Conventions
-----------
- ``mu(t) = meas(u > t)`` with the strict inequality (right-continuous).
- Sorting is by value descending, ties broken by vertex index, so every
  result is deterministic.
- Discrete rearrangement couples vertices by cumulative *area*, never by
  vertex count.
- The symmetrization ``u*`` gives each colatitude-ordered cell the mean of
  the decreasing rearrangement over that cell's cumulative-area interval.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import trapezoid

from ..geometry.sphere_mesh import CellSet, SphereFunction, SphereMesh

logger = logging.getLogger(__name__)


# -----------------------------
# Distribution function
# -----------------------------

@dataclass(frozen=True, eq=False)
class DistributionFunction:
    """Step function ``t -> meas(u > t)``.

    ``levels`` are the distinct values of ``u`` in ascending order and
    ``mass_above[k] = meas(u > levels[k])``; ``total`` is the measure of the
    whole space (the value for ``t`` below every level).
    """

    levels: np.ndarray
    mass_above: np.ndarray
    total: float

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        """``(level, meas(u > level))`` pairs, ascending in level."""
        return list(zip(self.levels.tolist(), self.mass_above.tolist()))

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.levels, t, side="right") - 1
        out = np.where(k < 0, self.total, self.mass_above[np.clip(k, 0, None)])
        return float(out) if out.ndim == 0 else out


def distribution_function(u: SphereFunction) -> DistributionFunction:
    """``mu(t) = meas(u > t)`` evaluated exactly at every distinct value of ``u``."""
    levels, inverse = np.unique(u.values, return_inverse=True)
    mass_at = np.bincount(inverse.reshape(-1), weights=u.mesh.vertex_area, minlength=levels.size)
    # Suffix sums: no cancellation from subtracting running totals.
    suffix = np.cumsum(mass_at[::-1])[::-1]
    mass_above = np.append(suffix[1:], 0.0)
    return DistributionFunction(levels=levels, mass_above=mass_above, total=float(suffix[0]))


def distribution_distance(u: SphereFunction, v: SphereFunction) -> float:
    """``sup_t |mu_u(t) - mu_v(t)|`` over all levels of both functions."""
    mu_u, mu_v = distribution_function(u), distribution_function(v)
    ts = np.union1d(mu_u.levels, mu_v.levels)
    return float(np.max(np.abs(mu_u(ts) - mu_v(ts)))) if ts.size else 0.0


# -----------------------------
# One-dimensional rearrangement
# -----------------------------

@dataclass(frozen=True, eq=False)
class RearrangementProfile:
    """Non-increasing step function on ``[0, total area]``.

    The profile equals ``values[k]`` on ``[edges[k], edges[k+1])``; the step
    widths are the areas of the sorted vertices.
    """

    widths: np.ndarray
    values: np.ndarray

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.widths)])

    @property
    def total(self) -> float:
        return float(np.sum(self.widths))

    def __call__(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        k = np.clip(np.searchsorted(self.edges, s, side="right") - 1, 0, self.values.size - 1)
        out = self.values[k]
        return float(out) if out.ndim == 0 else out

    def integral(self, fn: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> float:
        """``int_0^total fn(u_bar(s)) ds`` (identity ``fn`` when omitted)."""
        vals = self.values if fn is None else fn(self.values)
        return float(np.dot(self.widths, vals))

    def cell_averages(self, bounds: np.ndarray) -> np.ndarray:
        """Mean of the profile over each interval ``[bounds[j], bounds[j+1]]``."""
        edges = self.edges
        last = self.values.size - 1
        primitive = np.concatenate([[0.0], np.cumsum(self.widths * self.values)])
        b = np.clip(bounds, 0.0, edges[-1])
        k = np.clip(np.searchsorted(edges, b, side="right") - 1, 0, last)
        at_bounds = primitive[k] + (b - edges[k]) * self.values[k]
        width = np.diff(b)
        with np.errstate(invalid="ignore", divide="ignore"):
            avg = np.diff(at_bounds) / width
        # The exact mean lies between the first and last step the interval touches.
        k_lo = k[:-1]
        k_hi = np.clip(np.searchsorted(edges, b[1:], side="left") - 1, 0, last)
        hi, lo = self.values[k_lo], self.values[np.maximum(k_hi, k_lo)]
        avg = np.where(width > 0, avg, hi)
        return np.clip(avg, lo, hi)


def _descending_order(values: np.ndarray) -> np.ndarray:
    return np.lexsort((np.arange(values.size), -values))


def _colatitude_order(mesh: SphereMesh) -> np.ndarray:
    return np.lexsort((np.arange(mesh.n_vertices), mesh.colatitude))


def decreasing_rearrangement(u: SphereFunction) -> RearrangementProfile:
    """``u_bar(s) = inf{t : mu(t) < s}`` as a step function of cumulative area."""
    order = _descending_order(u.values)
    return RearrangementProfile(widths=u.mesh.vertex_area[order], values=u.values[order])


def rearranged_product_integral(u: SphereFunction, v: SphereFunction) -> float:
    """``int_0^{4 pi} u_bar(s) v_bar(s) ds``, exact for the two step functions."""
    pu, pv = decreasing_rearrangement(u), decreasing_rearrangement(v)
    cuts = np.union1d(pu.edges, pv.edges)
    cuts = cuts[cuts <= min(pu.total, pv.total)]
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    return float(np.dot(np.diff(cuts), pu(mids) * pv(mids)))


# -----------------------------
# Symmetrization
# -----------------------------

def symmetrize(u: SphereFunction) -> SphereFunction:
    """Polar-cap symmetrization ``u*``: non-increasing in colatitude, equimeasurable with ``u``."""
    mesh = u.mesh
    order = _colatitude_order(mesh)
    bounds = np.concatenate([[0.0], np.cumsum(mesh.vertex_area[order])])
    averages = decreasing_rearrangement(u).cell_averages(bounds)
    values = np.empty(mesh.n_vertices)
    values[order] = averages
    return SphereFunction(mesh, values)


def symmetrize_set(e: CellSet) -> CellSet:
    """``E*``: the discrete polar cap whose area is closest to ``|E|``."""
    mesh = e.mesh
    order = _colatitude_order(mesh)
    bounds = np.concatenate([[0.0], np.cumsum(mesh.vertex_area[order])])
    count = int(np.argmin(np.abs(bounds - e.area)))
    membership = np.zeros(mesh.n_vertices, dtype=bool)
    membership[order[:count]] = True
    return CellSet(mesh, membership)


# -----------------------------
# Layer-cake decomposition
# -----------------------------

def layer_cake_slice(u: SphereFunction, t: float) -> SphereFunction:
    """``b(t, x) = chi{u(x) > t >= 0} - chi{u(x) <= t < 0}``, values in {-1, 0, 1}."""
    if t >= 0:
        values = (u.values > t).astype(float)
    else:
        values = -(u.values <= t).astype(float)
    return u.with_values(values)


def default_level_grid(u: SphereFunction, size: int = 400) -> np.ndarray:
    """Uniform t-grid spanning ``[min(u, 0), max(u, 0)]``."""
    lo, hi = min(float(np.min(u.values)), 0.0), max(float(np.max(u.values)), 0.0)
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, size)


def layer_cake_reconstruct(u: SphereFunction, t_grid: Optional[np.ndarray] = None) -> SphereFunction:
    """``u(x) = int b(t, x) dt`` by trapezoidal quadrature over ``t_grid``."""
    t_grid = default_level_grid(u) if t_grid is None else np.asarray(t_grid, dtype=float)
    slices = np.stack([layer_cake_slice(u, t).values for t in t_grid])
    return u.with_values(trapezoid(slices, t_grid, axis=0))


def layer_cake_symmetrize(u: SphereFunction, t_grid: Optional[np.ndarray] = None) -> SphereFunction:
    """``u*(x) = int b(t, x)* dt``: symmetrize every slice, then integrate."""
    t_grid = default_level_grid(u) if t_grid is None else np.asarray(t_grid, dtype=float)
    slices = np.stack([symmetrize(layer_cake_slice(u, t)).values for t in t_grid])
    return u.with_values(trapezoid(slices, t_grid, axis=0))
