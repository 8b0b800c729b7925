"""Artifact layer: every CSV/JSON file a run produces goes through here.

It adds:

- One writer per artifact kind (mesh tables, profiles, traces, fields, reports)
- Deterministic formatting (fixed column order, ``repr`` floats, sorted JSON keys)
- An input digest so check records can be matched to the data they ran on
- A run log: every write is recorded in ``run_log.jsonl`` of the output directory
"""

from __future__ import annotations

import csv
import datetime
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from ..db.settings import RUN_LOG_NAME

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# -----------------------------
# Utilities & run log
# -----------------------------

def now_str() -> str:
    """Return current UTC time as an RFC3339-like string with seconds precision.

    Example: ``2025-10-25T09:14:03Z``
    """
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def log(actor: str, action: str, artifact: str, details: str, out_dir: PathLike) -> None:
    """Append a run-log record.

    Parameters
    ----------
    actor: str
        Who wrote the artifact (e.g., the CLI command name).
    action: str
        What happened (e.g., "write-csv", "write-json").
    artifact: str
        File name relative to ``out_dir``.
    details: str
        Free-form description for debugging/trace.
    out_dir: path
        Output directory holding the run log.
    """
    record = {"actor": actor, "action": action, "artifact": artifact, "details": details, "created_at": now_str()}
    with open(Path(out_dir) / RUN_LOG_NAME, "a", encoding="utf-8") as f:
        f.write(json.dumps(record, sort_keys=True) + "\n")


def inputs_digest(*arrays: Any) -> str:
    """SHA-256 over the bytes of the given arrays (float64, C order)."""
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype=float)).tobytes())
    return h.hexdigest()


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays (recursively) to JSON-native values."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


# -----------------------------
# Generic writers
# -----------------------------

def write_csv(actor: str, out_dir: PathLike, name: str, fieldnames: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write ``rows`` under a header; floats are written with ``repr``."""
    out_dir = Path(out_dir)
    path = out_dir / name
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else _plain(v) for v in row])
            count += 1
    log(actor, "write-csv", name, f"{count} rows", out_dir)
    logger.info("wrote %s (%d rows)", path, count)
    return path


def write_json(actor: str, out_dir: PathLike, name: str, payload: Mapping[str, Any]) -> Path:
    out_dir = Path(out_dir)
    path = out_dir / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_plain(payload), f, indent=2, sort_keys=True)
        f.write("\n")
    log(actor, "write-json", name, f"{len(payload)} keys", out_dir)
    logger.info("wrote %s", path)
    return path


# -----------------------------
# Domain exports
# -----------------------------

def export_mesh_csv(actor: str, mesh: Any, out_dir: PathLike) -> tuple[Path, Path]:
    """``vertices.csv`` (index, x, y, z, area, colatitude) and ``edges.csv`` (i, j, weight)."""
    vertices = write_csv(
        actor,
        out_dir,
        "vertices.csv",
        ["index", "x", "y", "z", "area", "colatitude"],
        (
            (i, float(v[0]), float(v[1]), float(v[2]), float(a), float(c))
            for i, (v, a, c) in enumerate(zip(mesh.vertices, mesh.vertex_area, mesh.colatitude))
        ),
    )
    edges = write_csv(
        actor,
        out_dir,
        "edges.csv",
        ["i", "j", "weight"],
        ((int(i), int(j), float(w)) for (i, j), w in zip(mesh.edges, mesh.edge_weight)),
    )
    return vertices, edges


def export_distribution_csv(actor: str, mu: Any, out_dir: PathLike, name: str = "distribution.csv") -> Path:
    """Breakpoints ``(t, mass_above)`` of a distribution function."""
    return write_csv(actor, out_dir, name, ["t", "mass_above"], mu.breakpoints)


def export_profile_csv(actor: str, profile: Any, out_dir: PathLike, samples: int = 400, name: str = "rearrangement.csv") -> Path:
    """Decreasing rearrangement sampled at ``samples`` midpoints of ``[0, total]``."""
    s = (np.arange(samples) + 0.5) * (profile.total / samples)
    values = np.atleast_1d(profile(s))
    return write_csv(actor, out_dir, name, ["s", "value"], zip(map(float, s), map(float, values)))


def export_series_csv(actor: str, out_dir: PathLike, name: str, columns: Mapping[str, np.ndarray]) -> Path:
    """Columns of equal length written side by side (heat traces, decay curves)."""
    keys = list(columns)
    arrays = [np.asarray(columns[k], dtype=float) for k in keys]
    return write_csv(actor, out_dir, name, keys, zip(*(map(float, a) for a in arrays)))


def export_sphere_function_csv(actor: str, u: Any, out_dir: PathLike, name: str = "solution.csv", column: str = "u") -> Path:
    """``(index, x, y, z, value)`` per vertex."""
    mesh = u.mesh
    return write_csv(
        actor,
        out_dir,
        name,
        ["index", "x", "y", "z", column],
        ((i, float(v[0]), float(v[1]), float(v[2]), float(val)) for i, (v, val) in enumerate(zip(mesh.vertices, u.values))),
    )


def export_radial_csv(actor: str, solution: Any, out_dir: PathLike, name: str = "radial.csv") -> Path:
    """``(r, u, Q)`` of a radial solution."""
    return write_csv(
        actor, out_dir, name, ["r", "u", "Q"], zip(map(float, solution.r), map(float, solution.u), map(float, solution.Q))
    )


def export_plane_grid_csv(
    actor: str,
    u: Any,
    out_dir: PathLike,
    gap: Optional[np.ndarray] = None,
    name: str = "plane.csv",
) -> Path:
    """``(x, y, u, gap)`` per grid node; ``gap`` is left empty where it is undefined."""
    pts = u.points
    values = u.values.ravel()
    gaps = np.full(values.size, np.nan) if gap is None else np.asarray(gap, dtype=float).ravel()
    return write_csv(
        actor,
        out_dir,
        name,
        ["x", "y", "u", "gap"],
        (
            (float(x), float(y), float(v), "" if np.isnan(g) else float(g))
            for (x, y), v, g in zip(pts, values, gaps)
        ),
    )
