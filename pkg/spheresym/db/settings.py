"""
Filesystem locations and run configuration.

This module centralizes where artifacts go and how a run is configured.
It provides:
- Default paths relative to the project root (`BASE_DIR`).
- `RunConfig`, the validated description of one CLI run, with one
  parameter model per command.
- `load_config`, which reads a JSON config file, applies command-line
  overrides and turns every validation failure into `ConfigError`.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError, SpheresymError
from ..pde import dirac_plane

# Base directory of the project (one level above the package folder)
BASE_DIR = Path(__file__).resolve().parent.parent.parent

DEFAULT_OUTPUT_DIR = BASE_DIR / "out"
RUN_LOG_NAME = "run_log.jsonl"
REPORT_NAME = "verification_report.json"

# exponent and ball radii of the weighted L^q check run by `dirac`
WEIGHTED_LQ_EXPONENT = 2.0
WEIGHTED_LQ_RADII = (4.0, 8.0, 16.0, 32.0)

Command = Literal["mesh", "symmetrize", "variation", "heat", "solve-sphere", "dirac", "verify"]


# -----------------------------
# Per-command parameter blocks
# -----------------------------

class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class MeshParams(_Params):
    pass


class FunctionParams(_Params):
    """Which test function a symmetrize/variation run works on."""

    function: Literal["smooth-random", "coordinate", "random-set", "cap"] = "smooth-random"
    degree: int = Field(default=3, ge=0, le=3)
    axis: int = Field(default=2, ge=0, le=2)
    area: float = Field(default=3.0, gt=0, lt=4.0 * math.pi)


class SymmetrizeParams(FunctionParams):
    profile_samples: int = Field(default=400, ge=2)


class VariationParams(FunctionParams):
    quantization_levels: list[int] = Field(default_factory=lambda: [2, 4, 8, 16, 32, 64, 128, 256])


class HeatParams(FunctionParams):
    step: float = Field(default=1e-3, gt=0)
    nsteps: int = Field(default=50, ge=1)
    c: float = 0.0


class SolveSphereParams(_Params):
    preset: Literal["harmonic", "bump-pair", "transported-plane"] = "bump-pair"
    degree: int = Field(default=1, ge=1, le=2)
    axis: list[float] = Field(default_factory=lambda: [0.0, 0.0, 1.0])
    radius: float = Field(default=0.3, gt=0)
    mass: float = Field(default=1.0, gt=0)
    p: float = Field(default=2.0, gt=1)
    normalization: Literal["zero-mean", "median"] = "median"
    qs: list[float] = Field(default_factory=lambda: [2.0, 4.0])
    # transported-plane preset
    points: list[list[float]] = Field(default_factory=lambda: [[-1.0, 0.0], [1.0, 0.0]])
    charges: list[float] = Field(default_factory=lambda: [1.0, -1.0])
    mollifier_radius: float = Field(default=0.1, gt=0)

    @field_validator("qs")
    @classmethod
    def _qs_above_one(cls, qs: list[float]) -> list[float]:
        if any(q <= 1 for q in qs):
            raise ValueError("every q must exceed 1")
        return qs


class DiracParams(_Params):
    points: list[list[float]] = Field(default_factory=lambda: [[-1.0, 0.0], [1.0, 0.0]])
    charges: list[float] = Field(default_factory=lambda: [1.0, -1.0])
    mollifier_radius: float = Field(default=0.1, gt=0)
    domain_radius: float = Field(default=5.0, gt=0)
    grid_size: int = Field(default=101, ge=3)
    plane_subdivisions: int = Field(default=6, ge=0, le=8)
    # single-charge radial profile written next to the plane solve
    radial_p: float = Field(default=2.0, gt=1)
    radial_n: int = Field(default=2, ge=2)
    radial_gamma: float = 1.0
    radial_R: float = Field(default=10.0, gt=0)
    radial_bc: Literal["decay", "dirichlet"] = "dirichlet"

    @model_validator(mode="after")
    def _check_problem(self) -> "DiracParams":
        """Reject pole layouts and radial parameters the solvers would refuse, before any write."""
        try:
            dirac_plane.DiracProblem(
                points=self.points,
                charges=self.charges,
                mollifier_radius=self.mollifier_radius,
                domain_radius=self.domain_radius,
            )
            dirac_plane.check_radial_parameters(
                self.radial_p, self.radial_n, self.radial_gamma, self.mollifier_radius, self.radial_R, self.radial_bc
            )
            if self.radial_p < self.radial_n:
                dirac_plane.check_weighted_lq_parameters(
                    self.radial_p, self.radial_n, WEIGHTED_LQ_EXPONENT, self.mollifier_radius, WEIGHTED_LQ_RADII
                )
        except (ValueError, SpheresymError) as exc:
            raise ValueError(str(exc)) from exc
        return self


class VerifyParams(_Params):
    plane_subdivisions: int = Field(default=6, ge=0, le=8)
    samples: int = Field(default=100, ge=1)


PARAMS_BY_COMMAND: dict[str, type[_Params]] = {
    "mesh": MeshParams,
    "symmetrize": SymmetrizeParams,
    "variation": VariationParams,
    "heat": HeatParams,
    "solve-sphere": SolveSphereParams,
    "dirac": DiracParams,
    "verify": VerifyParams,
}


# -----------------------------
# Run configuration
# -----------------------------

class RunConfig(BaseModel):
    """One CLI run: command, mesh level, seed, output directory and command parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command
    mesh_subdivisions: int = Field(default=4, ge=0, le=8)
    seed: int = 42
    output_dir: Path = DEFAULT_OUTPUT_DIR
    tolerance_scale: float = Field(default=1.0, gt=0)
    params: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        PARAMS_BY_COMMAND[self.command].model_validate(self.params)
        _check_writable(self.output_dir)
        return self

    def command_params(self) -> Any:
        """The parameter block parsed into the model for ``command``."""
        return PARAMS_BY_COMMAND[self.command].model_validate(self.params)


def _check_writable(path: Path) -> None:
    """Require ``path`` to be a directory, or creatable inside a writable ancestor."""
    path = Path(path)
    if path.exists():
        if not path.is_dir():
            raise ValueError(f"output_dir {path} exists and is not a directory")
        if not os.access(path, os.W_OK):
            raise ValueError(f"output_dir {path} is not writable")
        return
    ancestor = path.parent
    while not ancestor.exists() and ancestor != ancestor.parent:
        ancestor = ancestor.parent
    if not ancestor.is_dir() or not os.access(ancestor, os.W_OK):
        raise ValueError(f"output_dir {path} cannot be created under {ancestor}")


def load_config(path: Optional[str] = None, **overrides: Any) -> RunConfig:
    """Read a JSON config (optional) and apply non-``None`` overrides.

    Raises
    ------
    ConfigError
        If the file is unreadable, is not a JSON object, or fails validation.
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
