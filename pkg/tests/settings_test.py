import json

import pytest

from spheresym.db.settings import (
    DEFAULT_OUTPUT_DIR,
    DiracParams,
    RunConfig,
    SolveSphereParams,
    SymmetrizeParams,
    load_config,
)
from spheresym.errors import ConfigError

# ----------------------------
# Defaults and overrides
# ----------------------------

def test_defaults():
    config = load_config(command="mesh")
    assert config.mesh_subdivisions == 4
    assert config.seed == 42
    assert config.tolerance_scale == 1.0
    assert config.output_dir == DEFAULT_OUTPUT_DIR


def test_none_overrides_are_ignored(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "symmetrize", "seed": 7, "output_dir": str(tmp_path / "out")}))
    config = load_config(str(path), seed=None, mesh_subdivisions=2)
    assert config.seed == 7
    assert config.mesh_subdivisions == 2


def test_command_params_are_typed(tmp_path):
    config = load_config(command="symmetrize", output_dir=str(tmp_path), params={"function": "cap", "area": 2.0})
    params = config.command_params()
    assert isinstance(params, SymmetrizeParams)
    assert params.function == "cap"
    assert params.profile_samples == 400


def test_dirac_defaults(tmp_path):
    params = load_config(command="dirac", output_dir=str(tmp_path)).command_params()
    assert isinstance(params, DiracParams)
    assert params.charges == [1.0, -1.0]
    assert params.radial_bc == "dirichlet"


def test_config_is_frozen(tmp_path):
    config = load_config(command="mesh", output_dir=str(tmp_path))
    with pytest.raises(Exception):
        config.seed = 3

# ----------------------------
# Validation failures
# ----------------------------

@pytest.mark.parametrize(
    "overrides",
    [
        {"command": "plot"},
        {"command": "mesh", "mesh_subdivisions": 9},
        {"command": "mesh", "tolerance_scale": 0.0},
        {"command": "mesh", "colour": "blue"},
        {"command": "symmetrize", "params": {"function": "spiral"}},
        {"command": "symmetrize", "params": {"area": 20.0}},
        {"command": "heat", "params": {"step": -1.0}},
        {"command": "solve-sphere", "params": {"qs": [1.0]}},
        {"command": "dirac", "params": {"mollifier_radius": 1.5}},
        {"command": "dirac", "params": {"radial_p": 1.5, "radial_n": 3}},
        {"command": "dirac", "params": {"radial_bc": "decay"}},
        {"command": "mesh", "params": {"unexpected": 1}},
        {},
    ],
)
def test_invalid_configuration(overrides, tmp_path):
    overrides.setdefault("output_dir", str(tmp_path))
    with pytest.raises(ConfigError):
        load_config(**overrides)


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_json_must_be_object(tmp_path):
    path = tmp_path / "list.json"
    path.write_text("[1, 2, 3]")
    with pytest.raises(ConfigError):
        load_config(str(path), command="mesh")


def test_output_dir_must_not_be_a_file(tmp_path):
    target = tmp_path / "taken"
    target.write_text("x")
    with pytest.raises(ConfigError):
        load_config(command="mesh", output_dir=str(target))


def test_nested_output_dir_is_accepted(tmp_path):
    config = load_config(command="mesh", output_dir=str(tmp_path / "a" / "b"))
    assert not config.output_dir.exists()


def test_run_config_direct_validation(tmp_path):
    config = RunConfig(command="solve-sphere", output_dir=tmp_path, params={"preset": "harmonic", "degree": 2})
    params = config.command_params()
    assert isinstance(params, SolveSphereParams)
    assert params.degree == 2
