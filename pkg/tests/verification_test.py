import math

import numpy as np

from spheresym.verification import (
    Check,
    VerificationReport,
    _check,
    check_coarea,
    check_fundamental_solutions,
    check_geometry,
    check_hardy_littlewood,
    check_polya_szego,
    check_radial,
    check_rearrangement_laws,
    run_checks,
)

# ----------------------------
# Records
# ----------------------------

def test_check_pass_rule():
    assert _check("a", "anchor", 1.0, 1.0, 0.0).passed
    assert _check("b", "anchor", 1.05, 1.0, 0.1).passed
    assert not _check("c", "anchor", 1.2, 1.0, 0.1).passed
    assert not _check("d", "anchor", math.nan, 1.0, 0.1).passed


def test_check_record_keys():
    record = _check("coarea_identity", "V(u) = int P(u > t) dt", 0.0, 0.0, 1e-10, "abc").to_dict()
    assert set(record) == {"check", "anchor", "value_left", "value_right", "tolerance", "pass", "inputs_digest"}
    assert record["check"] == "coarea_identity"
    assert record["pass"] is True


def test_report_summary():
    report = VerificationReport([Check("x", "a", 0.0, 0.0, 0.0, True), Check("y", "a", 1.0, 0.0, 0.0, False)])
    assert report.summary == {"total": 2, "passed": 1, "failed": 1}
    assert not report.all_passed
    assert len(report.to_dict()["checks"]) == 2

# ----------------------------
# Check groups
# ----------------------------

def test_measure_groups_pass(mesh3):
    rng = np.random.default_rng(42)
    checks = (
        check_coarea(mesh3, rng, 5, 1.0)
        + check_rearrangement_laws(mesh3, rng, 5, 1.0)
        + check_hardy_littlewood(mesh3, rng, 5, 1.0)
    )
    assert all(c.passed for c in checks), [c.check_id for c in checks if not c.passed]
    assert checks[0].inputs_digest


def test_geometry_group_passes(mesh3, mesh5):
    checks = check_geometry(mesh3, mesh5, np.random.default_rng(0), 1.0)
    assert all(c.passed for c in checks), [c.check_id for c in checks if not c.passed]


def test_symmetrization_margins_shrink_under_refinement(mesh3, mesh4):
    checks = {c.check_id: c for c in check_polya_szego(mesh3, np.random.default_rng(5), 4, 1.0, refined=mesh4)}
    assert checks["perimeter_complement"].value_left == 0.0
    for name in ("symmetrization_variation_refined", "symmetrization_perimeter_refined"):
        assert checks[name].passed
        assert "subdivisions 4" in checks[name].anchor


def test_rearrangement_rows_have_distinct_anchors(mesh3):
    checks = check_rearrangement_laws(mesh3, np.random.default_rng(1), 3, 1.0)
    assert len({c.anchor for c in checks}) == len(checks)


def test_analytic_groups_pass():
    checks = check_fundamental_solutions(1.0) + check_radial(1.0)
    assert all(c.passed for c in checks), [c.check_id for c in checks if not c.passed]
    assert all(c.anchor for c in checks)


def test_full_suite_passes(mesh4, mesh6):
    report = run_checks(seed=42, samples=5, mesh=mesh4, plane_mesh=mesh6)
    failed = [c.check_id for c in report.checks if not c.passed]
    assert report.all_passed, failed
    ids = [c.check_id for c in report.checks]
    assert len(ids) == len(set(ids))
    expected = {
        "coarea_identity",
        "lower_semicontinuity",
        "hardy_littlewood",
        "rearrange_equimeasurable",
        "rearrange_negated_indicator",
        "rearrange_sup_coupling",
        "perimeter_complement",
        "symmetrization_variation_refined",
        "symmetrization_perimeter_refined",
        "mesh_area_partition",
        "cap_round_trip",
        "stereographic_round_trip",
        "transport_mass_gaussian",
        "transport_mass_disc",
        "decay_exponential",
        "dipole_pipeline",
        "weighted_lq_inequality",
    }
    assert expected <= set(ids)
    assert len({c.anchor for c in report.checks}) == len(report.checks)
