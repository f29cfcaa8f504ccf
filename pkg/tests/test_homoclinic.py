"""Tests for the singular homoclinic skeleton and the splitting locator."""

import numpy as np
import pytest

from fhnwave import fast_layer, homoclinic, model
from fhnwave.model import DomainError


def test_double_het_point_value():
    p_star, s = homoclinic.double_het_point()
    assert s == 0.0
    assert abs(p_star - (-0.246016)) < 1e-4


def test_double_het_point_defining_relation():
    p_star, _ = homoclinic.double_het_point()
    x1s = model.equilibrium_x1(p_star)
    assert abs(x1s - (p_star - fast_layer.double_het_pbar())) < 1e-10


def test_upper_connection_speed_regression():
    conn = homoclinic.upper_connection(0.05)
    assert abs(conn.s - 1.5032648263708488) < 1e-6
    assert abs(conn.section_gap) < 1e-8


def test_no_singular_homoclinics_between_folds():
    for p in (homoclinic.P_MINUS + 0.01, 0.2, homoclinic.P_PLUS - 0.01):
        with pytest.raises(DomainError):
            homoclinic.upper_connection(p)


def test_upper_curve_monotone_speed():
    branch = homoclinic.singular_upper_curve(n=8)
    s_col = branch.column("s")
    assert len(branch) == 8
    assert all(b > a for a, b in zip(s_col, s_col[1:]))


def test_return_height_grows_with_speed():
    ps = (-0.2, -0.1, 0.0, 0.03, 0.05)
    speeds, heights = [], []
    for p in ps:
        conn = homoclinic.upper_connection(p)
        speeds.append(conn.s)
        heights.append(homoclinic.return_height_at(p, conn.s))
    assert all(b > a for a, b in zip(speeds, speeds[1:]))
    assert all(b > a for a, b in zip(heights, heights[1:]))


def test_return_curves_ordered_by_height():
    # larger return offset v -> higher speed curve (top to bottom:
    # v = 0.125, 0.12, 0.115)
    p_probe = 0.03
    speeds = [homoclinic.return_connection(p_probe, v).s
              for v in (0.125, 0.12, 0.115)]
    assert speeds[0] > speeds[1] > speeds[2]


def test_singular_fast_wave_intersection():
    wave = homoclinic.singular_fast_wave(0.125)
    assert wave.kind == "fast-wave"
    assert abs(wave.up_connection.section_gap) < 1e-8
    assert abs(wave.down_connection.section_gap) < 1e-8
    assert abs(wave.up_connection.s - wave.down_connection.s) < 1e-7
    # fast-wave return height sits between the equilibrium and the fold
    x1s = model.equilibrium_x1(wave.p)
    assert x1s < x1s + wave.v < model.nullcline(model.X_PLUS, wave.p)


def test_escape_side_deterministic():
    sides = {homoclinic.escape_side(0.05, 0.5, 0.01) for _ in range(3)}
    assert sides == {1}
    assert homoclinic.escape_side(0.05, 1.0, 0.01) == -1


def test_locate_c_curve_fields():
    pt = homoclinic.locate_c_curve(0.05, 0.01)
    assert 0.1 < pt.s1 < 0.9
    assert 0.9 < pt.s2 < 1.5
    assert 0.0 < pt.s1 < pt.s2
    assert pt.bracket_width <= 1e-12


def test_locate_c_curve_reports_flip_count():
    with pytest.raises(DomainError, match="found"):
        homoclinic.locate_c_curve(-0.15, 0.01)


def test_trace_c_curve_records_failures_and_continues():
    branch = homoclinic.trace_c_curve(0.01, [-0.15, 0.05],
                                      bracket_tol=1e-10)
    assert len(branch) == 1
    assert len(branch.meta["failures"]) == 1
    assert branch.meta["failures"][0][0] == -0.15


def test_singular_diagram_structure():
    diagram = homoclinic.assemble_singular_diagram(n_curve=8)
    assert diagram.B[0] == diagram.C[0]  # B and C share the abscissa p_-
    assert diagram.A[1] == 0.0 and diagram.B[1] == 0.0
    assert diagram.C[1] > 1.5
    assert diagram.segment_ab[0] == diagram.A
    assert abs(diagram.curve_ac[0][0] - diagram.A[0]) < 1e-12
    assert diagram.curve_ac[-1] == diagram.C
    # JSON round trip
    import json
    doc = json.loads(json.dumps(diagram.to_dict()))
    assert doc["A"][0] == diagram.A[0]


def test_diagram_symmetry_mirror():
    diagram = homoclinic.assemble_singular_diagram(n_curve=6)
    p_minus, p_plus = model.slow_fold_params()
    _, mirrored = model.symmetry_transform(np.zeros(3), diagram.B[0])
    assert abs(mirrored - p_plus) < 1e-12
    asym = diagram.hopf_asymptotes
    _, mirrored_asym = model.symmetry_transform(np.zeros(3), asym["p_minus"])
    assert abs(mirrored_asym - asym["p_plus"]) < 1e-12
