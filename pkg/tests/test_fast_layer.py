"""Tests for the layer-problem heteroclinic machinery."""

import numpy as np
import pytest

from fhnwave import fast_layer, model
from fhnwave.integrate import IntegratorOptions, integrate
from fhnwave.model import DomainError


def test_double_het_pbar_closed_form():
    # the s = 0 double connection sits at the equal-potential level
    assert abs(fast_layer.double_het_pbar() - (-209.0 / 3375.0)) < 1e-12


def test_double_het_equal_hamiltonian_levels():
    pbar = fast_layer.double_het_pbar()
    x_l, _, x_r = model.fast_equilibria_x1(pbar)
    h_l = fast_layer.hamiltonian(np.array([x_l, 0.0]), pbar)
    h_r = fast_layer.hamiltonian(np.array([x_r, 0.0]), pbar)
    assert abs(h_l - h_r) < 1e-12


def test_double_het_shooting_gap():
    pbar = fast_layer.double_het_pbar()
    gap = fast_layer.shoot_heteroclinic(pbar, 0.0)
    assert abs(gap) < 1e-8


def test_hamiltonian_conserved_along_layer_orbit():
    pbar = -0.05
    x_l, _, _ = model.fast_equilibria_x1(pbar)
    eq = model.fast_equilibrium_info(x_l, 0.0)
    vu, _ = fast_layer.saddle_eigendirections(eq, 0.0, toward=1.0)
    y0 = np.array([x_l, 0.0]) + 1e-8 * vu
    opts = IntegratorOptions(rel_tol=1e-11, abs_tol=1e-13, max_time=60.0)
    traj = integrate(lambda t, y: model.fast_field(y, pbar, 0.0), y0,
                     (0.0, 60.0), opts)
    levels = np.array([fast_layer.hamiltonian(st, pbar)
                       for st in traj.states])
    assert np.max(np.abs(levels - levels[0])) < 1e-8


def test_gap_sign_change_brackets_connection():
    pbar = fast_layer.double_het_pbar()
    lo = fast_layer.shoot_heteroclinic(pbar + 1e-3, 0.4, direction="left-to-right")
    conn = fast_layer.find_het(direction="left-to-right", s=0.4,
                               scan=(pbar, model.PBAR_R - 1e-6))
    assert abs(conn.section_gap) < 1e-10
    assert conn.pbar > pbar  # positive speed shifts the connection right
    assert lo != 0.0


def test_find_het_requires_one_free_parameter():
    with pytest.raises(ValueError):
        fast_layer.find_het(pbar=-0.06, s=0.4)
    with pytest.raises(ValueError):
        fast_layer.find_het()


def test_saddle_eigendirection_orientation():
    pbar = -0.06
    x_l, _, x_r = model.fast_equilibria_x1(pbar)
    eq = model.fast_equilibrium_info(x_l, 0.5)
    vu, vs = fast_layer.saddle_eigendirections(eq, 0.5, toward=x_r)
    assert vu[0] > 0 and vs[0] > 0
    assert abs(np.linalg.norm(vu) - 1.0) < 1e-14


def test_no_connection_outside_band():
    with pytest.raises(DomainError):
        fast_layer.shoot_heteroclinic(model.PBAR_R + 0.01, 0.3)


def test_right_to_left_mirrors_left_to_right():
    # the involution pairs the two directions at mirrored pbar
    conn_lr = fast_layer.find_het(direction="left-to-right", s=0.5,
                                  scan=(fast_layer.double_het_pbar(),
                                        model.PBAR_R - 1e-6))
    conn_rl = fast_layer.find_het(direction="right-to-left", s=0.5,
                                  scan=(model.PBAR_L + 1e-6,
                                        fast_layer.double_het_pbar()))
    center = 0.5 * (model.PBAR_L + model.PBAR_R)
    assert abs((conn_lr.pbar - center) + (conn_rl.pbar - center)) < 1e-8


def test_continuation_short_segment():
    seed = fast_layer.find_het(direction="left-to-right", s=0.3,
                               scan=(fast_layer.double_het_pbar(),
                                     model.PBAR_R - 1e-6))
    branch = fast_layer.continue_het_curve(seed, step=0.05, extent=0.5)
    assert len(branch) >= 4
    s_col = branch.column("s")
    assert all(b > a for a, b in zip(s_col, s_col[1:]))


def test_degenerate_left_shot_runs():
    gap = fast_layer.shoot_heteroclinic(model.PBAR_R, 1.4,
                                        degenerate_left=True)
    assert np.isfinite(gap)
