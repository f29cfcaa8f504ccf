"""Tests for the model constants, fields, and equilibrium algebra."""

import math

import numpy as np
import pytest

from fhnwave import model
from fhnwave.model import DomainError, EquilibriumKind, ModelParams


def test_fold_points_exact():
    folds = model.fold_points()
    assert abs(folds.x_minus - (11.0 - math.sqrt(91.0)) / 30.0) < 1e-15
    assert abs(folds.x_plus - (11.0 + math.sqrt(91.0)) / 30.0) < 1e-15
    # folds are the critical points of the cubic
    assert abs(model.cubic_prime(folds.x_minus)) < 1e-14
    assert abs(model.cubic_prime(folds.x_plus)) < 1e-14


def test_fold_points_printed_values():
    assert abs(model.X_MINUS - 0.0487) < 1e-4
    assert abs(model.X_PLUS - 0.6846) < 1e-4


def test_slow_fold_params_identity():
    p_minus, p_plus = model.slow_fold_params()
    assert p_minus < p_plus
    assert abs(p_minus + p_plus - 2057.0 / 3375.0) < 1e-14
    assert abs(p_minus - model.equilibrium_p(model.X_MINUS)) < 1e-15
    assert abs(p_plus - model.equilibrium_p(model.X_PLUS)) < 1e-15


def test_equilibrium_p_inverts_equilibrium_x1():
    for p in (-0.3, -0.05, 0.0, 0.2, 0.5, 0.9):
        x1 = model.equilibrium_x1(p)
        assert abs(model.equilibrium_p(x1) - p) < 1e-12


def test_full_field_vanishes_at_equilibrium():
    for p in (-0.2, 0.05, 0.3, 0.7):
        info = model.full_equilibrium(p, s=0.9, eps=0.02)
        f = model.full_field(info.state, ModelParams(p, 0.9, 0.02))
        assert np.max(np.abs(f)) < 1e-13


def test_full_field_timescales_agree():
    params = ModelParams(0.05, 1.1, 0.01)
    state = np.array([0.2, -0.1, 0.15])
    fast = model.full_field(state, params, timescale="fast")
    slow = model.full_field(state, params, timescale="slow")
    assert np.allclose(fast, params.eps * slow, rtol=1e-14)


def test_full_jacobian_matches_finite_differences():
    params = ModelParams(0.1, 0.8, 0.02)
    state = np.array([0.3, 0.05, 0.2])
    J = model.full_jacobian(state, params)
    h = 1e-7
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        col = (model.full_field(state + e, params)
               - model.full_field(state - e, params)) / (2 * h)
        assert np.max(np.abs(col - J[:, j])) < 1e-6


def test_fast_jacobian_trace_is_s_over_5():
    for s in (0.0, 0.4, 1.3):
        A = model.fast_jacobian(0.2, s)
        assert abs(np.trace(A) - s / 5.0) < 1e-15


def test_fast_equilibria_count_boundaries():
    assert len(model.fast_equilibria_x1(0.5 * (model.PBAR_L + model.PBAR_R))) == 3
    assert len(model.fast_equilibria_x1(model.PBAR_R + 1e-3)) == 1
    assert len(model.fast_equilibria_x1(model.PBAR_L - 1e-3)) == 1


def test_fast_equilibria_near_saddle_node():
    # roots separated by ~1e-4 must still be resolved
    roots = model.fast_equilibria_x1(model.PBAR_R - 1e-8)
    assert len(roots) == 3
    for x in roots:
        assert abs(model.cubic(x) + (model.PBAR_R - 1e-8)) < 1e-12


def test_layer_saddles_and_center():
    pbar = -0.06
    infos = [model.fast_equilibrium_info(x, 0.0)
             for x in model.fast_equilibria_x1(pbar)]
    assert infos[0].kind == EquilibriumKind.SADDLE
    assert infos[1].kind == EquilibriumKind.FOLD_DEGENERATE  # neutral center at s = 0
    assert infos[2].kind == EquilibriumKind.SADDLE


def test_symmetry_is_involution():
    state = np.array([0.3, -0.2, 0.1])
    twice, p_twice = model.symmetry_transform(*model.symmetry_transform(state, 0.2))
    assert np.max(np.abs(twice - state)) < 1e-15
    assert abs(p_twice - 0.2) < 1e-15


def test_symmetry_equivariance():
    rng = np.random.default_rng(7)
    params = ModelParams(0.12, 0.7, 0.02)
    for _ in range(5):
        state = rng.normal(scale=0.5, size=3)
        t_state, t_p = model.symmetry_transform(state, params.p)
        f = model.full_field(state, params)
        g = model.full_field(t_state, ModelParams(t_p, params.s, params.eps))
        # the involution conjugates the flow to its time reversal
        assert np.max(np.abs(g + f)) < 1e-12


def test_symmetry_pairs_fold_params():
    p_minus, p_plus = model.slow_fold_params()
    _, paired = model.symmetry_transform(np.zeros(3), p_minus)
    assert abs(paired - p_plus) < 1e-14


def test_params_validation():
    with pytest.raises(DomainError):
        ModelParams(0.0, -1.0, 0.01)
    with pytest.raises(DomainError):
        ModelParams(0.0, 1.0, -0.01)


def test_nonfinite_state_rejected():
    with pytest.raises(DomainError):
        model.full_field(np.array([np.nan, 0.0, 0.0]), ModelParams(0.0, 1.0, 0.01))
