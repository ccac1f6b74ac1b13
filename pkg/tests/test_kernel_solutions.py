import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmqubit.damping_basis import BathParams, markovian_map
from nmqubit.kernel_solutions import (
    CoherenceArgMode,
    _pm_series,
    _pm_two_exp,
    memory_kernel_branch,
    memory_kernel_map,
    post_markovian_branch,
    post_markovian_map,
    r_of,
    xi_markovian,
    xi_memory_kernel,
    xi_post_markovian,
    xi_post_markovian_eq5,
)
from nmqubit.qubit_state import AffineBlochMap
from nmqubit.special import Branch
from nmqubit.volterra import VolterraProblem, solve

# frozen from 30-digit mpmath evaluation of the two-exponential / cos-sin expressions
PM_HALF_AT_1 = 0.8451818782538245
PM_TWO_AT_1 = 0.600423599106272
THREE_EXP_M2 = 0.40600584970983811
MK_005_AT_1 = 0.9816771188098161
MK_R1_FIRST_ZERO = 2.4183991523122905  # 4 pi / (3 sqrt 3)
MK_R5_ARGMIN = 1.4414615682913359  # 2 pi / sqrt(19), where xi' = -a e^{-tau/2} sin(w tau)/w vanishes
MK_R5_MIN = -0.48639667507071088  # -exp(-pi/sqrt 19)


def test_r_of():
    assert r_of(1.0) == 1.0
    assert r_of(0.0) == 0.0
    assert abs(r_of(5.0) - 20 / 36) < 1e-15


@pytest.mark.parametrize("xi", [xi_post_markovian, xi_post_markovian_eq5, xi_memory_kernel])
@pytest.mark.parametrize("a", [0.0, 0.1, 0.25, 1.0, 3.0, 80.0])
def test_identity_at_origin(xi, a):
    assert xi(a, 0.0) == 1.0


def test_post_markovian_values():
    assert abs(xi_post_markovian(0.5, 1.0) - PM_HALF_AT_1) < 1e-15
    assert abs(xi_post_markovian(1.0, 2.0) - THREE_EXP_M2) < 1e-15
    assert abs(xi_post_markovian_eq5(2.0, 1.0) - PM_TWO_AT_1) < 1e-14
    assert abs(xi_post_markovian_eq5(0.5, 1.0) - xi_post_markovian(0.5, 1.0)) < 1e-12
    assert np.abs(xi_post_markovian_eq5(0.0, np.linspace(0, 30, 31)) - 1.0).max() < 1e-15


def test_memory_kernel_values():
    assert abs(xi_memory_kernel(0.05, 1.0) - MK_005_AT_1) < 1e-15
    assert abs(xi_memory_kernel(1.0, MK_R1_FIRST_ZERO)) < 1e-15


def test_memory_kernel_r5_minimum_by_dense_grid_and_golden_section():
    tau = np.linspace(0, 10, 100_001)
    vals = xi_memory_kernel(5.0, tau)
    k = int(np.argmin(vals))
    lo, hi = tau[k - 1], tau[k + 1]
    g = (math.sqrt(5) - 1) / 2
    while hi - lo > 1e-12:
        c, d = hi - g * (hi - lo), lo + g * (hi - lo)
        if xi_memory_kernel(5.0, c) < xi_memory_kernel(5.0, d):
            hi = d
        else:
            lo = c
    t_min = 0.5 * (lo + hi)
    assert abs(t_min - MK_R5_ARGMIN) < 1e-6
    assert abs(xi_memory_kernel(5.0, t_min) - MK_R5_MIN) < 1e-12


def test_rejects_negative_inputs():
    for xi in (xi_post_markovian, xi_post_markovian_eq5, xi_memory_kernel, xi_markovian):
        with pytest.raises(ValueError):
            xi(0.5, -1e-9)
        with pytest.raises(ValueError):
            xi(-0.1, 1.0)


def test_branch_selection():
    assert memory_kernel_branch(0.1).branch is Branch.HYPERBOLIC
    assert memory_kernel_branch(0.25).branch is Branch.DEGENERATE
    assert memory_kernel_branch(0.3).branch is Branch.TRIGONOMETRIC
    for a in np.concatenate([np.linspace(0, 100, 2001), 1 + np.logspace(-15, -1, 30), 1 - np.logspace(-15, -1, 30)]):
        assert post_markovian_branch(a).branch is not Branch.TRIGONOMETRIC
    assert post_markovian_branch(1.0).branch is Branch.DEGENERATE


def test_r_never_exceeds_one():
    a = np.linspace(0, 1e3, 1_000_001)
    r = r_of(a)
    assert np.all(r <= 1.0)
    assert np.all(r[a != 1.0] < 1.0)


def _one_sided_slope(xi, a, h=1e-6):
    return (-3 * xi(a, 0.0) + 4 * xi(a, h) - xi(a, 2 * h)) / (2 * h)


@pytest.mark.parametrize("a", [0.05, 0.25, 0.5, 1.0, 2.0, 5.0])
def test_zero_initial_slope(a):
    assert abs(_one_sided_slope(xi_post_markovian, a)) < 1e-8
    assert abs(_one_sided_slope(xi_memory_kernel, a)) < 1e-8
    assert _one_sided_slope(xi_markovian, a) == pytest.approx(-a, rel=1e-6)


def test_cosh_sinh_form_equivalence_grid():
    a_grid = np.concatenate([np.linspace(0.01, 10, 400), [1 - 1e-3, 1 + 1e-3]])
    tau = np.linspace(0, 20, 401)
    A, T = np.meshgrid(a_grid, tau)
    assert np.abs(xi_post_markovian_eq5(A, T) - xi_post_markovian(A, T)).max() <= 1e-11


def test_degenerate_band_series_continuity():
    tau = np.linspace(0, 30, 3001)
    for eps in (1e-8, -1e-8):
        series = _pm_series(eps, tau)
        two_exp = _pm_two_exp(1 - eps, tau)
        assert np.abs(series - two_exp).max() <= 1e-10
    # the band edge is seamless too
    inside = xi_post_markovian(1 + 0.999e-9, tau)
    outside = xi_post_markovian(1 + 1.001e-9, tau)
    assert np.abs(inside - outside).max() <= 1e-12


def test_memory_kernel_degenerate_band_continuity():
    tau = np.linspace(0, 30, 3001)
    at = xi_memory_kernel(0.25, tau)
    assert np.abs(at - np.exp(-tau / 2) * (1 + tau / 2)).max() < 1e-15
    for da in (2e-10, 5e-10, 1e-6):
        for a in (0.25 - da, 0.25 + da):
            # shift is first order in da with coefficient below 1 on this range
            assert np.abs(xi_memory_kernel(a, tau) - at).max() <= 4 * da


def test_post_markovian_bounds_randomized():
    rng = np.random.default_rng(2024)
    a = rng.uniform(0, 100, 100_000)
    a[a == 0] = 1e-300
    tau = rng.uniform(0, 50, 100_000)
    xi = xi_post_markovian(a, tau)
    assert np.all(xi >= 0.0) and np.all(xi <= 1.0)


@settings(max_examples=500, deadline=None)
@given(st.floats(1e-6, 0.999), st.floats(0, 200))
def test_markovian_limit_bound(a, tau):
    d = xi_post_markovian(a, tau) - math.exp(-a * tau)
    assert -1e-15 <= d <= a / (1 - a) + 1e-15


def test_monotone_in_ratio():
    a = np.sort(np.concatenate([np.linspace(0, 20, 801), [1 - 1e-9, 1, 1 + 1e-9]]))
    for tau in np.linspace(0, 30, 61):
        vals = xi_post_markovian(a, tau)
        assert np.all(np.diff(vals) <= 1e-15)


def test_memory_kernel_sign_threshold():
    # the first zero for 4a = 1.01 sits near tau = 60.8, so the window must exceed 50
    tau = np.linspace(0, 100, 100_001)
    assert np.all(xi_memory_kernel(0.99 / 4, tau) > 0)
    assert np.all(xi_memory_kernel(0.25, tau) > 0)
    assert np.any(xi_memory_kernel(1.01 / 4, tau) < 0)


@pytest.mark.parametrize("a", [0.05, 0.25, 0.5, 1.0, 2.0, 5.0])
def test_against_volterra_oracle(a):
    pm = solve(VolterraProblem(-a, 1.0, "post-markovian", 1e-3, 10.0))
    mk = solve(VolterraProblem(-a, 1.0, "memory-kernel", 1e-3, 10.0))
    assert np.abs(xi_post_markovian(a, pm.tau) - pm.values).max() < 1e-6
    assert np.abs(xi_memory_kernel(a, mk.tau) - mk.values).max() < 1e-6


def test_oracle_values_at_examples():
    sol = solve(VolterraProblem(-0.5, 1.0, "post-markovian", 1e-3, 1.0))
    assert abs(sol.values[-1] - PM_HALF_AT_1) < 1e-6
    sol = solve(VolterraProblem(-1.0, 1.0, "post-markovian", 1e-3, 2.0))
    assert abs(sol.values[-1] - THREE_EXP_M2) < 1e-6
    sol = solve(VolterraProblem(-0.05, 1.0, "memory-kernel", 1e-3, 1.0))
    assert abs(sol.values[-1] - MK_005_AT_1) < 1e-6


def test_maps_at_origin_are_identity():
    for N in (0.0, 1.5):
        params = BathParams(0.7, 2.0, N)
        for mode in CoherenceArgMode:
            for build in (post_markovian_map, memory_kernel_map):
                assert build(params, 0.0, mode) == AffineBlochMap(1.0, 1.0, -1 / (2 * N + 1))


def test_map_assembly_uses_the_right_ratios():
    params = BathParams(gamma0=0.6, gamma=2.0, N=0.5)  # |lambda2| = 1.2, R = 0.6
    t = 0.9
    tau = params.gamma * t
    m = post_markovian_map(params, t)
    assert m.xi_z == xi_post_markovian(0.6, tau)
    assert m.xi_perp == xi_post_markovian(0.3, tau)
    m = post_markovian_map(params, t, CoherenceArgMode.PAPER_LITERAL)
    assert m.xi_perp == xi_post_markovian(1.2, tau)
    m = memory_kernel_map(params, t, "paper")
    assert m.xi_z == xi_memory_kernel(0.6, tau) and m.xi_perp == xi_memory_kernel(1.2, tau)
    assert m.wz_fixed == -0.5
    with pytest.raises(ValueError):
        memory_kernel_map(params, -1.0)


def test_zero_temperature_population_factor():
    params = BathParams.from_ratio(0.4)
    for t in (0.5, 2.0, 7.0):
        m = post_markovian_map(params, t)
        # excited-state population from P_e(0) = 1
        pe = 0.5 * (1 + m.wz_fixed + m.xi_z * (1 - m.wz_fixed))
        assert pe == pytest.approx(xi_post_markovian(0.4, t), abs=1e-15)


def test_small_ratio_recovers_markovian_rate():
    params = BathParams(0.01, 1.0)
    m = post_markovian_map(params, 10.0)
    assert abs(m.xi_z - math.exp(-0.1)) < 0.011
    # consistent mode reproduces the Markovian coherence rate in the same limit
    mm = markovian_map(params, 10.0)
    assert abs(m.xi_perp - mm.xi_perp) < 0.011
