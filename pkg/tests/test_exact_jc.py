import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from nmqubit.exact_jc import (
    LorentzianBath,
    correlation_kernel_closed,
    correlation_kernel_quadrature,
    exact_amplitude,
    exact_excited_population,
    exact_map,
    spectral_density,
)
from nmqubit.volterra import VolterraProblem, solve

# frozen from 30-digit mpmath evaluation
DEGENERATE_POP = 0.54134113294645077  # 4 exp(-2)
DEGENERATE_AMP = 0.73575888234288464  # 2 exp(-1)
R5_FIRST_ZERO = 1.2616979207943592  # (2/3)(pi - arctan 3)
AMP_0125_AT_4 = 0.82226342390180952

BATHS = [LorentzianBath(10.0, 1.0, 1.0), LorentzianBath(3.0, 0.4, 2.5), LorentzianBath(0.0, 5.0, 0.1)]


@pytest.mark.parametrize("bath", BATHS)
def test_spectral_density_shape(bath):
    peak = spectral_density(bath, bath.omega0)
    assert peak == pytest.approx(bath.gamma0_bar / math.pi, rel=1e-15)
    for side in (-1, 1):
        assert spectral_density(bath, bath.omega0 + side * bath.lambda_bar) == pytest.approx(0.5 * peak, rel=1e-15)


@pytest.mark.parametrize("bath", BATHS)
def test_spectral_density_normalization(bath):
    total, _ = quad(lambda w: spectral_density(bath, w), -np.inf, np.inf, epsabs=0, epsrel=1e-12)
    assert total == pytest.approx(bath.gamma0_bar * bath.lambda_bar, rel=1e-9)


def test_bath_validation_and_conversion():
    with pytest.raises(ValueError):
        LorentzianBath(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        LorentzianBath(1.0, -1.0, 1.0)
    b = LorentzianBath(7.0, 0.6, 0.3)
    p = b.to_bath_params()
    assert (p.gamma0, p.gamma, p.N) == (0.6, 0.3, 0.0)
    assert p.R == pytest.approx(b.R)


def test_closed_kernel():
    b = LorentzianBath(5.0, 0.7, 2.0)
    assert correlation_kernel_closed(b, 0.0) == pytest.approx(1.4)
    assert correlation_kernel_closed(b, 0.5) == pytest.approx(1.4 / math.e, rel=1e-15)
    with pytest.raises(ValueError):
        correlation_kernel_closed(b, -0.1)
    with pytest.raises(ValueError):
        correlation_kernel_quadrature(b, -0.1)


@pytest.mark.parametrize("bath", BATHS)
def test_quadrature_kernel_matches_closed_form(bath):
    scale = bath.gamma0_bar * bath.lambda_bar
    for u in np.linspace(0, 10, 41):
        t = u / bath.lambda_bar
        k = correlation_kernel_quadrature(bath, t)
        exact = correlation_kernel_closed(bath, t)
        assert abs(k.real - exact.real) <= 1e-6 * abs(exact)
        assert abs(k.imag) <= 1e-8 * scale


def test_quadrature_kernel_examples():
    b = LorentzianBath(1.0, 1.0, 1.0)
    assert correlation_kernel_quadrature(b, 0.0).real == pytest.approx(1.0, rel=1e-6)
    assert correlation_kernel_quadrature(b, 3.0).real == pytest.approx(math.exp(-3), rel=1e-6)
    # without the analytic tail the window alone is short by about 2/(pi L)
    assert abs(correlation_kernel_quadrature(b, 0.0).real - 1.0) < 1e-8


def test_quadrature_of_silent_bath():
    b = LorentzianBath(1.0, 0.0, 1.0)
    assert correlation_kernel_quadrature(b, 2.0) == 0j
    assert correlation_kernel_closed(b, 2.0) == 0j


def test_population_examples():
    assert exact_excited_population(0.7, 0.0, 0.3) == 0.3
    assert abs(exact_excited_population(0.5, 2.0) - DEGENERATE_POP) < 1e-15
    assert abs(exact_amplitude(0.5, 2.0) - DEGENERATE_AMP) < 1e-15
    assert abs(exact_amplitude(0.125, 4.0) - AMP_0125_AT_4) < 1e-15
    assert exact_amplitude(3.0, 0.0) == 1.0


def test_first_zero_at_strong_coupling():
    root = brentq(lambda t: float(exact_amplitude(5.0, t)), 0.5, 2.0, xtol=1e-15)
    assert abs(root - R5_FIRST_ZERO) < 1e-12
    assert exact_excited_population(5.0, R5_FIRST_ZERO) < 1e-30


def test_zero_initial_slope():
    h = 1e-6
    for R in (0.05, 0.5, 5.0):
        slope = (-3 * exact_amplitude(R, 0.0) + 4 * exact_amplitude(R, h) - exact_amplitude(R, 2 * h)) / (2 * h)
        assert abs(slope) < 1e-8


def test_input_validation():
    with pytest.raises(ValueError):
        exact_excited_population(0.5, 1.0, 1.2)
    with pytest.raises(ValueError):
        exact_excited_population(0.5, 1.0, -0.1)
    with pytest.raises(ValueError):
        exact_excited_population(0.5, -1.0)
    with pytest.raises(ValueError):
        exact_amplitude(-0.5, 1.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 50), st.floats(0, 60), st.floats(0, 1))
def test_population_nonnegative(R, tau, p0):
    assert exact_excited_population(R, tau, p0) >= -1e-15


@pytest.mark.parametrize("R", [0.0, 0.05, 0.2, 0.4, 0.5])
def test_monotone_decay_below_onset(R):
    tau = np.arange(0, 20.0001, 1e-2)
    assert np.all(np.diff(exact_excited_population(R, tau)) <= 1e-15)


@pytest.mark.parametrize("R", [0.505, 0.6, 1.0, 5.0, 40.0])
def test_zeros_exist_above_onset(R):
    w = math.sqrt(2 * R - 1)
    hi = 4 * math.pi / w
    tau = np.linspace(0, hi, 20001)
    c = exact_amplitude(R, tau)
    k = int(np.flatnonzero(c < 0)[0])
    root = brentq(lambda t: float(exact_amplitude(R, t)), tau[k - 1], tau[k], xtol=1e-14)
    assert exact_excited_population(R, root) < 1e-6


@pytest.mark.parametrize("R", [0.05, 0.3, 0.5])
def test_no_zeros_below_onset(R):
    tau = np.linspace(0, 60, 6001)
    assert np.all(exact_amplitude(R, tau) > 0)


@pytest.mark.parametrize("R", [0.05, 0.125, 0.5, 1.0, 5.0])
def test_amplitude_satisfies_its_integro_differential_equation(R):
    # discretize both sides of dc/dtau = -(R/2) int_0^tau exp(-(tau - s)) c(s) ds at step 1e-3
    h = 1e-3
    tau = np.arange(0, 10 + h / 2, h)
    c = exact_amplitude(R, tau)
    lhs = np.gradient(c, h, edge_order=2)
    # trapezoid convolution via the recursion I_{n+1} = e^{-h} I_n + h/2 (e^{-h} c_n + c_{n+1})
    decay = math.exp(-h)
    conv = np.zeros_like(tau)
    for n in range(len(tau) - 1):
        conv[n + 1] = decay * conv[n] + 0.5 * h * (decay * c[n] + c[n + 1])
    rhs = -0.5 * R * conv
    assert np.abs(lhs - rhs).max() < 1e-6


@pytest.mark.parametrize("R", [0.05, 0.125, 0.5, 1.0, 5.0])
def test_matches_volterra_amplitude_oracle(R):
    sol = solve(VolterraProblem(-R, 1.0, "exact-amplitude", 1e-3, 10.0))
    assert np.abs(exact_amplitude(R, sol.tau) - sol.values).max() < 1e-6
    assert np.abs(exact_excited_population(R, sol.tau) - sol.values**2).max() < 1e-6


def test_exact_map():
    m = exact_map(0.5, 2.0)
    assert m.xi_perp == pytest.approx(DEGENERATE_AMP, abs=1e-15)
    assert m.xi_z == pytest.approx(DEGENERATE_POP, abs=1e-15)
    assert m.wz_fixed == -1.0
    assert exact_map(1.0, 0.0).xi_z == 1.0
