"""Brute-force solver for the scalar Volterra integro-differential equations.

Every closed form in this package is the solution of

    mu'(tau) = -c * int_0^tau K(s) mu(tau - s) ds,    mu(0) = 1,

for one of three kernels. This module integrates the equation directly on a
uniform grid: trapezoidal quadrature for the convolution, Heun
predictor-corrector in time. It deliberately does not reduce the exponential
kernel to an auxiliary ODE, and it imports nothing from the closed-form
modules.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

DIVERGENCE_LIMIT = 1e6


class VolterraDivergence(ArithmeticError):
    pass


class VolterraForm(str, enum.Enum):
    POST_MARKOVIAN = "post-markovian"
    MEMORY_KERNEL = "memory-kernel"
    EXACT_AMPLITUDE = "exact-amplitude"


@dataclass(frozen=True)
class VolterraProblem:
    """One damping-basis channel.

    ``lam`` is the (nonpositive) Liouvillian eigenvalue and ``gamma`` the kernel
    rate, so the dimensionless ratio is ``a = |lam|/gamma``. For
    ``EXACT_AMPLITUDE`` pass the population eigenvalue ``-gamma0``; the
    amplitude equation then carries the coefficient ``a/2``.

    Accuracy claims assume ``h <= 1e-2``.
    """

    lam: float
    gamma: float
    form: VolterraForm
    h: float = 1e-3
    tau_max: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "form", VolterraForm(self.form))
        if self.lam > 0:
            raise ValueError(f"lam must be <= 0, got {self.lam!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma!r}")
        if not self.h > 0:
            raise ValueError(f"h must be > 0, got {self.h!r}")
        if self.tau_max < 0:
            raise ValueError(f"tau_max must be >= 0, got {self.tau_max!r}")
        n = self.tau_max / self.h
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ValueError("tau_max must be an integer multiple of h")

    @property
    def a(self) -> float:
        return abs(self.lam) / self.gamma

    @property
    def steps(self) -> int:
        return int(round(self.tau_max / self.h))

    def with_step(self, h: float) -> "VolterraProblem":
        return VolterraProblem(self.lam, self.gamma, self.form, h, self.tau_max)

    def coefficient_and_kernel(self, s):
        """Prefactor ``c`` and kernel samples ``K(s)`` in dimensionless time."""
        a = self.a
        if self.form is VolterraForm.POST_MARKOVIAN:
            # k(t') exp(lambda t') from the Markovian propagation inside the integral
            return a, np.exp(-s) * np.exp(-a * s)
        if self.form is VolterraForm.MEMORY_KERNEL:
            return a, np.exp(-s)
        return 0.5 * a, np.exp(-s)


@dataclass(frozen=True)
class OracleSolution:
    tau: np.ndarray
    values: np.ndarray
    max_step_error_estimate: float

    @property
    def samples(self):
        return list(zip(self.tau.tolist(), self.values.tolist()))

    def at(self, tau):
        """Linear interpolation onto arbitrary times inside the grid."""
        return np.interp(tau, self.tau, self.values)


def solve(problem: VolterraProblem) -> OracleSolution:
    n = problem.steps
    h = problem.h
    tau = h * np.arange(n + 1)
    coef, K = problem.coefficient_and_kernel(tau)
    mu = np.empty(n + 1)
    mu[0] = 1.0
    if n == 0:
        return OracleSolution(tau, mu, 0.0)

    # F_m = -coef * h * [K0/2 mu_m + sum_{j=1}^{m-1} K_j mu_{m-j} + K_m/2 mu_0]
    endpoint = -coef * h * 0.5 * K[0]
    f_prev = 0.0
    worst = 0.0
    for m in range(1, n + 1):
        history = 0.5 * K[m] * mu[0]
        if m > 1:
            history += np.dot(K[1:m], mu[m - 1 : 0 : -1])
        history *= -coef * h
        pred = mu[m - 1] + h * f_prev
        corr = mu[m - 1] + 0.5 * h * (f_prev + history + endpoint * pred)
        if not abs(corr) <= DIVERGENCE_LIMIT:
            raise VolterraDivergence(f"solution left |mu| <= {DIVERGENCE_LIMIT:g} at tau={tau[m]:.6g}")
        worst = max(worst, abs(corr - pred))
        mu[m] = corr
        f_prev = history + endpoint * corr
    return OracleSolution(tau, mu, worst)


def richardson_check(problem: VolterraProblem) -> float:
    """Observed convergence order from runs at ``h``, ``h/2`` and ``h/4``.

    Differences are taken on the coarse grid. Returns ``math.inf`` when the
    solution is reproduced exactly at every step size (e.g. ``lam = 0``).
    """
    runs = [solve(problem.with_step(problem.h / k)) for k in (1, 2, 4)]
    coarse = [r.values[:: k] for r, k in zip(runs, (1, 2, 4))]
    e1 = np.abs(coarse[0] - coarse[1]).max()
    e2 = np.abs(coarse[1] - coarse[2]).max()
    if e2 == 0.0:
        return math.inf if e1 == 0.0 else math.nan
    return math.log2(e1 / e2)
