"""Closed-form decay factors for the two exponential-kernel master equations.

Each damping-basis component obeys a scalar Volterra equation whose Laplace
transform is rational, ``1/(s - lambda k~(s - lambda))`` for the
post-Markovian equation and ``1/(s - lambda k~(s))`` for the memory-kernel
equation, with ``k~(s) = gamma/(s + gamma)``. In units ``tau = gamma t`` and
``a = |lambda|/gamma`` the first denominator factors as ``(s + a)(s + 1)`` and
the second has roots ``(-1 +/- sqrt(1 - 4a))/2``.
"""
from __future__ import annotations

import enum

import numpy as np

from .damping_basis import BathParams, spectrum
from .qubit_state import AffineBlochMap
from .special import DEGENERATE_BAND, BranchInfo, classify, damped_bracket

# Outside this |1 - a| the plain two-exponential quotient has no harmful cancellation.
_EXPM1_WINDOW = 0.5


class CoherenceArgMode(str, enum.Enum):
    """Ratio fed to the coherence decay factor.

    CONSISTENT uses ``|lambda3|/gamma`` (half the population ratio), which is what
    the damping-basis inversion produces. PAPER_LITERAL uses ``2 |lambda2|/gamma``.
    """

    CONSISTENT = "consistent"
    PAPER_LITERAL = "paper"


def _check(a, tau):
    a = np.asarray(a, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(a < 0) or np.any(np.isnan(a)):
        raise ValueError("ratio a must be >= 0")
    if np.any(tau < 0) or np.any(np.isnan(tau)):
        raise ValueError("tau must be >= 0")
    return np.broadcast_arrays(a, tau)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def r_of(a):
    return 4.0 * np.asarray(a, dtype=float) / (1.0 + np.asarray(a, dtype=float)) ** 2


def xi_markovian(a, tau):
    a, tau = _check(a, tau)
    return _scalar(np.exp(-a * tau))


def _pm_series(eps, tau):
    # expansion of exp(-tau) (1 + (exp(eps tau) - 1)/eps) in eps = 1 - a
    return np.exp(-tau) * (1.0 + tau + eps * tau**2 / 2.0 + eps**2 * tau**3 / 6.0)


def _pm_two_exp(a, tau):
    """``(exp(-a tau) - a exp(-tau))/(1 - a)`` without the cancellation near a = 1."""
    a, tau = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(tau, dtype=float))
    eps = 1.0 - a
    out = np.empty(a.shape)
    near = (np.abs(eps) < _EXPM1_WINDOW) & (eps * tau < 700.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        e, t = eps[near], tau[near]
        out[near] = np.exp(-t) * (1.0 + np.expm1(e * t) / e)
        far = ~near
        aa, t = a[far], tau[far]
        out[far] = (np.exp(-aa * t) - aa * np.exp(-t)) / (1.0 - aa)
    return out


def post_markovian_branch(a: float) -> BranchInfo:
    return classify(1.0 - float(r_of(a)))


def xi_post_markovian(a, tau):
    """Post-Markovian decay factor ``(exp(-a tau) - a exp(-tau))/(1 - a)``.

    At ``a = 1`` the limit is ``(1 + tau) exp(-tau)``; within
    ``|1 - a| <= 1e-9`` a three-term series in ``1 - a`` is used. Broadcasts
    over ``a`` and ``tau``.
    """
    a, tau = _check(a, tau)
    eps = 1.0 - a
    deg = np.abs(eps) <= DEGENERATE_BAND
    out = np.empty(a.shape)
    out[deg] = _pm_series(eps[deg], tau[deg])
    out[~deg] = _pm_two_exp(a[~deg], tau[~deg])
    return _scalar(out)


def xi_post_markovian_eq5(a, tau):
    """The cosh/sinh representation with ``r(a) = 4a/(1+a)^2``; used to cross-check
    :func:`xi_post_markovian`.

    Since ``r(a) <= 1`` for every real ``a >= 0`` only the hyperbolic and degenerate
    branches are ever taken.
    """
    a, tau = _check(a, tau)
    disc = 1.0 - r_of(a)
    return _scalar(damped_bracket(disc, 0.5 * (a + 1.0) * tau))


def memory_kernel_branch(a: float) -> BranchInfo:
    return classify(1.0 - 4.0 * float(a))


def xi_memory_kernel(a, tau):
    """Memory-kernel decay factor.

    ``exp(-tau/2) [cosh(q tau/2) + sinh(q tau/2)/q]`` with ``q = sqrt(1 - 4a)``,
    oscillating (cos/sin) once ``4a > 1``.
    """
    a, tau = _check(a, tau)
    return _scalar(damped_bracket(1.0 - 4.0 * a, 0.5 * tau))


def coherence_ratio(params: BathParams, mode=CoherenceArgMode.CONSISTENT) -> float:
    mode = CoherenceArgMode(mode)
    spec = spectrum(params)
    if mode is CoherenceArgMode.CONSISTENT:
        return abs(spec.lambda3) / params.gamma
    return 2.0 * abs(spec.lambda2) / params.gamma


def _assemble(xi, params, mode, t):
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    tau = params.gamma * t
    return AffineBlochMap(
        xi_perp=xi(coherence_ratio(params, mode), tau),
        xi_z=xi(params.R, tau),
        wz_fixed=params.wz_fixed,
    )


def post_markovian_map(params: BathParams, t: float, mode=CoherenceArgMode.CONSISTENT) -> AffineBlochMap:
    return _assemble(xi_post_markovian, params, mode, t)


def memory_kernel_map(params: BathParams, t: float, mode=CoherenceArgMode.CONSISTENT) -> AffineBlochMap:
    return _assemble(xi_memory_kernel, params, mode, t)
