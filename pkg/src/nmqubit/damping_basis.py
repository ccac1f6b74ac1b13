"""Markovian qubit Liouvillian, its damping basis, and the Markovian propagator."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .qubit_state import IDENTITY, SIGMA_Z, AffineBlochMap, QubitState

# Index 0 is the excited state: sigma_plus raises |g> -> |e>.
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class BathParams:
    """Coupling rate ``gamma0``, inverse memory time ``gamma`` and thermal occupation ``N``."""

    gamma0: float
    gamma: float = 1.0
    N: float = 0.0

    def __post_init__(self):
        for name in ("gamma0", "gamma", "N"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma!r}")
        if self.gamma0 < 0:
            raise ValueError(f"gamma0 must be >= 0, got {self.gamma0!r}")
        if self.N < 0:
            raise ValueError(f"N must be >= 0, got {self.N!r}")

    @classmethod
    def from_ratio(cls, R: float, N: float = 0.0, gamma: float = 1.0) -> "BathParams":
        """Parameters whose population ratio ``|lambda2|/gamma`` equals ``R``."""
        if R < 0:
            raise ValueError(f"R must be >= 0, got {R!r}")
        return cls(gamma0=R * gamma / (2.0 * N + 1.0), gamma=gamma, N=N)

    @property
    def R(self) -> float:
        return 2.0 * self.gamma0 * (self.N + 0.5) / self.gamma

    @property
    def wz_fixed(self) -> float:
        return -1.0 / (2.0 * self.N + 1.0)


@dataclass(frozen=True)
class LiouvillianSpectrum:
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float


def spectrum(params: BathParams) -> LiouvillianSpectrum:
    lam3 = -params.gamma0 * (params.N + 0.5)
    return LiouvillianSpectrum(0.0, 2.0 * lam3, lam3, lam3)


def damping_basis(params: BathParams):
    """Right eigenoperators ``(sigma_0, sigma_z, sigma_+, sigma_-)`` of the Liouvillian.

    ``sigma_0`` is the stationary state; the last two use the
    ``sigma_x +/- i sigma_y`` normalization.
    """
    sigma0 = 0.5 * (IDENTITY - SIGMA_Z / (2.0 * params.N + 1.0))
    return sigma0, SIGMA_Z.copy(), 2.0 * SIGMA_PLUS, 2.0 * SIGMA_MINUS


def _dissipator(L, rho):
    LdL = L.conj().T @ L
    return L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)


def apply_liouvillian(params: BathParams, rho) -> np.ndarray:
    """Markovian generator acting on a 2x2 operator (trace need not be 1)."""
    if isinstance(rho, QubitState):
        rho = rho.matrix()
    rho = np.asarray(rho, dtype=complex)
    g0, N = params.gamma0, params.N
    return g0 * (N + 1.0) * _dissipator(SIGMA_MINUS, rho) + g0 * N * _dissipator(SIGMA_PLUS, rho)


def markovian_map(params: BathParams, t: float) -> AffineBlochMap:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    spec = spectrum(params)
    return AffineBlochMap(
        xi_perp=math.exp(spec.lambda3 * t),
        xi_z=math.exp(spec.lambda2 * t),
        wz_fixed=params.wz_fixed,
    )


def integrate_lindblad(params: BathParams, rho0, times, rtol=1e-12, atol=1e-14) -> np.ndarray:
    """Time-step the Markovian master equation directly; returns matrices of shape (len(times), 2, 2).

    Uses only :func:`apply_liouvillian`, so it serves as an independent
    check on the damping-basis propagator.
    """
    if isinstance(rho0, QubitState):
        rho0 = rho0.matrix()
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be >= 0")

    def rhs(_, y):
        rho = (y[:4] + 1j * y[4:]).reshape(2, 2)
        d = apply_liouvillian(params, rho).ravel()
        return np.concatenate([d.real, d.imag])

    flat = np.asarray(rho0, dtype=complex).ravel()
    y0 = np.concatenate([flat.real, flat.imag])
    t_end = float(times.max()) if times.size else 0.0
    if t_end == 0.0:
        return np.repeat(np.asarray(rho0, dtype=complex)[None], times.size, axis=0)
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        raise ArithmeticError(f"Lindblad integration failed: {sol.message}")
    return (sol.y[:4] + 1j * sol.y[4:]).T.reshape(-1, 2, 2)
