"""Qubit states, Bloch vectors and the axially symmetric affine maps acting on them.

Basis convention: index 0 is the excited state, index 1 the ground state, so
``wz = rho11 - rho22`` is the excited minus ground population.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class QubitState:
    """Unit-trace Hermitian 2x2 density matrix.

    Only ``rho11`` and ``rho12`` are stored; ``rho22 = 1 - rho11`` and
    ``rho21 = conj(rho12)``. Unphysical states (negative eigenvalue) are
    allowed, use :meth:`is_physical` to test.
    """

    rho11: float
    rho12: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "rho11", float(self.rho11))
        object.__setattr__(self, "rho12", complex(self.rho12))

    @property
    def rho22(self) -> float:
        return 1.0 - self.rho11

    @property
    def rho21(self) -> complex:
        return self.rho12.conjugate()

    @classmethod
    def from_populations(cls, rho11, rho22, rho12=0j, atol=1e-12):
        if abs(rho11 + rho22 - 1.0) > atol:
            raise ValueError(f"trace must be 1, got {rho11 + rho22!r}")
        return cls(rho11, rho12)

    @classmethod
    def from_matrix(cls, rho, atol=1e-12):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        if np.abs(rho - rho.conj().T).max() > atol:
            raise ValueError("matrix is not Hermitian")
        return cls.from_populations(rho[0, 0].real, rho[1, 1].real, rho[0, 1], atol=atol)

    def matrix(self) -> np.ndarray:
        return np.array([[self.rho11, self.rho12], [self.rho21, self.rho22]], dtype=complex)

    def is_physical(self, tol=1e-12) -> bool:
        return min_eigenvalue(self) >= -tol


@dataclass(frozen=True)
class BlochVector:
    wx: float
    wy: float
    wz: float

    def norm(self) -> float:
        return math.sqrt(self.wx**2 + self.wy**2 + self.wz**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.wx, self.wy, self.wz])


@dataclass(frozen=True)
class AffineBlochMap:
    """w -> (xi_perp wx, xi_perp wy, wz_fixed + xi_z (wz - wz_fixed))."""

    xi_perp: float
    xi_z: float
    wz_fixed: float

    @classmethod
    def identity(cls, wz_fixed=-1.0):
        return cls(1.0, 1.0, wz_fixed)

    def apply(self, w: BlochVector) -> BlochVector:
        return BlochVector(
            self.xi_perp * w.wx,
            self.xi_perp * w.wy,
            self.xi_z * w.wz + (1.0 - self.xi_z) * self.wz_fixed,
        )

    def matrix_form(self):
        """Return ``(T, t)`` with ``w_out = T @ w + t``."""
        T = np.diag([self.xi_perp, self.xi_perp, self.xi_z])
        t = np.array([0.0, 0.0, self.wz_fixed * (1.0 - self.xi_z)])
        return T, t


def to_bloch(state: QubitState) -> BlochVector:
    return BlochVector(2.0 * state.rho12.real, -2.0 * state.rho12.imag, state.rho11 - state.rho22)


def from_bloch(w: BlochVector) -> QubitState:
    return QubitState(0.5 * (1.0 + w.wz), complex(0.5 * w.wx, -0.5 * w.wy))


def min_eigenvalue(state: QubitState) -> float:
    """Smaller eigenvalue ``(1 - |w|)/2``; negative iff the state is unphysical."""
    return 0.5 * (1.0 - to_bloch(state).norm())


def apply_map(m: AffineBlochMap, state: QubitState) -> QubitState:
    # Written on populations so the identity map returns rho11 bit for bit.
    p_fixed = 0.5 * (1.0 + m.wz_fixed)
    rho11 = m.xi_z * state.rho11 + (1.0 - m.xi_z) * p_fixed
    return QubitState(rho11, m.xi_perp * state.rho12)


def named_state(name: str) -> BlochVector:
    presets = {
        "excited": BlochVector(0.0, 0.0, 1.0),
        "ground": BlochVector(0.0, 0.0, -1.0),
        "plus-x": BlochVector(1.0, 0.0, 0.0),
    }
    try:
        return presets[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(presets)}") from None
