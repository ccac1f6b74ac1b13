"""Uniform access to the four dynamical descriptions as affine Bloch maps."""
from __future__ import annotations

import enum

import numpy as np

from .damping_basis import BathParams, spectrum
from .exact_jc import exact_amplitude
from .kernel_solutions import (
    CoherenceArgMode,
    coherence_ratio,
    xi_markovian,
    xi_memory_kernel,
    xi_post_markovian,
)
from .qubit_state import AffineBlochMap


class Method(str, enum.Enum):
    MARKOVIAN = "markovian"
    POST_MARKOVIAN = "post-markovian"
    MEMORY_KERNEL = "memory-kernel"
    EXACT = "exact"


class UnsupportedCombination(ValueError):
    pass


def map_factors(method, params: BathParams, tau, mode=CoherenceArgMode.CONSISTENT):
    """Return ``(xi_perp, xi_z, wz_fixed)`` on dimensionless times ``tau = gamma t``.

    ``xi_perp`` and ``xi_z`` are arrays shaped like ``tau``.
    """
    method = Method(method)
    tau = np.asarray(tau, dtype=float)
    if method is Method.EXACT:
        if params.N != 0:
            raise UnsupportedCombination("the exact Lorentzian model is defined for N = 0 only")
        c = np.asarray(exact_amplitude(params.R, tau), dtype=float)
        return c, c * c, -1.0
    if method is Method.MARKOVIAN:
        spec = spectrum(params)
        a_coh = abs(spec.lambda3) / params.gamma
        xi = xi_markovian
    elif method is Method.POST_MARKOVIAN:
        a_coh = coherence_ratio(params, mode)
        xi = xi_post_markovian
    else:
        a_coh = coherence_ratio(params, mode)
        xi = xi_memory_kernel
    p = np.asarray(xi(a_coh, tau), dtype=float)
    z = np.asarray(xi(params.R, tau), dtype=float)
    return p, z, params.wz_fixed


def dynamical_map(method, params: BathParams, tau: float, mode=CoherenceArgMode.CONSISTENT) -> AffineBlochMap:
    p, z, f = map_factors(method, params, tau, mode)
    return AffineBlochMap(float(p), float(z), f)
