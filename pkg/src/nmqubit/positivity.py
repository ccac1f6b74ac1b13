"""Positivity and complete positivity of the qubit dynamical maps.

Three notions are kept apart:

* ``map``: exact positivity of the affine map. The image of the Bloch ball is
  an ellipsoid with semi-axes ``(|xi_perp|, |xi_perp|, |xi_z|)``; the map is
  positive iff the ellipsoid stays inside the unit ball.
* ``componentwise``: every image of the six Bloch poles has components in
  ``[-1, 1]``. This is necessary but not sufficient for positivity.
* ``state``: the trajectory of one given initial state stays physical.

Complete positivity (Choi matrix) is an extension beyond positivity and is
reported separately.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .damping_basis import BathParams
from .kernel_solutions import CoherenceArgMode
from .maps import Method, map_factors
from .qubit_state import SIGMA_X, SIGMA_Y, SIGMA_Z, AffineBlochMap, BlochVector

MARGIN_TOL = 1e-12
CHOI_TOL = 1e-10
SCAN_STEP = 1e-3
BISECTION_TOL = 1e-10


class Criterion(str, enum.Enum):
    MAP = "map"
    COMPONENTWISE = "componentwise"
    STATE = "state"


def _ellipsoid_margin(p, z, f):
    """``1 - max |T w + t|`` over the unit sphere, vectorized over ``p`` and ``z``."""
    p, z = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(z, dtype=float))
    c = f * (1.0 - z)
    # |out|^2 at wz = u on the sphere: p^2 (1 - u^2) + (c + z u)^2
    g = np.maximum((c + z) ** 2, (c - z) ** 2)
    curv = z * z - p * p
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(curv < 0, -c * z / curv, 0.0)
    inside = (curv < 0) & (np.abs(u) <= 1.0)
    g_vertex = p * p * (1.0 - u * u) + (c + z * u) ** 2
    g = np.where(inside, np.maximum(g, g_vertex), g)
    return 1.0 - np.sqrt(g)


def _componentwise_margin(p, z, f):
    c = f * (1.0 - z)
    worst = np.maximum(np.abs(p), np.maximum(np.abs(c + z), np.abs(c - z)))
    return 1.0 - worst


def _state_margin(p, z, f, w0: BlochVector):
    wx, wy = p * w0.wx, p * w0.wy
    wz = z * w0.wz + (1.0 - z) * f
    return 1.0 - np.sqrt(wx * wx + wy * wy + wz * wz)


def map_positivity(m: AffineBlochMap):
    """``(is_positive, margin)`` with ``margin = 1 - max |output|`` over pure inputs."""
    margin = float(_ellipsoid_margin(m.xi_perp, m.xi_z, m.wz_fixed))
    return margin >= -MARGIN_TOL, margin


def componentwise_positivity(m: AffineBlochMap):
    margin = float(_componentwise_margin(m.xi_perp, m.xi_z, m.wz_fixed))
    return margin >= -MARGIN_TOL, margin


def _operator_to_bloch(X):
    return np.trace(X), np.array([np.trace(X @ s) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])


def apply_to_operator(m: AffineBlochMap, X) -> np.ndarray:
    """Linear extension of the map to arbitrary 2x2 operators."""
    T, t = m.matrix_form()
    x0, xv = _operator_to_bloch(np.asarray(X, dtype=complex))
    out = T @ xv + x0 * t
    return 0.5 * (x0 * np.eye(2) + out[0] * SIGMA_X + out[1] * SIGMA_Y + out[2] * SIGMA_Z)


def choi_matrix(m: AffineBlochMap) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_ij |i><j| (x) Phi(|i><j|)``."""
    C = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2), dtype=complex)
            E[i, j] = 1.0
            C += np.kron(E, apply_to_operator(m, E))
    return C


def choi_cp_check(m: AffineBlochMap):
    lo = float(np.linalg.eigvalsh(choi_matrix(m)).min())
    return lo >= -CHOI_TOL, lo


def _choi_min_eigenvalues(p, z, f):
    # block structure of the Choi matrix for this map family
    A = 0.5 * (1.0 + f + z * (1.0 - f))
    B = 0.5 * (1.0 + f - z * (1.0 + f))
    mats = np.zeros(np.shape(p) + (4, 4))
    mats[..., 0, 0] = A
    mats[..., 1, 1] = 1.0 - A
    mats[..., 2, 2] = B
    mats[..., 3, 3] = 1.0 - B
    mats[..., 0, 3] = p
    mats[..., 3, 0] = p
    return np.linalg.eigvalsh(mats).min(axis=-1)


@dataclass(frozen=True)
class PositivityReport:
    """Outcome of a positivity scan over ``tau in [0, tau_max]``.

    ``is_positive_map`` and ``first_violation_tau`` refer to ``criterion``.
    The componentwise fields always hold the pole-image test, whatever the
    primary criterion.
    """

    method: Method
    params: BathParams
    mode: CoherenceArgMode
    criterion: Criterion
    tau_max: float
    is_positive_map: bool
    first_violation_tau: Optional[float]
    min_margin: float
    min_state_eigenvalue: float
    min_choi_eigenvalue: float
    componentwise_positive: bool
    componentwise_first_violation_tau: Optional[float]

    @property
    def is_cp(self) -> bool:
        return self.min_choi_eigenvalue >= -CHOI_TOL


def _bisect(margin_at, lo, hi, tol=BISECTION_TOL):
    # invariant: margin_at(lo) >= -MARGIN_TOL > margin_at(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if margin_at(mid) >= -MARGIN_TOL:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _locate(margin_fn, taus):
    margins = margin_fn(taus)
    bad = np.flatnonzero(margins < -MARGIN_TOL)
    if bad.size == 0:
        return None, margins
    k = bad[0]
    if k == 0:
        return float(taus[0]), margins
    tau = _bisect(lambda t: float(margin_fn(np.array(t))), float(taus[k - 1]), float(taus[k]))
    return tau, margins


def first_violation(
    method,
    params: BathParams,
    mode=CoherenceArgMode.CONSISTENT,
    tau_max: float = 50.0,
    *,
    initial_state: Optional[BlochVector] = None,
    step: float = SCAN_STEP,
) -> PositivityReport:
    """Scan the margin on a ``step`` grid, then bisect the first sign change.

    Without ``initial_state`` the criterion is exact map positivity (worst-case
    input). With it, only that trajectory is checked, which for the excited
    state reduces to the sign of the population factor.
    """
    if not tau_max > 0:
        raise ValueError(f"tau_max must be > 0, got {tau_max!r}")
    method = Method(method)
    mode = CoherenceArgMode(mode)
    n = int(np.ceil(tau_max / step - 1e-9))
    taus = np.minimum(step * np.arange(n + 1), tau_max)

    def factors(t):
        return map_factors(method, params, t, mode)

    if initial_state is None:
        criterion = Criterion.MAP

        def primary(t):
            return _ellipsoid_margin(*factors(t))

    else:
        criterion = Criterion.STATE

        def primary(t):
            return _state_margin(*factors(t), initial_state)

    def componentwise(t):
        return _componentwise_margin(*factors(t))

    tau_v, margins = _locate(primary, taus)
    tau_c, _ = _locate(componentwise, taus)
    p, z, f = factors(taus)
    min_choi = float(_choi_min_eigenvalues(p, z, f).min())
    min_margin = float(margins.min())
    return PositivityReport(
        method=method,
        params=params,
        mode=mode,
        criterion=criterion,
        tau_max=float(tau_max),
        is_positive_map=tau_v is None,
        first_violation_tau=tau_v,
        min_margin=min_margin,
        min_state_eigenvalue=0.5 * min_margin,
        min_choi_eigenvalue=min_choi,
        componentwise_positive=tau_c is None,
        componentwise_first_violation_tau=tau_c,
    )


def scan_plane(method, R_grid, tau_max: float = 50.0, *, N: float = 0.0, mode=CoherenceArgMode.CONSISTENT,
               initial_state: Optional[BlochVector] = None):
    """One :class:`PositivityReport` per ratio in ``R_grid``, in grid order."""
    R_grid = list(R_grid)
    if not R_grid:
        raise ValueError("R_grid must be nonempty")
    return [
        first_violation(method, BathParams.from_ratio(R, N), mode, tau_max, initial_state=initial_state)
        for R in R_grid
    ]
