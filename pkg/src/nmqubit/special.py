"""Branch-switching evaluation of the damped responses that appear in every closed form.

All responses here are normalized to 1 at ``tau = 0`` with zero initial slope.
Near a double root the generic expressions divide by a vanishing quantity, so
inside a narrow band a short series in the discriminant is used instead.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

DEGENERATE_BAND = 1e-9



class Branch(str, enum.Enum):
    HYPERBOLIC = "hyperbolic"
    TRIGONOMETRIC = "trigonometric"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class BranchInfo:
    discriminant: float
    branch: Branch


def classify(discriminant: float, band: float = DEGENERATE_BAND) -> BranchInfo:
    d = float(discriminant)
    if abs(d) <= band:
        branch = Branch.DEGENERATE
    elif d > 0:
        branch = Branch.HYPERBOLIC
    else:
        branch = Branch.TRIGONOMETRIC
    return BranchInfo(d, branch)


def damped_bracket(disc, x, band=DEGENERATE_BAND):
    r"""Evaluate ``exp(-x) * [cosh(q x) + sinh(q x)/q]`` with ``q = sqrt(disc)``.

    For ``disc < 0`` this continues analytically to the ``cos``/``sin`` form
    and for ``|disc| <= band`` to the series
    ``exp(-x) * [1 + x + disc*(x**2/2 + x**3/6)]``. ``disc`` and ``x``
    broadcast against each other; ``x`` must be nonnegative.
    """
    disc, x = np.broadcast_arrays(np.asarray(disc, dtype=float), np.asarray(x, dtype=float))
    out = np.empty(disc.shape)

    deg = np.abs(disc) <= band
    hyp = disc > band
    trig = disc < -band

    if deg.any():
        d, xx = disc[deg], x[deg]
        out[deg] = np.exp(-xx) * (1.0 + xx + d * (0.5 * xx**2 + xx**3 / 6.0))

    if hyp.any():
        q = np.sqrt(disc[hyp])
        xx = x[hyp]
        # exp(-(1-q)x) * [1 + (1/q - 1)/2 * (1 - exp(-2qx))]: for q <= 1 every term is
        # nonnegative, nothing overflows, and x = 0 or q = 1 give exactly 1
        out[hyp] = np.exp(-(1.0 - q) * xx) * (1.0 - 0.5 * (1.0 / q - 1.0) * np.expm1(-2.0 * q * xx))

    if trig.any():
        q = np.sqrt(-disc[trig])
        xx = x[trig]
        out[trig] = np.exp(-xx) * (np.cos(q * xx) + np.sin(q * xx) / q)

    return out if out.ndim else float(out)
