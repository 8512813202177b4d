"""Spin-j coherent states.

Amplitudes are stored over ``m = -j .. +j`` in ascending order (index
``p = j + m``). The phase convention is ``exp(-i (j - m) phi)`` on top of the
real positive magnitude; every physically consumed quantity depends only on
magnitudes, but one convention has to be pinned for reproducibility.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from .combinat import log_binomial


def _check_spin(j: float) -> int:
    two_j = round(2.0 * j)
    if two_j < 0 or abs(2.0 * j - two_j) > 1e-9:
        raise DomainError(f"j must be a non-negative half-integer, got {j}")
    return int(two_j)


def sqrt_binomials(two_j: int) -> np.ndarray:
    """``sqrt(C(2j, p))`` for ``p = 0 .. 2j``, computed in log space."""
    return np.exp(0.5 * np.array([log_binomial(two_j, p) for p in range(two_j + 1)]))


def spin_coherent_amplitudes(j: float, theta: float, phi: float) -> np.ndarray:
    """Amplitudes ``<j m|j j; theta, phi>`` of the rotated highest-weight state.

    Satisfies ``|amp_m|^2 = C(2j, j+m) cos^(2(j+m))(theta/2) sin^(2(j-m))(theta/2)``
    and sums to one for any angles.
    """
    two_j = _check_spin(j)
    return coherent_amps_from_halfangles(
        two_j,
        math.cos(0.5 * theta),
        math.sin(0.5 * theta),
        phi,
        sqrt_binomials(two_j),
    )


def coherent_amps_from_halfangles(
    two_j: int, cos_half: float, sin_half: float, phi: float, sqc: np.ndarray
) -> np.ndarray:
    """Fast path taking precomputed half-angle values and binomial roots."""
    p = np.arange(two_j + 1)
    mag = sqc * cos_half**p * sin_half ** (two_j - p)
    return mag * np.exp(-1j * (two_j - p) * phi)
