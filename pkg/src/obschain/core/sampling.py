"""Haar-distributed unitaries and pure states.

Sampling follows the Ginibre + QR construction: a matrix of i.i.d. complex
Gaussians is QR-decomposed and the unitary factor is phase-corrected with the
diagonal of R. Without the phase correction the QR convention would bias the
distribution away from Haar.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one Haar-distributed ``d x d`` unitary matrix.

    Parameters
    ----------
    d : int
        Dimension, ``d >= 1``.
    rng : numpy.random.Generator
        Source of randomness; passed explicitly so callers control seeding.

    Returns
    -------
    np.ndarray
        Complex ``(d, d)`` unitary, ``U^dag U = 1`` to machine precision.
    """
    return haar_unitaries(d, 1, rng)[0]


def haar_unitaries(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a stack of ``count`` Haar unitaries with shape ``(count, d, d)``."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    z = rng.standard_normal((count, d, d, 2))
    g = (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    diag = np.einsum("nii->ni", r)
    phases = diag / np.abs(diag)
    return q * phases.conj()[:, None, :]


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a Haar-random pure-state amplitude vector of dimension ``d``."""
    return haar_states(d, 1, rng)[0]


def haar_states(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` Haar-random state vectors, shape ``(count, d)``.

    A normalized vector of i.i.d. complex Gaussians is Haar-distributed on
    the unit sphere of the Hilbert space.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    z = rng.standard_normal((count, d, 2))
    v = z[..., 0] + 1j * z[..., 1]
    return v / np.linalg.norm(v, axis=1)[:, None]
