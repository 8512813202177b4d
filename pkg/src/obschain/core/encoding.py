"""Optimal encoding of a qubit direction into the full N-qubit Hilbert space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UnsupportedEncodingError
from .orthopoly import jacobi_max_eigenpair, jacobi_offdiag


@dataclass(frozen=True)
class OptimalEncoding:
    """Seed data of the optimal N-qubit encoding (N even).

    ``coefficients[p]`` is the weight of the total-spin sector ``j = p`` in the
    encoded state, ``offdiag`` the coupling coefficients of the tridiagonal
    seed matrix, and ``shrink`` its maximal eigenvalue, which equals the
    largest zero of the Legendre polynomial of degree ``l = N/2 + 1``.
    """

    n_qubits: int
    l: int
    offdiag: np.ndarray
    coefficients: np.ndarray
    shrink: float

    def __post_init__(self) -> None:
        for name in ("offdiag", "coefficients"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def optimal_encoding(n_qubits: int) -> OptimalEncoding:
    """Solve the tridiagonal eigenproblem defining the optimal encoding.

    Raises
    ------
    UnsupportedEncodingError
        For odd or non-positive ``n_qubits``; the optimal construction is
        only worked out for an even number of qubits.
    """
    if n_qubits < 2 or n_qubits % 2 != 0:
        raise UnsupportedEncodingError(
            f"optimal encoding requires an even number of qubits >= 2, got {n_qubits}"
        )
    l = n_qubits // 2 + 1
    shrink, coeffs = jacobi_max_eigenpair(l)
    return OptimalEncoding(
        n_qubits=n_qubits,
        l=l,
        offdiag=jacobi_offdiag(l),
        coefficients=coeffs,
        shrink=shrink,
    )
