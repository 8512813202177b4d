"""Log-space combinatorics used by the spin channels and symmetric subspaces."""

from __future__ import annotations

import math

from ..errors import DomainError


def log_binomial(n: int, k: int) -> float:
    """``log C(n, k)`` via log-gamma; valid for arbitrarily large ``n``.

    The spin channel matrices need ratios of binomials up to ``C(4j, .)`` for
    thousands of qubits, far beyond what exact integers in float64 can hold,
    so everything downstream consumes logarithms.
    """
    if k < 0 or n < 0 or k > n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def sym_dim(n_copies: int, d: int) -> int:
    """Dimension ``C(N + d - 1, N)`` of the completely symmetric subspace."""
    if n_copies < 0 or d < 1:
        raise DomainError(f"need n_copies >= 0 and d >= 1, got {n_copies}, {d}")
    return math.comb(n_copies + d - 1, n_copies)
