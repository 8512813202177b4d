"""Legendre polynomials, their largest zeros, and the associated Jacobi matrix.

The symmetric tridiagonal (Jacobi) matrix with zero diagonal and off-diagonal
entries ``c_i = i / sqrt(4 i^2 - 1)`` has the zeros of the Legendre polynomial
``P_l`` as its eigenvalues, so its maximal eigenvalue and the largest zero of
``P_l`` are dual routes to the same number. Both are implemented
independently here and cross-checked in the tests.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import solve_banded

from ..errors import DomainError, NumericError

# First positive zero of the Bessel function J0, to double precision. It
# enters the large-degree asymptotic of the largest Legendre zero,
# x_n ~ 1 - xi0^2 / (2 n^2).
BESSEL_J0_FIRST_ZERO = 2.404825557695773


def legendre_pn(n: int, x):
    """Evaluate ``P_n(x)`` by the three-term recurrence; ``x`` may be an array."""
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.shape else float(p_prev)
    p = x.copy()
    for k in range(1, n):
        p, p_prev = ((2 * k + 1) * x * p - k * p_prev) / (k + 1), p
    return p if p.shape else float(p)


def _pn_and_prev(n: int, x: float) -> tuple[float, float]:
    """Return ``(P_n(x), P_{n-1}(x))`` for scalar ``x``."""
    p_prev, p = 1.0, x
    for k in range(1, n):
        p, p_prev = ((2 * k + 1) * x * p - k * p_prev) / (k + 1), p
    return p, p_prev


def legendre_largest_zero(n: int, tol: float = 1e-14, max_iter: int = 100) -> float:
    """Largest zero of the Legendre polynomial ``P_n``.

    Newton iteration on the three-term recurrence, started from the
    Bessel-zero asymptotic ``cos(xi0 / (n + 1/2))`` and guarded by a sign
    bracket so a wild Newton step can never escape.

    Raises
    ------
    DomainError
        If ``n < 1`` (``P_0`` has no zero).
    NumericError
        If no bracket is found or the iteration fails to converge.
    """
    if n < 1:
        raise DomainError(f"P_{n} has no zero; need degree >= 1")
    if n == 1:
        return 0.0

    # P_n(1) = 1 > 0 and P_n < 0 immediately below its largest zero, so a
    # bracket is [lo, 1] with P_n(lo) < 0. Widen the angle until the sign
    # flips; the first negative lobe is hit well before the cap.
    theta0 = BESSEL_J0_FIRST_ZERO / (n + 0.5)
    hi = 1.0
    lo = None
    scale = 1.0
    for _ in range(60):
        cand = math.cos(min(scale * theta0, math.pi))
        if _pn_and_prev(n, cand)[0] < 0.0:
            lo = cand
            break
        scale *= 1.25
    if lo is None:
        raise NumericError(f"failed to bracket the largest zero of P_{n}")

    x = max(min(math.cos(theta0), hi), lo)
    for _ in range(max_iter):
        p, p_prev = _pn_and_prev(n, x)
        if p == 0.0:
            return x
        # P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
        deriv = n * (x * p - p_prev) / (x * x - 1.0)
        if p < 0.0:
            lo = x
        else:
            hi = x
        x_new = x - p / deriv
        if not (lo <= x_new <= hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(1.0, abs(x_new)) or hi - lo <= tol:
            return x_new
        x = x_new
    raise NumericError(f"largest zero of P_{n} did not converge in {max_iter} iterations")


def jacobi_offdiag(l: int) -> np.ndarray:
    """Off-diagonal entries ``c_1 .. c_{l-1}`` with ``c_i = i / sqrt(4 i^2 - 1)``."""
    if l < 2:
        raise DomainError(f"matrix size must be >= 2, got {l}")
    i = np.arange(1, l, dtype=float)
    return i / np.sqrt(4.0 * i * i - 1.0)


def _sturm_count(off_sq: np.ndarray, lam: float) -> int:
    """Number of eigenvalues below ``lam`` for the zero-diagonal Jacobi matrix."""
    count = 0
    q = -lam
    if q < 0.0:
        count += 1
    for c2 in off_sq:
        if q == 0.0:
            q = 1e-300
        q = -lam - c2 / q
        if q < 0.0:
            count += 1
    return count


def jacobi_max_eigenpair(l: int) -> tuple[float, np.ndarray]:
    """Maximal eigenvalue and eigenvector of the ``l x l`` Legendre Jacobi matrix.

    Bisection on the Sturm-sequence count localizes the largest eigenvalue
    (all eigenvalues lie in (-1, 1)); inverse iteration with a shift just
    above it recovers the eigenvector, which is strictly positive by
    Perron-Frobenius and is returned with positive sign and unit norm.
    """
    off = jacobi_offdiag(l)
    off_sq = off * off

    lo, hi = 0.0, 1.0
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if _sturm_count(off_sq, mid) >= l:
            hi = mid
        else:
            lo = mid
    lam = 0.5 * (lo + hi)

    # Banded storage for (T - sigma I); sigma sits just above lam so the
    # solve is extremely ill-conditioned along the top eigenvector, which is
    # exactly what inverse iteration wants.
    sigma = lam + 1e-12
    ab = np.zeros((3, l))
    ab[0, 1:] = off
    ab[1, :] = -sigma
    ab[2, :-1] = off
    v = np.full(l, 1.0 / math.sqrt(l))
    for _ in range(3):
        v = solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    if v.sum() < 0.0:
        v = -v

    tv = np.empty(l)
    tv[0] = off[0] * v[1]
    tv[-1] = off[-1] * v[-2]
    if l > 2:
        tv[1:-1] = off[:-1] * v[:-2] + off[1:] * v[2:]
    rayleigh = float(v @ tv)
    residual = float(np.linalg.norm(tv - rayleigh * v))
    if residual > 1e-9:
        raise NumericError(f"inverse iteration residual {residual:.2e} too large for l={l}")
    return rayleigh, v
