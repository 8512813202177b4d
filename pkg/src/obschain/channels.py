"""Measurement-induced channels and their Kraus realizations.

Two families are covered:

* single qudit -- a weak covariant measurement of strength ``eps`` induces,
  once averaged over the unknown apparatus orientation, a depolarizing
  channel ``rho -> r rho + (1 - r) 1/d`` whose shrink ``r`` is a closed-form
  function of ``eps``;
* symmetric N-qubit (spin j = N/2) -- the analogous weak measurement maps
  the weights of a state diagonal in ``|j m>`` through a doubly stochastic
  matrix built from binomial ratios, multiplying ``<J_z>`` by a scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core.combinat import log_binomial
from .core.states import DensityMatrix
from .errors import DomainError

_WEIGHT_CLAMP = -1e-12


def _check_strength(eps: float) -> float:
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"measurement strength must lie in [0, 1], got {eps}")
    return float(eps)


def _check_dim(d: int) -> int:
    if d < 2:
        raise DomainError(f"channel formulas divide by d - 1; need d >= 2, got {d}")
    return int(d)


def c_of_overlap(o_m: float, d: int) -> float:
    """Largest Kraus trace sum ``c = [sqrt(O_M) + sqrt((d-1)(d-O_M))]^2``.

    ``O_M`` is the guess/effect overlap of the measurement, between 1
    (identity POVM) and ``d`` (most informative).
    """
    _check_dim(d)
    if not 1.0 <= o_m <= d + 1e-12:
        raise DomainError(f"overlap must lie in [1, d], got {o_m}")
    o_m = min(float(o_m), float(d))
    root = math.sqrt(o_m) + math.sqrt((d - 1.0) * (d - o_m))
    return root * root


def r_of_strength(eps: float, d: int) -> float:
    """Depolarizing shrink of a strength-``eps`` weak covariant measurement.

    ``r = (d - 1 + (2 - d) eps + 2 sqrt((1 + eps (d-1)) (1 - eps))) / (d + 1)``,
    which equals ``(c_of_overlap(1 + eps (d-1), d) - 1) / ((d+1)(d-1))``.
    Decreases monotonically from 1 at ``eps = 0`` to ``1/(d+1)`` at ``eps = 1``.
    """
    eps = _check_strength(eps)
    _check_dim(d)
    return (
        d - 1.0 + (2.0 - d) * eps + 2.0 * math.sqrt((1.0 + eps * (d - 1.0)) * (1.0 - eps))
    ) / (d + 1.0)


def depolarize(rho: DensityMatrix, r: float) -> DensityMatrix:
    """Apply ``rho -> r rho + (1 - r) 1/d``. ``r`` outside [0, 1] is rejected."""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"depolarizing parameter must lie in [0, 1], got {r}")
    d = rho.dim
    out = r * rho.entries + (1.0 - r) * np.eye(d) / d
    return DensityMatrix(d, out)


def weak_qudit_kraus(eps: float, basis: np.ndarray) -> np.ndarray:
    """Kraus operators of the optimal weak d-outcome measurement.

    Parameters
    ----------
    eps : float
        Measurement strength in [0, 1].
    basis : np.ndarray
        ``(d, d)`` complex matrix whose columns are the orthonormal outcome
        kets ``|a>``.

    Returns
    -------
    np.ndarray
        Stack ``(d, d, d)``; entry ``a`` is
        ``sqrt(O_M/d) |a><a| + sqrt((d-O_M)/(d(d-1))) (1 - |a><a|)``. The
        operators are Hermitian and complete, ``sum_a A_a^2 = 1``.
    """
    eps = _check_strength(eps)
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise DomainError(f"basis must be a square matrix of kets, got shape {basis.shape}")
    d = _check_dim(basis.shape[0])
    if np.max(np.abs(basis.conj().T @ basis - np.eye(d))) > 1e-12:
        raise DomainError("basis columns are not orthonormal")
    o_m = 1.0 + eps * (d - 1.0)
    on_axis = math.sqrt(o_m / d)
    off_axis = math.sqrt((d - o_m) / (d * (d - 1.0)))
    eye = np.eye(d, dtype=complex)
    out = np.empty((d, d, d), dtype=complex)
    for a in range(d):
        proj = np.outer(basis[:, a], basis[:, a].conj())
        out[a] = on_axis * proj + off_axis * (eye - proj)
    return out


@dataclass(frozen=True)
class WeakQuditApparatus:
    """Derived quantities of a strength-``eps`` weak qudit measurement."""

    dim: int
    strength: float
    guess_overlap: float
    kraus_trace_sum: float
    shrink: float

    @classmethod
    def from_strength(cls, d: int, eps: float) -> "WeakQuditApparatus":
        _check_dim(d)
        eps = _check_strength(eps)
        o_m = 1.0 + eps * (d - 1.0)
        c = c_of_overlap(o_m, d)
        return cls(
            dim=d,
            strength=eps,
            guess_overlap=o_m,
            kraus_trace_sum=c,
            shrink=(c - 1.0) / ((d + 1.0) * (d - 1.0)),
        )


# ---------------------------------------------------------------------------
# spin-j (symmetric N-qubit) channels


def _check_j(j: float) -> int:
    two_j = round(2.0 * j)
    if two_j < 0 or abs(2.0 * j - two_j) > 1e-9:
        raise DomainError(f"j must be a non-negative half-integer, got {j}")
    return int(two_j)


@dataclass(frozen=True)
class SpinDiagonalState:
    """Spin-j mixed state diagonal in ``|j m>``, weights over ``m = -j .. j``."""

    j: float
    weights: np.ndarray

    def __post_init__(self) -> None:
        two_j = _check_j(self.j)
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (two_j + 1,):
            raise DomainError(f"weights must have shape ({two_j + 1},), got {w.shape}")
        if w.min() < _WEIGHT_CLAMP:
            raise DomainError(f"weights must be >= {_WEIGHT_CLAMP}, min is {w.min()!r}")
        w = np.where(w < 0.0, 0.0, w)
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1, got {w.sum()!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def polarized(cls, j: float) -> "SpinDiagonalState":
        """The pure ``m = +j`` state."""
        two_j = _check_j(j)
        w = np.zeros(two_j + 1)
        w[-1] = 1.0
        return cls(j, w)

    def jz_expectation(self) -> float:
        two_j = round(2.0 * self.j)
        m = np.arange(two_j + 1) - 0.5 * two_j
        return float(np.dot(m, self.weights))


def _ab_coefficients(two_j: int, eps: float) -> tuple[float, float]:
    """Kraus mixing coefficients ``a = sqrt(1-eps)``, ``b = sqrt(1+2j eps) - a``.

    ``b`` is evaluated as ``(2j+1) eps / (sqrt(1+2j eps) + a)`` to avoid the
    cancellation of two near-unit square roots at small strengths.
    """
    a = math.sqrt(1.0 - eps)
    b = (two_j + 1.0) * eps / (math.sqrt(1.0 + two_j * eps) + a)
    return a, b


@dataclass(frozen=True)
class WeakSpinApparatus:
    """Derived quantities of a strength-``eps`` weak measurement on spin j."""

    j: float
    strength: float
    a: float
    b: float
    a_factor: float

    @classmethod
    def from_strength(cls, j: float, eps: float) -> "WeakSpinApparatus":
        two_j = _check_j(j)
        eps = _check_strength(eps)
        a, b = _ab_coefficients(two_j, eps)
        n = float(two_j)
        a_factor = 2.0 * a * b + (n + 1.0) * a * a + n * b * b / (n + 2.0)
        return cls(j=j, strength=eps, a=a, b=b, a_factor=a_factor)


def greedy_spin_lambda(j: float) -> np.ndarray:
    """Weight-mixing matrix of the most informative covariant spin measurement.

    ``Lambda[p, q] = (2j+1)/(4j+1) C(2j, p) C(2j, q) / C(4j, p + q)`` with
    ``p = j + m``; symmetric with unit row sums, so it is doubly stochastic
    on the weight simplex. Built in log space to survive large ``j``.
    Construction is O((2j+1)^2); callers that apply it repeatedly should
    build it once and pass it to :func:`weak_spin_apply`.
    """
    two_j = _check_j(j)
    dim = two_j + 1
    lb = np.array([log_binomial(two_j, p) for p in range(dim)])
    lb4 = np.array([log_binomial(2 * two_j, s) for s in range(2 * two_j + 1)])
    log_pref = math.log((two_j + 1.0) / (2.0 * two_j + 1.0))
    p = np.arange(dim)
    log_lam = log_pref + lb[:, None] + lb[None, :] - lb4[p[:, None] + p[None, :]]
    return np.exp(log_lam)


def jz_factor(j: float, eps: float) -> float:
    """Scalar multiplying ``<J_z>`` under one weak measurement of strength ``eps``.

    Equals ``a^2 + 2ab/(2j+1) + b^2 j / ((j+1)(2j+1))``; at ``j = 1/2`` it
    coincides with the qudit shrink ``r_of_strength(eps, 2)``, and at
    ``eps = 1`` it reduces to ``N/(N+2)`` with ``N = 2j``.
    """
    two_j = _check_j(j)
    eps = _check_strength(eps)
    if two_j == 0:
        return 1.0
    a, b = _ab_coefficients(two_j, eps)
    n = float(two_j)
    return a * a + 2.0 * a * b / (n + 1.0) + b * b * n / ((n + 2.0) * (n + 1.0))


def stochastic_jz_factor(j: float, eps: float) -> float:
    """``<J_z>`` factor ``1 - eps/(j+1)`` of the stochastic realization."""
    _check_j(j)
    eps = _check_strength(eps)
    return 1.0 - eps / (j + 1.0)


def weak_spin_apply(
    state: SpinDiagonalState,
    eps: float,
    lam: np.ndarray | None = None,
    stochastic: bool = False,
) -> SpinDiagonalState:
    """One step of the averaged weak-measurement channel on a diagonal state.

    With the default Hermitian-square-root realization the output weights are
    ``((a^2 (2j+1) + 2ab) s + b^2 (Lambda s)) / (2j+1)``; with
    ``stochastic=True`` the gentler-looking but more destructive realization
    ``(1 - eps) s + eps (Lambda s)`` is applied instead (identity with
    probability ``1 - eps``, full collapse otherwise).

    ``lam`` may carry a precomputed :func:`greedy_spin_lambda` matrix; it is
    never cached internally.
    """
    eps = _check_strength(eps)
    two_j = round(2.0 * state.j)
    if lam is None:
        lam = greedy_spin_lambda(state.j)
    elif lam.shape != (two_j + 1, two_j + 1):
        raise DomainError(f"Lambda has shape {lam.shape}, expected {(two_j + 1, two_j + 1)}")
    s = state.weights
    if stochastic:
        out = (1.0 - eps) * s + eps * (lam @ s)
    else:
        a, b = _ab_coefficients(two_j, eps)
        dim = two_j + 1.0
        out = ((a * a * dim + 2.0 * a * b) * s + b * b * (lam @ s)) / dim
    if out.min() < _WEIGHT_CLAMP:
        raise DomainError(f"channel produced weight {out.min()!r} below clamp threshold")
    out = np.where(out < 0.0, 0.0, out)
    return SpinDiagonalState(state.j, out / out.sum())
