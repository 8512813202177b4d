"""Closed-form fidelity calculators and schedule solvers.

Three scenarios are covered for a chain of K independent observers who
sequentially measure the same signal system:

* greedy -- every observer performs the most informative measurement; the
  k-th fidelity is a geometric decay of the shrinking factor;
* egalitarian -- measurement strengths are scheduled so all K observers
  reach the same fidelity; the schedule follows from inverting a
  one-step recursion backwards from the last observer's ``eps_K = 1``;
* privileged -- all observers use one identical apparatus whose strength is
  tuned to maximize the last observer's fidelity.

Fidelity/shrink convention: a shrink ``delta`` always converts to fidelity
as ``F = (1 + (d - 1) delta) / d`` (``d = 2`` for qubit lines).
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .channels import jz_factor, r_of_strength
from .core.encoding import OptimalEncoding, optimal_encoding
from .core.orthopoly import legendre_pn
from .errors import DomainError, NumericError, UnsupportedEncodingError

__all__ = [
    "Encoding",
    "ProblemParams",
    "StrengthSchedule",
    "StrategyReport",
    "chain_fidelities_ncopy",
    "chain_fidelities_qudit",
    "egalitarian_asymptotics",
    "egalitarian_report",
    "egalitarian_schedule_ncopy",
    "egalitarian_schedule_qudit",
    "fidelity_from_delta",
    "figure1_sweep",
    "greedy_fidelity",
    "optimal_encoding",
    "optimal_first_fidelity_quadrature",
    "privileged_delta",
    "privileged_optimize",
    "stochastic_baseline",
    "stochastic_strengths",
    "OptimalEncoding",
]


class Encoding(str, enum.Enum):
    """How the unknown qubit/qudit state is written into the signal system."""

    SINGLE_COPY = "single-copy"
    SYMMETRIC_COPIES = "symmetric-copies"
    OPTIMAL_QUBIT = "optimal-qubit"
    COPIES_THEN_OPTIMAL = "copies-then-optimal"


@dataclass(frozen=True)
class ProblemParams:
    """Dimension, copy count, observer count and encoding of one scenario."""

    d: int
    n_copies: int
    observers: int
    encoding: Encoding = Encoding.SYMMETRIC_COPIES

    def __post_init__(self) -> None:
        if self.d < 2:
            raise DomainError(f"local dimension must be >= 2, got {self.d}")
        if self.n_copies < 1:
            raise DomainError(f"copy count must be >= 1, got {self.n_copies}")
        if self.observers < 1:
            raise DomainError(f"observer count must be >= 1, got {self.observers}")
        enc = Encoding(self.encoding)
        object.__setattr__(self, "encoding", enc)
        if enc in (Encoding.OPTIMAL_QUBIT, Encoding.COPIES_THEN_OPTIMAL):
            if self.d != 2:
                raise UnsupportedEncodingError(f"{enc.value} encoding requires d = 2")
            if self.n_copies % 2 != 0:
                raise UnsupportedEncodingError(f"{enc.value} encoding requires even N")
        if enc is Encoding.SINGLE_COPY and self.n_copies != 1:
            raise DomainError("single-copy encoding requires n_copies = 1")


@dataclass(frozen=True)
class StrengthSchedule:
    """Per-observer strengths with the fidelity each observer attains."""

    strengths: np.ndarray
    per_observer_fidelity: np.ndarray

    def __post_init__(self) -> None:
        for name in ("strengths", "per_observer_fidelity"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.strengths.shape != self.per_observer_fidelity.shape:
            raise DomainError("strengths and fidelities must have equal length")


@dataclass(frozen=True)
class StrategyReport:
    """Exact values next to the matching asymptotics and the random baseline.

    Only the exact entries are constrained (asymptotic expressions may leave
    the physical range outside their regime of validity).
    """

    strategy: str
    d: int
    n_copies: int
    observers: int
    exact: dict[str, float]
    asymptotic: dict[str, float]
    baseline: dict[str, float]

    def __post_init__(self) -> None:
        for name, value in self.exact.items():
            if name.endswith("fidelity") and not 1.0 / self.d - 1e-12 <= value <= 1.0 + 1e-12:
                raise DomainError(f"exact {name}={value!r} outside [1/d, 1]")


def fidelity_from_delta(delta: float, d: int) -> float:
    """Convert a shrink factor to an average fidelity, ``(1+(d-1) delta)/d``."""
    return (1.0 + (d - 1.0) * delta) / d


# ---------------------------------------------------------------------------
# greedy strategy


def greedy_fidelity(params: ProblemParams, k: int) -> float:
    """Fidelity of the k-th greedy observer for the given encoding.

    symmetric copies: ``(1/d) [1 + (d-1) (N/(N+d))^k]``;
    optimal qubit:    ``(1/2) [1 + x^k]`` with ``x`` the encoding shrink;
    copies->optimal:  ``(1/2) [1 + (N/(N+2)) x^(k-1)]``.
    """
    if not 1 <= k <= params.observers:
        raise DomainError(f"observer index must lie in [1, {params.observers}], got {k}")
    d, n = params.d, params.n_copies
    enc = params.encoding
    if enc in (Encoding.SYMMETRIC_COPIES, Encoding.SINGLE_COPY):
        return fidelity_from_delta((n / (n + d)) ** k, d)
    if enc is Encoding.OPTIMAL_QUBIT:
        x = optimal_encoding(n).shrink
        return 0.5 * (1.0 + x**k)
    x = optimal_encoding(n).shrink
    return 0.5 * (1.0 + (n / (n + 2.0)) * x ** (k - 1))


# ---------------------------------------------------------------------------
# egalitarian schedules
#
# The strengths depend only on the distance to the end of the chain: with
# alpha(1) = eps_K = 1, the backward inversion alpha(i) -> alpha(i+1) is the
# same for every K, so one growing sequence per (system kind, parameter)
# serves all schedule and sweep queries.

_ALPHA_CACHE: dict[tuple[str, int], np.ndarray] = {}
_ALPHA_LOCK = threading.Lock()

_INVERT_TOL = 1e-14
_INVERT_MAX_ITER = 200


def _invert_qudit_step(target: float, d: int) -> float:
    """Solve ``eps / r(eps) = target`` for ``eps`` by bracketed bisection.

    ``r`` decreases, so with ``g(e) = target * r(e)`` any lower bound ``L`` of
    the root gives the upper bound ``g(L)`` and vice versa; two such squeezes
    starting from the guaranteed bracket ``[g(target), target]`` shrink it by
    the local contraction factor before bisection takes over.
    """
    dm1, dp1, two_md = d - 1.0, d + 1.0, 2.0 - d
    sqrt = math.sqrt
    lo = target * (dm1 + two_md * target + 2.0 * sqrt((1.0 + target * dm1) * (1.0 - target))) / dp1
    hi = target * (dm1 + two_md * lo + 2.0 * sqrt((1.0 + lo * dm1) * (1.0 - lo))) / dp1
    if hi > target:
        hi = target
    lo2 = target * (dm1 + two_md * hi + 2.0 * sqrt((1.0 + hi * dm1) * (1.0 - hi))) / dp1
    if lo2 > lo:
        lo = lo2
    for _ in range(_INVERT_MAX_ITER):
        if hi - lo <= _INVERT_TOL:
            break
        mid = 0.5 * (lo + hi)
        r_mid = (dm1 + two_md * mid + 2.0 * sqrt((1.0 + mid * dm1) * (1.0 - mid))) / dp1
        if mid > target * r_mid:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _invert_ncopy_step(target: float, n: int) -> float:
    """Solve ``eps / jz_factor(eps) = target`` for ``eps``; same scheme as above."""
    np1 = n + 1.0
    c1 = 2.0 / np1
    c2 = n / ((n + 2.0) * np1)
    sqrt = math.sqrt

    a = sqrt(1.0 - target)
    b = np1 * target / (sqrt(1.0 + n * target) + a)
    lo = target * (a * a + c1 * a * b + c2 * b * b)
    a = sqrt(1.0 - lo)
    b = np1 * lo / (sqrt(1.0 + n * lo) + a)
    hi = target * (a * a + c1 * a * b + c2 * b * b)
    if hi > target:
        hi = target
    a = sqrt(1.0 - hi)
    b = np1 * hi / (sqrt(1.0 + n * hi) + a)
    lo2 = target * (a * a + c1 * a * b + c2 * b * b)
    if lo2 > lo:
        lo = lo2
    for _ in range(_INVERT_MAX_ITER):
        if hi - lo <= _INVERT_TOL:
            break
        mid = 0.5 * (lo + hi)
        a = sqrt(1.0 - mid)
        b = np1 * mid / (sqrt(1.0 + n * mid) + a)
        if mid > target * (a * a + c1 * a * b + c2 * b * b):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _alpha_sequence(kind: str, param: int, length: int) -> np.ndarray:
    """Strengths by distance-from-end, ``alpha[0] = 1``; cached and extended."""
    key = (kind, param)
    with _ALPHA_LOCK:
        cached = _ALPHA_CACHE.get(key)
        if cached is not None and len(cached) >= length:
            return cached[:length]
        start = 1 if cached is None else len(cached)
        alpha = np.empty(length)
        if cached is None:
            alpha[0] = 1.0
        else:
            alpha[: len(cached)] = cached
        invert = _invert_qudit_step if kind == "qudit" else _invert_ncopy_step
        for i in range(start, length):
            alpha[i] = invert(alpha[i - 1], param)
        alpha.setflags(write=False)
        _ALPHA_CACHE[key] = alpha
        return alpha


def egalitarian_schedule_qudit(d: int, observers: int) -> StrengthSchedule:
    """Strength schedule giving every one of K observers equal fidelity (qudit).

    ``eps_K = 1``; earlier strengths solve ``eps_k = eps_{k+1} r(eps_k)``.
    Every observer then attains
    ``F = 1/d + eps_k (d-1)/(d(d+1)) prod_{b<k} r(eps_b)``.
    """
    if d < 2:
        raise DomainError(f"local dimension must be >= 2, got {d}")
    if observers < 1:
        raise DomainError(f"observer count must be >= 1, got {observers}")
    eps = _alpha_sequence("qudit", d, observers)[::-1]
    shrinks = (
        d - 1.0 + (2.0 - d) * eps + 2.0 * np.sqrt((1.0 + eps * (d - 1.0)) * (1.0 - eps))
    ) / (d + 1.0)
    log_prod = np.concatenate(([0.0], np.cumsum(np.log(shrinks[:-1]))))
    fid = 1.0 / d + eps * (d - 1.0) / (d * (d + 1.0)) * np.exp(log_prod)
    return StrengthSchedule(strengths=eps, per_observer_fidelity=fid)


def egalitarian_schedule_ncopy(n_copies: int, observers: int) -> StrengthSchedule:
    """Equal-fidelity schedule for N qubit copies (spin ``j = N/2``).

    The common fidelity is ``(1 + delta_eq)/2`` with
    ``delta_eq = eps_1 N/(N+2)``; at ``N = 1`` the schedule coincides with
    the qudit one at ``d = 2``. The apparatus family is restricted to a
    single strength parameter per observer (identity POVM mixed with the
    most informative covariant one), so for ``N > 1`` the common fidelity is
    a lower bound on what unrestricted apparata might achieve.
    """
    if n_copies < 1:
        raise DomainError(f"copy count must be >= 1, got {n_copies}")
    if observers < 1:
        raise DomainError(f"observer count must be >= 1, got {observers}")
    n = n_copies
    eps = _alpha_sequence("ncopy", n, observers)[::-1]
    a = np.sqrt(1.0 - eps)
    b = (n + 1.0) * eps / (np.sqrt(1.0 + n * eps) + a)
    factors = a * a + 2.0 * a * b / (n + 1.0) + b * b * n / ((n + 2.0) * (n + 1.0))
    log_prod = np.concatenate(([0.0], np.cumsum(np.log(factors[:-1]))))
    fid = 0.5 * (1.0 + eps * (n / (n + 2.0)) * np.exp(log_prod))
    return StrengthSchedule(strengths=eps, per_observer_fidelity=fid)


def chain_fidelities_qudit(d: int, strengths: np.ndarray) -> np.ndarray:
    """Per-observer fidelities of an arbitrary qudit strength schedule.

    Forward recomputation through the channel recursion: observer k sees the
    state shrunk by ``prod_{b<k} r(eps_b)`` and attains
    ``1/d + eps_k (d-1)/(d(d+1))`` times that product.
    """
    if d < 2:
        raise DomainError(f"local dimension must be >= 2, got {d}")
    eps = np.asarray(strengths, dtype=float)
    if eps.ndim != 1 or eps.size < 1:
        raise DomainError("strengths must be a nonempty 1-D array")
    if eps.min() < 0.0 or eps.max() > 1.0:
        raise DomainError("strengths must lie in [0, 1]")
    shrinks = (
        d - 1.0 + (2.0 - d) * eps + 2.0 * np.sqrt((1.0 + eps * (d - 1.0)) * (1.0 - eps))
    ) / (d + 1.0)
    log_prod = np.concatenate(([0.0], np.cumsum(np.log(shrinks[:-1]))))
    return 1.0 / d + eps * (d - 1.0) / (d * (d + 1.0)) * np.exp(log_prod)


def chain_fidelities_ncopy(
    n_copies: int, strengths: np.ndarray, stochastic: bool = False
) -> np.ndarray:
    """Per-observer fidelities of an arbitrary N-copy strength schedule.

    Uses the scalar ``<J_z>`` recursion of the weak spin channel; with
    ``stochastic=True`` the more destructive guess-or-measure realization
    (factor ``1 - eps/(N/2+1)``) is propagated instead.
    """
    if n_copies < 1:
        raise DomainError(f"copy count must be >= 1, got {n_copies}")
    eps = np.asarray(strengths, dtype=float)
    if eps.ndim != 1 or eps.size < 1:
        raise DomainError("strengths must be a nonempty 1-D array")
    if eps.min() < 0.0 or eps.max() > 1.0:
        raise DomainError("strengths must lie in [0, 1]")
    n = n_copies
    if stochastic:
        factors = 1.0 - eps / (0.5 * n + 1.0)
    else:
        a = np.sqrt(1.0 - eps)
        b = (n + 1.0) * eps / (np.sqrt(1.0 + n * eps) + a)
        factors = a * a + 2.0 * a * b / (n + 1.0) + b * b * n / ((n + 2.0) * (n + 1.0))
    log_prod = np.concatenate(([0.0], np.cumsum(np.log(factors[:-1]))))
    return 0.5 * (1.0 + eps * (n / (n + 2.0)) * np.exp(log_prod))


def egalitarian_asymptotics(
    observers: int,
    *,
    d: int | None = None,
    n_copies: int | None = None,
    regime: str = "large-k",
) -> float:
    """Leading-order shrink ``delta`` of the egalitarian strategy.

    ``regime='large-k'`` with ``d``: ``(1/d) sqrt(2/((d+1) K))``;
    ``regime='large-k'`` with ``n_copies``: ``N / sqrt((N+1)(N+2) K)``;
    ``regime='large-n'`` with ``n_copies``: ``1 - 2K/(N+2)``.
    Approximation quality is the caller's concern.
    """
    if observers < 1:
        raise DomainError(f"observer count must be >= 1, got {observers}")
    if (d is None) == (n_copies is None):
        raise DomainError("pass exactly one of d or n_copies")
    if regime == "large-k":
        if d is not None:
            return (1.0 / d) * math.sqrt(2.0 / ((d + 1.0) * observers))
        n = float(n_copies)
        return n / math.sqrt((n + 1.0) * (n + 2.0) * observers)
    if regime == "large-n":
        if n_copies is None:
            raise DomainError("large-n regime needs n_copies")
        return 1.0 - 2.0 * observers / (n_copies + 2.0)
    raise DomainError(f"unknown regime {regime!r}")


def egalitarian_report(n_copies: int, observers: int) -> StrategyReport:
    """Exact egalitarian results next to their asymptotics and the baseline."""
    schedule = egalitarian_schedule_ncopy(n_copies, observers)
    delta_eq = float(schedule.strengths[0]) * n_copies / (n_copies + 2.0)
    report = StrategyReport(
        strategy="egalitarian",
        d=2,
        n_copies=n_copies,
        observers=observers,
        exact={"delta": delta_eq, "fidelity": 0.5 * (1.0 + delta_eq)},
        asymptotic={
            "delta_large_k": egalitarian_asymptotics(observers, n_copies=n_copies, regime="large-k"),
            "delta_large_n": egalitarian_asymptotics(observers, n_copies=n_copies, regime="large-n"),
        },
        baseline={"delta_stochastic": stochastic_baseline(n_copies, observers)},
    )
    return report


def stochastic_baseline(n_copies: int, observers: int) -> float:
    """Shrink ``N/(N+2K)`` of the guess-or-measure stochastic realization.

    Also equals the greedy shrink on an ``N/K`` share of the copies.
    """
    if n_copies < 1 or observers < 1:
        raise DomainError("need n_copies >= 1 and observers >= 1")
    return n_copies / (n_copies + 2.0 * observers)


def stochastic_strengths(n_copies: int, observers: int) -> np.ndarray:
    """Equalizing strengths ``eps_k = (N/2+1)/(N/2+K-k+1)`` for the stochastic realization."""
    if n_copies < 1 or observers < 1:
        raise DomainError("need n_copies >= 1 and observers >= 1")
    half = n_copies / 2.0
    k = np.arange(1, observers + 1, dtype=float)
    return (half + 1.0) / (half + observers - k + 1.0)


# ---------------------------------------------------------------------------
# privileged observer


def _privileged_log_delta_qudit(eps: float, d: int, observers: int) -> float:
    return math.log(eps / (d + 1.0)) + (observers - 1) * math.log(r_of_strength(eps, d))


def _privileged_log_delta_ncopy(eps: float, n: int, observers: int) -> float:
    factor = jz_factor(n / 2.0, eps)
    return math.log(eps * n / (n + 2.0)) + (observers - 1) * math.log(factor)


def privileged_delta(params: ProblemParams, eps: float) -> float:
    """Shrink of the last observer when all K share one strength-``eps`` apparatus.

    Single copy: ``eps/(d+1) r(eps)^(K-1)``; N qubit copies:
    ``eps N/(N+2) (A(eps)/(N+1))^(K-1)``. Evaluated in log space so long
    chains underflow gracefully to zero.
    """
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"shared strength must lie in (0, 1], got {eps}")
    if params.encoding is Encoding.SINGLE_COPY:
        return math.exp(_privileged_log_delta_qudit(eps, params.d, params.observers))
    if params.encoding is Encoding.SYMMETRIC_COPIES:
        if params.d != 2:
            raise UnsupportedEncodingError("the N-copy privileged formula requires d = 2")
        return math.exp(_privileged_log_delta_ncopy(eps, params.n_copies, params.observers))
    raise UnsupportedEncodingError(
        f"privileged strategy is defined for single-copy and symmetric-copies, not {params.encoding.value}"
    )


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def privileged_optimize(params: ProblemParams, tol: float = 1e-12) -> tuple[float, float]:
    """Strength maximizing the privileged observer's shrink, with its value.

    A 64-point coarse scan localizes the bracket; golden-section search
    refines it to ``tol`` in epsilon. Unimodality over (0, 1] is assumed.
    For ``K = 1`` the shrink is monotone in ``eps`` and the optimum is
    exactly 1.
    """
    if params.observers == 1:
        return 1.0, privileged_delta(params, 1.0)

    def value(eps: float) -> float:
        if eps <= 0.0:
            return -math.inf
        if params.encoding is Encoding.SINGLE_COPY:
            return _privileged_log_delta_qudit(eps, params.d, params.observers)
        return _privileged_log_delta_ncopy(eps, params.n_copies, params.observers)

    if params.encoding is Encoding.SYMMETRIC_COPIES and params.d != 2:
        raise UnsupportedEncodingError("the N-copy privileged formula requires d = 2")
    if params.encoding not in (Encoding.SINGLE_COPY, Encoding.SYMMETRIC_COPIES):
        raise UnsupportedEncodingError(
            f"privileged strategy is defined for single-copy and symmetric-copies, not {params.encoding.value}"
        )

    grid = np.linspace(0.0, 1.0, 64)
    values = [value(float(e)) for e in grid]
    best = int(np.argmax(values))
    a = float(grid[max(best - 1, 0)])
    b = float(grid[min(best + 1, len(grid) - 1)])
    c = b - _GOLDEN * (b - a)
    d_pt = a + _GOLDEN * (b - a)
    fc, fd = value(c), value(d_pt)
    while b - a > tol:
        if fc > fd:
            b, d_pt, fd = d_pt, c, fc
            c = b - _GOLDEN * (b - a)
            fc = value(c)
        else:
            a, c, fc = c, d_pt, fd
            d_pt = a + _GOLDEN * (b - a)
            fd = value(d_pt)
    eps_star = 0.5 * (a + b)
    if 1.0 - eps_star <= 2.0 * tol and value(1.0) >= value(eps_star):
        eps_star = 1.0
    return eps_star, math.exp(value(eps_star))


# ---------------------------------------------------------------------------
# quadrature route to the first-observer fidelity of the optimal encoding


def _first_fidelity_by_quadrature(enc: OptimalEncoding, nodes: int) -> float:
    t, w = leggauss(nodes)
    half = enc.n_qubits // 2
    weights = np.sqrt(2.0 * np.arange(half + 1) + 1.0) * enc.coefficients
    b_vals = np.zeros_like(t)
    for j, coeff in enumerate(weights):
        b_vals += coeff * legendre_pn(j, t)
    density = b_vals * b_vals  # joint density over cos(gamma), d(mu) = dt/2
    return float(np.sum(w * density * (1.0 + t) / 2.0) / 2.0)


def optimal_first_fidelity_quadrature(n_qubits: int) -> float:
    """First-observer fidelity of the optimal encoding via 1-D quadrature.

    Integrates ``p(gamma) (1 + cos gamma)/2`` over the sphere, where the
    outcome density is the squared Legendre series of the measurement seed
    against the encoding coefficients. The integrand is a polynomial of
    degree ``N + 1`` in ``cos gamma``, so Gauss-Legendre with ``N + 18``
    nodes is already exact; a doubled-node evaluation guards against that
    reasoning being violated.

    Must agree with ``(1 + shrink)/2`` of :func:`optimal_encoding`; the two
    routes share no numerics.
    """
    enc = optimal_encoding(n_qubits)
    nodes = 2 * (n_qubits // 2 + 1) + 16
    coarse = _first_fidelity_by_quadrature(enc, nodes)
    fine = _first_fidelity_by_quadrature(enc, 2 * nodes)
    if abs(coarse - fine) > 1e-12:
        raise NumericError(
            f"quadrature not converged for N={n_qubits}: "
            f"{nodes} nodes -> {coarse!r}, {2 * nodes} nodes -> {fine!r}"
        )
    return fine


# ---------------------------------------------------------------------------
# data sweep: egalitarian shrink against observers, with fixed companions


def figure1_sweep(n_copies: int, k_values: list[int]) -> list[dict[str, float]]:
    """Rows of the shrink-versus-observers sweep for N qubit copies.

    Columns per row: ``K``, exact egalitarian shrink ``delta_exact``, the
    two limiting approximations, and the stochastic baseline.
    """
    if n_copies < 1:
        raise DomainError(f"copy count must be >= 1, got {n_copies}")
    if not k_values:
        raise DomainError("grid of observer counts must be nonempty")
    ks = sorted(set(int(k) for k in k_values))
    if ks[0] < 1:
        raise DomainError(f"grid observer counts must be >= 1, got {ks[0]}")
    alpha = _alpha_sequence("ncopy", n_copies, ks[-1])
    rows = []
    for k in ks:
        rows.append(
            {
                "K": k,
                "delta_exact": float(alpha[k - 1]) * n_copies / (n_copies + 2.0),
                "delta_asym_large_k": egalitarian_asymptotics(k, n_copies=n_copies, regime="large-k"),
                "delta_asym_large_n": egalitarian_asymptotics(k, n_copies=n_copies, regime="large-n"),
                "delta_stochastic": stochastic_baseline(n_copies, k),
            }
        )
    return rows
