"""Trajectory simulation of actual measurement chains and Haar-integral checks.

This module is the independent verification engine: it never consumes the
closed-form results from :mod:`~obschain.strategies`, only the Kraus-level
description of the apparatus, so agreement between the two is a genuine
cross-check.

Determinism contract: each trial owns a random stream derived purely from
``(master_seed, trial_index)`` via ``numpy.random.SeedSequence`` spawn keys,
and reductions run in trial order, so results are bit-identical for a fixed
configuration regardless of batching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .core.combinat import log_binomial
from .core.sampling import haar_unitaries
from .core.states import gell_mann
from .errors import DomainError, NumericError

_BATCH = 2048
_REJECTION_CAP = 10**6


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one simulated measurement chain."""

    system: Literal["qudit", "spin"]
    observers: int
    strengths: np.ndarray
    trials: int
    master_seed: int
    d: int | None = None
    n_copies: int | None = None
    stochastic_realization: bool = False

    def __post_init__(self) -> None:
        if self.system not in ("qudit", "spin"):
            raise DomainError(f"system must be 'qudit' or 'spin', got {self.system!r}")
        if self.observers < 1:
            raise DomainError(f"observer count must be >= 1, got {self.observers}")
        if self.trials < 1:
            raise DomainError(f"trial count must be >= 1, got {self.trials}")
        eps = np.atleast_1d(np.asarray(self.strengths, dtype=float))
        if eps.size == 1:
            eps = np.full(self.observers, float(eps[0]))
        if eps.shape != (self.observers,):
            raise DomainError(f"need one strength per observer, got shape {eps.shape}")
        if eps.min() < 0.0 or eps.max() > 1.0:
            raise DomainError("strengths must lie in [0, 1]")
        eps.setflags(write=False)
        object.__setattr__(self, "strengths", eps)
        if self.system == "qudit":
            if self.d is None or self.d < 2:
                raise DomainError("qudit chains need d >= 2")
        else:
            if self.n_copies is None or self.n_copies < 1:
                raise DomainError("spin chains need n_copies >= 1")


@dataclass(frozen=True)
class SimResult:
    """Per-observer fidelity estimates with standard errors."""

    per_observer_mean: np.ndarray
    per_observer_stderr: np.ndarray
    trials_used: int
    seed_echo: int

    def __post_init__(self) -> None:
        for name in ("per_observer_mean", "per_observer_stderr"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def _trial_rng(master_seed: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(seq))


def _reduce(fids: np.ndarray, master_seed: int) -> SimResult:
    trials = fids.shape[0]
    mean = fids.mean(axis=0)
    if trials >= 2:
        stderr = fids.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        stderr = np.zeros_like(mean)
    return SimResult(
        per_observer_mean=mean,
        per_observer_stderr=stderr,
        trials_used=trials,
        seed_echo=master_seed,
    )


# ---------------------------------------------------------------------------
# qudit chain


def simulate_qudit_chain(config: SimConfig) -> SimResult:
    """Simulate K observers weakly measuring one qudit in random frames.

    Per trial: a Haar-random pure state is drawn; each observer applies the
    optimal weak d-outcome measurement in an independently Haar-random basis,
    the outcome is sampled from the POVM statistics, the state is updated by
    the Hermitian Kraus operator of that outcome, and the observer's guess is
    the outcome basis ket. Fidelity is recorded against the original state.
    """
    if config.system != "qudit":
        raise DomainError("simulate_qudit_chain needs a qudit configuration")
    d = int(config.d)
    k_obs = config.observers
    eps = config.strengths
    fids = np.empty((config.trials, k_obs))

    o_m = 1.0 + eps * (d - 1.0)
    alphas = np.sqrt(o_m / d)
    betas = np.sqrt((d - o_m) / (d * (d - 1.0)))
    prob_slope = (o_m - 1.0) / (d - 1.0)
    prob_floor = (d - o_m) / (d * (d - 1.0))

    done = 0
    while done < config.trials:
        b = min(_BATCH, config.trials - done)
        frames = np.empty((b, k_obs, d, d), dtype=complex)
        psi = np.empty((b, d), dtype=complex)
        unif = np.empty((b, k_obs))
        for i in range(b):
            rng = _trial_rng(config.master_seed, done + i)
            z = rng.standard_normal((d, 2))
            v = z[:, 0] + 1j * z[:, 1]
            psi[i] = v / np.linalg.norm(v)
            frames[i] = haar_unitaries(d, k_obs, rng)
            unif[i] = rng.random(k_obs)

        rho = np.einsum("bi,bj->bij", psi, psi.conj())
        for k in range(k_obs):
            u_k = frames[:, k]  # columns are outcome kets
            diag = np.einsum("bia,bij,bja->ba", u_k.conj(), rho, u_k).real
            probs = prob_slope[k] * diag + prob_floor[k]
            cum = np.cumsum(probs, axis=1)
            idx = (unif[:, k][:, None] * cum[:, -1:] > cum).sum(axis=1)
            w = np.take_along_axis(u_k, idx[:, None, None], axis=2)[:, :, 0]
            fids[done : done + b, k] = np.abs(np.einsum("bi,bi->b", w.conj(), psi)) ** 2
            # A = beta 1 + (alpha - beta) |w><w|, applied as A rho A / tr
            gam = alphas[k] - betas[k]
            s = np.einsum("bk,bkj->bj", w.conj(), rho)
            q = np.einsum("bj,bj->b", s, w).real
            p_rho = np.einsum("bi,bj->bij", w, s)
            rho = (
                betas[k] ** 2 * rho
                + betas[k] * gam * (p_rho + p_rho.conj().transpose(0, 2, 1))
                + gam**2 * q[:, None, None] * np.einsum("bi,bj->bij", w, w.conj())
            )
            trace = np.einsum("bii->b", rho).real
            rho /= trace[:, None, None]
        done += b
    return _reduce(fids, config.master_seed)


# ---------------------------------------------------------------------------
# spin chain


def _sample_direction(rng: np.random.Generator) -> tuple[float, float]:
    cos_theta = 1.0 - 2.0 * rng.random()
    phi = 2.0 * math.pi * rng.random()
    return cos_theta, phi


def _coherent_vector(two_j: int, cos_theta: float, phi: float, sqc: np.ndarray) -> np.ndarray:
    c = math.sqrt(0.5 * (1.0 + cos_theta))
    s = math.sqrt(0.5 * (1.0 - cos_theta))
    p = np.arange(two_j + 1)
    return sqc * c**p * s ** (two_j - p) * np.exp(-1j * (two_j - p) * phi)


def simulate_spin_chain(config: SimConfig) -> SimResult:
    """Simulate K observers weakly measuring N qubit copies (spin j = N/2).

    Covariance fixes the true direction at the pole, so trials start from the
    pure ``m = +j`` state. Outcome directions follow the covariant POVM
    density ``(1 - eps) + eps (2j+1) <jj;n|rho|jj;n>``, sampled as a mixture:
    a uniform branch with probability ``1 - eps`` and a greedy branch via
    rejection with acceptance ``<jj;n|rho|jj;n>``. With the default
    Hermitian-square-root realization the update applies
    ``a + b |jj;n><jj;n|`` for every outcome; with
    ``stochastic_realization=True`` the uniform branch leaves the state
    untouched and the greedy branch collapses it onto the coherent state.
    Fidelity per observer is ``(1 + cos gamma)/2`` for outcome polar angle
    ``gamma``.
    """
    if config.system != "spin":
        raise DomainError("simulate_spin_chain needs a spin configuration")
    n = int(config.n_copies)
    two_j = n
    dim = two_j + 1
    eps = config.strengths
    sqc = np.exp(0.5 * np.array([log_binomial(two_j, p) for p in range(dim)]))
    ab = []
    for e in eps:
        a = math.sqrt(1.0 - e)
        b = (two_j + 1.0) * e / (math.sqrt(1.0 + two_j * e) + a)
        ab.append((a, b))

    fids = np.empty((config.trials, config.observers))
    for t in range(config.trials):
        rng = _trial_rng(config.master_seed, t)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[-1, -1] = 1.0
        for k, e in enumerate(eps):
            greedy_branch = not (rng.random() < 1.0 - e)
            if greedy_branch:
                proposals = 0
                while True:
                    cos_theta, phi = _sample_direction(rng)
                    v = _coherent_vector(two_j, cos_theta, phi, sqc)
                    accept = np.einsum("i,ij,j->", v.conj(), rho, v).real
                    proposals += 1
                    if rng.random() < accept:
                        break
                    if proposals >= _REJECTION_CAP:
                        raise NumericError(
                            f"rejection sampling stalled (acceptance < {1.0 / _REJECTION_CAP:g}) "
                            f"at observer {k + 1}, trial {t}"
                        )
            else:
                cos_theta, phi = _sample_direction(rng)
                v = _coherent_vector(two_j, cos_theta, phi, sqc)
            fids[t, k] = 0.5 * (1.0 + cos_theta)

            if config.stochastic_realization:
                if greedy_branch:
                    rho = np.outer(v, v.conj())
            else:
                a, b = ab[k]
                s = v.conj() @ rho
                q = (s @ v).real
                p_rho = np.outer(v, s)
                rho = a * a * rho + a * b * (p_rho + p_rho.conj().T) + b * b * q * np.outer(v, v.conj())
                rho /= np.trace(rho).real
    return _reduce(fids, config.master_seed)


# ---------------------------------------------------------------------------
# Haar-moment verification


@dataclass(frozen=True)
class MomentCheck:
    """Worst-entry summary of an empirical moment tensor against its target."""

    max_abs_deviation: float
    max_sigma_ratio: float
    entries: int


@dataclass(frozen=True)
class HaarMomentReport:
    d: int
    samples: int
    seed: int
    second: MomentCheck
    fourth: MomentCheck

    def all_within(self, n_sigma: float) -> bool:
        return self.second.max_sigma_ratio <= n_sigma and self.fourth.max_sigma_ratio <= n_sigma


def _exact_second_moment(d: int) -> np.ndarray:
    delta = np.eye(d)
    return np.einsum("is,jr->ijsr", delta, delta) / d


def _exact_fourth_moment(d: int) -> np.ndarray:
    delta = np.eye(d)
    row_sym = np.einsum("is,kv->iksv", delta, delta) + np.einsum("iv,ks->iksv", delta, delta)
    row_asym = np.einsum("is,kv->iksv", delta, delta) - np.einsum("iv,ks->iksv", delta, delta)
    col_sym = np.einsum("jr,lt->jlrt", delta, delta) + np.einsum("jt,lr->jlrt", delta, delta)
    col_asym = np.einsum("jr,lt->jlrt", delta, delta) - np.einsum("jt,lr->jlrt", delta, delta)
    out = np.einsum("iksv,jlrt->ijklsrvt", row_sym, col_sym) / (2.0 * d * (d + 1.0))
    out += np.einsum("iksv,jlrt->ijklsrvt", row_asym, col_asym) / (2.0 * d * (d - 1.0))
    return out


def verify_haar_moments(d: int, samples: int, seed: int) -> HaarMomentReport:
    """Empirically check the second and fourth Haar moments of the sampler.

    Second moments are compared against ``delta_is delta_jr / d`` and fourth
    moments against the two-term symmetric/antisymmetric identity with
    weights ``1/(2d(d+1))`` and ``1/(2d(d-1))``, for every index combination.
    The per-entry standard error combines real and imaginary variances.
    """
    if d < 2:
        raise DomainError(f"moment verification needs d >= 2, got {d}")
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    rng = _trial_rng(seed, 0)
    sum2 = np.zeros((d,) * 4, dtype=complex)
    sum2_sq = np.zeros((d,) * 4)
    sum4 = np.zeros((d,) * 8, dtype=complex)
    sum4_sq = np.zeros((d,) * 8)
    done = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        u = haar_unitaries(d, b, rng)
        sum2 += np.einsum("bij,bsr->ijsr", u, u.conj())
        mag2 = np.abs(u) ** 2
        sum2_sq += np.einsum("bij,bsr->ijsr", mag2, mag2)
        pair = np.einsum("bij,bkl->bijkl", u, u)
        sum4 += np.einsum("bijkl,bsrvt->ijklsrvt", pair, pair.conj())
        pair_mag2 = np.abs(pair) ** 2
        sum4_sq += np.einsum("bijkl,bsrvt->ijklsrvt", pair_mag2, pair_mag2)
        done += b

    def check(total, total_sq, exact) -> MomentCheck:
        mean = total / samples
        var = np.maximum(total_sq / samples - np.abs(mean) ** 2, 0.0)
        stderr = np.sqrt(var / samples)
        dev = np.abs(mean - exact)
        ratio = dev / np.where(stderr > 0.0, stderr, np.inf)
        return MomentCheck(
            max_abs_deviation=float(dev.max()),
            max_sigma_ratio=float(ratio.max()),
            entries=int(dev.size),
        )

    return HaarMomentReport(
        d=d,
        samples=samples,
        seed=seed,
        second=check(sum2, sum2_sq, _exact_second_moment(d)),
        fourth=check(sum4, sum4_sq, _exact_fourth_moment(d)),
    )


# ---------------------------------------------------------------------------
# channel shrink and Bloch shrink estimators


@dataclass(frozen=True)
class ChannelShrinkEstimate:
    r_hat: float
    stderr: float
    samples: int
    seed: int


def estimate_channel_r(d: int, eps: float, samples: int, seed: int) -> ChannelShrinkEstimate:
    """Monte Carlo estimate of the frame-averaged depolarizing shrink.

    For Haar-random frames the outcome-summed channel output is averaged and
    the shrink is fitted from the overlap with the pure input: per frame,
    ``x = (sum_a <u|A_a|u>^2 - 1/d) / (1 - 1/d)`` with ``u`` the input state
    in the rotated frame. The mean of ``x`` converges to
    ``r_of_strength(eps, d)``.
    """
    if d < 2:
        raise DomainError(f"channel estimation needs d >= 2, got {d}")
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"strength must lie in [0, 1], got {eps}")
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    o_m = 1.0 + eps * (d - 1.0)
    alpha = math.sqrt(o_m / d)
    beta = math.sqrt((d - o_m) / (d * (d - 1.0)))
    rng = _trial_rng(seed, 0)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        u = haar_unitaries(d, b, rng)
        # input |e_d>; |<a-th frame ket|e_d>|^2 is the last row's magnitude
        mag2 = np.abs(u[:, -1, :]) ** 2
        expect = beta + (alpha - beta) * mag2  # <psi|g A_a g^dag|psi> per outcome
        overlap = np.sum(expect * expect, axis=1)  # Tr[chi_g(psi) psi]
        done += b
        x = (overlap - 1.0 / d) / (1.0 - 1.0 / d)
        total += float(x.sum())
        total_sq += float((x * x).sum())
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return ChannelShrinkEstimate(
        r_hat=mean, stderr=math.sqrt(var / samples), samples=samples, seed=seed
    )


@dataclass(frozen=True)
class BlochShrinkReport:
    """Conditional Bloch average given the guess, split along/orthogonal to it."""

    d: int
    eps: float
    samples: int
    seed: int
    delta_hat: float
    delta_stderr: float
    orthogonal_mean: np.ndarray = field(repr=False)
    orthogonal_stderr: np.ndarray = field(repr=False)

    def max_orthogonal_sigma(self) -> float:
        ratio = np.abs(self.orthogonal_mean) / np.where(
            self.orthogonal_stderr > 0.0, self.orthogonal_stderr, np.inf
        )
        return float(ratio.max())


def verify_bloch_shrink(d: int, eps: float, samples: int, seed: int) -> BlochShrinkReport:
    """Estimate the conditional Bloch-vector average given a fixed guess.

    Each sample draws a Haar state and one weak measurement in a Haar frame;
    the guessed ket is rotated onto the reference axis (a Householder
    reflection), and the Bloch vector of the correspondingly rotated true
    state is accumulated. By covariance the mean must be proportional to the
    reference Bloch vector: the component along it is returned as
    ``delta_hat`` and every orthogonal component should be consistent with
    zero.
    """
    if d < 2:
        raise DomainError(f"Bloch verification needs d >= 2, got {d}")
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"strength must lie in [0, 1], got {eps}")
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    o_m = 1.0 + eps * (d - 1.0)
    prob_slope = (o_m - 1.0) / (d - 1.0)
    prob_floor = (d - o_m) / (d * (d - 1.0))
    generators = gell_mann(d)
    scale = math.sqrt(2.0 * d / (d - 1.0))
    e_ref = np.zeros(d, dtype=complex)
    e_ref[-1] = 1.0

    rng = _trial_rng(seed, 0)
    n_comp = d * d - 1
    total = np.zeros(n_comp)
    total_sq = np.zeros(n_comp)
    done = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        z = rng.standard_normal((b, d, 2))
        psi = z[..., 0] + 1j * z[..., 1]
        psi /= np.linalg.norm(psi, axis=1)[:, None]
        u = haar_unitaries(d, b, rng)
        unif = rng.random(b)

        diag = np.abs(np.einsum("bia,bi->ba", u.conj(), psi)) ** 2
        probs = prob_slope * diag + prob_floor
        cum = np.cumsum(probs, axis=1)
        idx = (unif[:, None] * cum[:, -1:] > cum).sum(axis=1)
        w = np.take_along_axis(u, idx[:, None, None], axis=2)[:, :, 0]

        # Householder v = w + phase * e_ref maps w onto the reference axis
        # (up to phase); the sign choice keeps v away from zero.
        wd = w[:, -1]
        mag = np.abs(wd)
        phase = np.where(mag > 1e-12, wd / np.where(mag > 0.0, mag, 1.0), 1.0)
        v = w + phase[:, None] * e_ref[None, :]
        v_sq = np.einsum("bi,bi->b", v.conj(), v).real
        proj = np.einsum("bi,bi->b", v.conj(), psi)
        rotated = psi - 2.0 * (proj / v_sq)[:, None] * v

        n_vec = scale * np.einsum("bi,aij,bj->ba", rotated.conj(), generators, rotated).real
        total += n_vec.sum(axis=0)
        total_sq += (n_vec * n_vec).sum(axis=0)
        done += b

    mean = total / samples
    var = np.maximum(total_sq / samples - mean * mean, 0.0)
    stderr = np.sqrt(var / samples)
    # reference Bloch vector is (0, ..., 0, -1): the aligned component is -mean[-1]
    return BlochShrinkReport(
        d=d,
        eps=eps,
        samples=samples,
        seed=seed,
        delta_hat=-float(mean[-1]),
        delta_stderr=float(stderr[-1]),
        orthogonal_mean=mean[:-1],
        orthogonal_stderr=stderr[:-1],
    )
