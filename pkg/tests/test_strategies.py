import math

import numpy as np
import pytest

from obschain.channels import jz_factor, r_of_strength
from obschain.core import legendre_largest_zero, legendre_pn
from obschain.errors import DomainError, UnsupportedEncodingError
from obschain.strategies import (
    Encoding,
    ProblemParams,
    chain_fidelities_ncopy,
    chain_fidelities_qudit,
    egalitarian_asymptotics,
    egalitarian_schedule_ncopy,
    egalitarian_schedule_qudit,
    fidelity_from_delta,
    figure1_sweep,
    greedy_fidelity,
    optimal_encoding,
    optimal_first_fidelity_quadrature,
    privileged_delta,
    privileged_optimize,
    stochastic_baseline,
    stochastic_strengths,
)

# ---------------------------------------------------------------------------
# independent oracles for the backward schedule inversion: the forward map is
# rational in eps and one square root, so squaring yields a quadratic whose
# physical root is selected by residual.


def invert_qudit_quadratic(target: float, d: int) -> float:
    a_coef = (d + 1.0) / target + d - 2.0
    b_coef = float(d - 1)
    poly_a = a_coef * a_coef + 4.0 * (d - 1.0)
    poly_b = 2.0 * a_coef * b_coef + 4.0 * (d - 2.0)
    poly_c = b_coef * b_coef - 4.0
    disc = math.sqrt(poly_b * poly_b - 4.0 * poly_a * poly_c)
    roots = [(poly_b + disc) / (2.0 * poly_a), (poly_b - disc) / (2.0 * poly_a)]

    def residual(e: float) -> float:
        if not 0.0 < e <= target:
            return math.inf
        return abs(e / r_of_strength(e, d) - target)

    return min(roots, key=residual)


def invert_ncopy_quadratic(target: float, n: int) -> float:
    c_coef = (n + 1.0) * (n + 2.0) / target + 2.0 * (n - 1.0)
    d_coef = n * n + 3.0 * n - 2.0
    poly_a = c_coef * c_coef + 16.0 * n
    poly_b = 2.0 * c_coef * d_coef + 16.0 * (n - 1.0)
    poly_c = d_coef * d_coef - 16.0
    disc = math.sqrt(poly_b * poly_b - 4.0 * poly_a * poly_c)
    roots = [(poly_b + disc) / (2.0 * poly_a), (poly_b - disc) / (2.0 * poly_a)]

    def residual(e: float) -> float:
        if not 0.0 < e <= target:
            return math.inf
        return abs(e / jz_factor(n / 2.0, e) - target)

    return min(roots, key=residual)


# ---------------------------------------------------------------------------
# greedy closed forms


def test_single_observation_qubit_fidelity_is_two_thirds():
    params = ProblemParams(d=2, n_copies=1, observers=1, encoding=Encoding.SYMMETRIC_COPIES)
    assert greedy_fidelity(params, 1) == 2.0 / 3.0


def test_greedy_fidelity_decays_to_random_guessing():
    params = ProblemParams(d=3, n_copies=5, observers=10**6)
    assert abs(greedy_fidelity(params, 10**6) - 1.0 / 3.0) < 1e-12


def test_optimal_qubit_first_fidelity_two_copies():
    params = ProblemParams(d=2, n_copies=2, observers=1, encoding=Encoding.OPTIMAL_QUBIT)
    assert abs(greedy_fidelity(params, 1) - 0.5 * (1.0 + 1.0 / math.sqrt(3.0))) < 1e-14


def test_copies_then_optimal_first_step():
    params = ProblemParams(d=2, n_copies=4, observers=3, encoding=Encoding.COPIES_THEN_OPTIMAL)
    assert abs(greedy_fidelity(params, 1) - 0.5 * (1.0 + 4.0 / 6.0)) < 1e-14
    x = legendre_largest_zero(3)
    assert abs(greedy_fidelity(params, 2) - 0.5 * (1.0 + (4.0 / 6.0) * x)) < 1e-12


def test_unsupported_encodings_rejected():
    with pytest.raises(UnsupportedEncodingError):
        ProblemParams(d=2, n_copies=3, observers=1, encoding=Encoding.OPTIMAL_QUBIT)
    with pytest.raises(UnsupportedEncodingError):
        ProblemParams(d=3, n_copies=2, observers=1, encoding=Encoding.OPTIMAL_QUBIT)


def test_observer_index_validated():
    params = ProblemParams(d=2, n_copies=1, observers=2)
    with pytest.raises(DomainError):
        greedy_fidelity(params, 3)


# ---------------------------------------------------------------------------
# egalitarian schedules


def test_qudit_schedule_single_observer_reduces_to_greedy():
    for d in (2, 3, 5):
        schedule = egalitarian_schedule_qudit(d, 1)
        assert schedule.strengths.tolist() == [1.0]
        assert abs(schedule.per_observer_fidelity[0] - 2.0 / (d + 1.0)) < 1e-14


def test_qudit_schedule_two_observers_analytic():
    schedule = egalitarian_schedule_qudit(2, 2)
    eps1 = (3.0 + 4.0 * math.sqrt(3.0)) / 13.0
    assert abs(schedule.strengths[0] - eps1) < 1e-12
    assert schedule.strengths[1] == 1.0
    assert abs(schedule.per_observer_fidelity[0] - (0.5 + eps1 / 6.0)) < 1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_qudit_schedule_matches_quadratic_inversion_oracle(d):
    schedule = egalitarian_schedule_qudit(d, 30)
    eps = schedule.strengths
    for k in range(len(eps) - 2, len(eps) - 32, -1):
        if k < 0:
            break
        assert abs(eps[k] - invert_qudit_quadratic(eps[k + 1], d)) < 1e-12


def test_ncopy_schedule_matches_quadratic_inversion_oracle():
    for n in (1, 4, 100):
        schedule = egalitarian_schedule_ncopy(n, 20)
        eps = schedule.strengths
        for k in range(len(eps) - 2, -1, -1):
            assert abs(eps[k] - invert_ncopy_quadratic(eps[k + 1], n)) < 1e-12


def test_schedules_monotone_increasing_to_one():
    for make in (lambda: egalitarian_schedule_qudit(2, 10_000),
                  lambda: egalitarian_schedule_ncopy(50, 10_000)):
        eps = make().strengths
        assert eps[-1] == 1.0
        assert np.all(np.diff(eps) > 0.0)


def test_equal_fidelity_across_observers():
    for schedule in (
        egalitarian_schedule_qudit(2, 100),
        egalitarian_schedule_qudit(5, 37),
        egalitarian_schedule_ncopy(10, 64),
    ):
        fid = schedule.per_observer_fidelity
        assert np.max(np.abs(fid - fid[0])) <= 1e-10


def test_forward_recompute_agrees_with_schedule():
    schedule = egalitarian_schedule_qudit(3, 40)
    again = chain_fidelities_qudit(3, schedule.strengths)
    assert np.max(np.abs(again - schedule.per_observer_fidelity)) < 1e-14
    schedule = egalitarian_schedule_ncopy(6, 25)
    again = chain_fidelities_ncopy(6, schedule.strengths)
    assert np.max(np.abs(again - schedule.per_observer_fidelity)) < 1e-14


@pytest.mark.parametrize("observers", [2, 10, 100])
def test_single_copy_schedule_equals_qubit_schedule(observers):
    ncopy = egalitarian_schedule_ncopy(1, observers)
    qudit = egalitarian_schedule_qudit(2, observers)
    assert np.max(np.abs(ncopy.strengths - qudit.strengths)) <= 1e-10
    assert np.max(np.abs(ncopy.per_observer_fidelity - qudit.per_observer_fidelity)) <= 1e-10


def test_ncopy_single_observer_shrink():
    for n in (1, 4, 1000):
        schedule = egalitarian_schedule_ncopy(n, 1)
        delta = schedule.strengths[0] * n / (n + 2.0)
        assert abs(delta - n / (n + 2.0)) < 1e-14


def test_exact_delta_above_stochastic_baseline_moderate_grid():
    n = 1000
    ks = sorted({int(round(10**e)) for e in np.linspace(0.31, 4, 13)})
    rows = figure1_sweep(n, ks)
    for row in rows:
        if row["K"] >= 2:
            assert row["delta_exact"] >= row["delta_stochastic"]


# ---------------------------------------------------------------------------
# asymptotics and baseline


def test_asymptotics_values():
    assert abs(egalitarian_asymptotics(1, n_copies=8, regime="large-n") - 0.8) < 1e-14
    assert abs(
        egalitarian_asymptotics(10, n_copies=1000, regime="large-n") - (1.0 - 20.0 / 1002.0)
    ) < 1e-14
    assert abs(
        egalitarian_asymptotics(100, d=2, regime="large-k") - 0.5 * math.sqrt(2.0 / 300.0)
    ) < 1e-14
    kk = 10**6
    assert abs(
        egalitarian_asymptotics(kk, n_copies=4, regime="large-k")
        - 4.0 / math.sqrt(5.0 * 6.0 * kk)
    ) < 1e-14


def test_asymptotics_argument_validation():
    with pytest.raises(DomainError):
        egalitarian_asymptotics(10, regime="large-k")
    with pytest.raises(DomainError):
        egalitarian_asymptotics(10, d=2, n_copies=3, regime="large-k")
    with pytest.raises(DomainError):
        egalitarian_asymptotics(10, d=2, regime="large-n")


def test_stochastic_baseline_values():
    assert abs(stochastic_baseline(7, 1) - 7.0 / 9.0) < 1e-15
    assert stochastic_baseline(1000, 500) == 0.5
    # matches the greedy shrink on an N/K share of the copies
    n, k = 120, 8
    share = n / k
    assert abs(stochastic_baseline(n, k) - share / (share + 2.0)) < 1e-12


def test_egalitarian_report_bundles_consistent_values():
    from obschain.strategies import egalitarian_report

    report = egalitarian_report(8, 4)
    schedule = egalitarian_schedule_ncopy(8, 4)
    assert report.exact["fidelity"] == pytest.approx(schedule.per_observer_fidelity[0], abs=1e-12)
    assert report.baseline["delta_stochastic"] == stochastic_baseline(8, 4)
    assert report.asymptotic["delta_large_n"] == pytest.approx(1.0 - 8.0 / 10.0, abs=1e-14)
    assert 0.5 <= report.exact["fidelity"] <= 1.0


def test_stochastic_strengths_equalize_the_realization():
    n, k_obs = 4, 2
    eps = stochastic_strengths(n, k_obs)
    assert np.max(np.abs(eps - np.array([0.75, 1.0]))) < 1e-14
    fid = chain_fidelities_ncopy(n, eps, stochastic=True)
    assert np.max(np.abs(fid - fid[0])) < 1e-12
    delta = 2.0 * fid[0] - 1.0
    assert abs(delta - stochastic_baseline(n, k_obs)) < 1e-12


# ---------------------------------------------------------------------------
# privileged observer


def test_privileged_single_observer():
    params = ProblemParams(d=2, n_copies=1, observers=1, encoding=Encoding.SINGLE_COPY)
    assert abs(privileged_delta(params, 1.0) - 1.0 / 3.0) < 1e-15
    eps, delta = privileged_optimize(params)
    assert eps == 1.0
    assert abs(delta - 1.0 / 3.0) < 1e-15


def test_privileged_full_strength_matches_greedy_decay():
    for n in (2, 10):
        for k_obs in (1, 5, 20):
            params = ProblemParams(d=2, n_copies=n, observers=k_obs)
            delta = privileged_delta(params, 1.0)
            assert abs(delta - (n / (n + 2.0)) ** k_obs) <= 1e-12


def test_privileged_delta_direct_formula():
    d, k_obs, eps = 2, 100, 0.0866
    params = ProblemParams(d=d, n_copies=1, observers=k_obs, encoding=Encoding.SINGLE_COPY)
    expected = eps / (d + 1.0) * r_of_strength(eps, d) ** (k_obs - 1)
    assert abs(privileged_delta(params, eps) - expected) <= 1e-12


def test_privileged_optimum_beats_neighbors():
    params = ProblemParams(d=3, n_copies=1, observers=50, encoding=Encoding.SINGLE_COPY)
    eps_star, delta_max = privileged_optimize(params)
    for probe in np.linspace(0.01, 1.0, 97):
        assert privileged_delta(params, float(probe)) <= delta_max + 1e-12
    assert privileged_delta(params, eps_star) == delta_max


def test_privileged_rejects_bad_strength_and_encoding():
    params = ProblemParams(d=2, n_copies=1, observers=2, encoding=Encoding.SINGLE_COPY)
    with pytest.raises(DomainError):
        privileged_delta(params, 0.0)
    bad = ProblemParams(d=2, n_copies=2, observers=2, encoding=Encoding.OPTIMAL_QUBIT)
    with pytest.raises(UnsupportedEncodingError):
        privileged_delta(bad, 0.5)


# ---------------------------------------------------------------------------
# scenario-reduction lattice: all strategies coincide for a single observer


@pytest.mark.parametrize("d", [2, 3, 4])
def test_single_observer_strategies_coincide_qudit(d):
    greedy = greedy_fidelity(ProblemParams(d=d, n_copies=1, observers=1), 1)
    egal = egalitarian_schedule_qudit(d, 1).per_observer_fidelity[0]
    params = ProblemParams(d=d, n_copies=1, observers=1, encoding=Encoding.SINGLE_COPY)
    _, priv_delta = privileged_optimize(params)
    priv = fidelity_from_delta(priv_delta, d)
    assert abs(greedy - egal) <= 1e-12
    assert abs(greedy - priv) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 6])
def test_single_observer_strategies_coincide_ncopy(n):
    greedy = greedy_fidelity(ProblemParams(d=2, n_copies=n, observers=1), 1)
    egal = egalitarian_schedule_ncopy(n, 1).per_observer_fidelity[0]
    params = ProblemParams(d=2, n_copies=n, observers=1)
    _, priv_delta = privileged_optimize(params)
    priv = fidelity_from_delta(priv_delta, 2)
    assert abs(greedy - egal) <= 1e-12
    assert abs(greedy - priv) <= 1e-12


# ---------------------------------------------------------------------------
# quadrature route


def test_quadrature_matches_eigenvalue_route_small():
    assert abs(optimal_first_fidelity_quadrature(2) - 0.5 * (1.0 + 1.0 / math.sqrt(3.0))) <= 1e-8


@pytest.mark.parametrize("n", [4, 10])
def test_quadrature_matches_eigenvalue_route(n):
    expected = 0.5 * (1.0 + legendre_largest_zero(n // 2 + 1))
    assert abs(optimal_first_fidelity_quadrature(n) - expected) <= 1e-8


def test_outcome_density_is_normalized_and_nonnegative():
    from numpy.polynomial.legendre import leggauss

    enc = optimal_encoding(10)
    t, w = leggauss(32)
    b_vals = np.zeros_like(t)
    for j, coeff in enumerate(np.sqrt(2.0 * np.arange(6) + 1.0) * enc.coefficients):
        b_vals += coeff * legendre_pn(j, t)
    density = b_vals**2
    assert density.min() >= 0.0
    assert abs(np.sum(w * density) / 2.0 - 1.0) <= 1e-10


# ---------------------------------------------------------------------------
# sweep rows


def test_figure1_rows_and_reference_values():
    rows = figure1_sweep(1000, [1, 10, 100])
    assert [row["K"] for row in rows] == [1, 10, 100]
    assert abs(rows[0]["delta_exact"] - 1000.0 / 1002.0) < 1e-14
    for row in rows:
        assert abs(row["delta_stochastic"] - 1000.0 / (1000.0 + 2.0 * row["K"])) < 1e-14
    deltas = [row["delta_exact"] for row in rows]
    assert all(a >= b for a, b in zip(deltas, deltas[1:]))


def test_figure1_rejects_bad_grid():
    with pytest.raises(DomainError):
        figure1_sweep(10, [])
    with pytest.raises(DomainError):
        figure1_sweep(10, [0, 5])
