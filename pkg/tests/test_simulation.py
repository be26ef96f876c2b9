import math
import warnings

import numpy as np
import pytest

from realzeros.covariance import CovarianceModel, gamma_array
from realzeros.errors import BudgetExceeded
from realzeros.kac_rice import expected_zeros_total
from realzeros.simulation import (
    CounterOptions,
    count_real_zeros,
    count_real_zeros_status,
    sample_coefficients,
    sample_matrix,
    simulate,
    trial_seed,
    trial_seeds,
)
from realzeros.sturm import sturm_count

from conftest import catalog

N_SAMPLES = 100_000


def draws(model, n, seed=1):
    return sample_matrix(model, n, N_SAMPLES, np.random.default_rng(seed))


def lag_check(x, j, k, target, sigmas=3.0):
    prod = x[:, j] * x[:, k]
    se = prod.std(ddof=1) / math.sqrt(len(prod))
    return abs(prod.mean() - target) <= sigmas * se


def test_sample_examples():
    assert lag_check(draws(CovarianceModel.independent(), 4), 0, 1, 0.0)
    assert lag_check(draws(CovarianceModel.exponential(0.5), 4), 1, 3, 0.25)
    x = draws(CovarianceModel.constant(0.5), 25)
    for k in (1, 5, 20):
        assert lag_check(x, 0, k, 0.5), k


def test_coefficient_sample_shape_and_seed():
    s = sample_coefficients(CovarianceModel.exponential(0.3), 10, 42)
    assert s.values.shape == (11,) and np.all(np.isfinite(s.values))
    assert s.seed == 42 and s.model_id == "exponential(rho=0.3)"
    assert np.array_equal(s.values, sample_coefficients(CovarianceModel.exponential(0.3), 10, 42).values)


@pytest.mark.parametrize("model", catalog(), ids=lambda m: m.label)
def test_law_matrix(model):
    n = 32
    x = draws(model, n, seed=7)
    gam = gamma_array(model, n)
    emp = x.T @ x / len(x)
    k = np.arange(n + 1)
    target = gam[np.abs(k[:, None] - k[None, :])]
    # Var(X_j X_k) = 1 + Gamma(j - k)^2 for unit-variance Gaussians
    se = np.sqrt((1 + target ** 2) / len(x))
    assert np.all(np.abs(emp - target) <= 4 * se)


def test_cholesky_fallback():
    # Gamma = (1, 0.5, 0.5, ..., 0.5) embeds badly but is PSD
    model = CovarianceModel.tabulated([1.0] + [0.5] * 40 + [0.0])
    x = sample_matrix(model, 20, 20000, np.random.default_rng(3))
    assert x.shape == (20000, 21)
    assert lag_check(x, 0, 7, 0.5, sigmas=4)


def test_counter_examples():
    assert count_real_zeros([-1, 0, 1]) == 2
    assert count_real_zeros([0, 0, 1]) == 1  # x^2: one distinct root
    assert count_real_zeros([0, -1, 0, 1]) == 3
    assert count_real_zeros([1, 0, 1]) == 0
    roots = [-3.0, -0.5, 0.2, 0.9, 1.7, 40.0]
    assert count_real_zeros(np.polynomial.polynomial.polyfromroots(roots)) == 6
    with pytest.raises(ValueError):
        count_real_zeros([3.0])


def test_counter_matches_sturm_small(rng):
    for model in catalog():
        for _ in range(15):
            n = int(rng.integers(1, 30))
            c = sample_coefficients(model, n, int(rng.integers(2 ** 63))).values
            assert count_real_zeros(c) == sturm_count(c), (model.label, n)


def test_budget_exceeded_warning():
    # a close root pair the coarsest grids straddle but cannot split
    c = np.polynomial.polynomial.polyfromroots([0.3, 0.3 + 1e-13, -0.7])
    opts = CounterOptions(max_doublings=0)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        count_real_zeros(c, opts)
    assert any(issubclass(w.category, BudgetExceeded) for w in rec)
    assert count_real_zeros_status(c, opts)[1] is False


def test_trial_seed_is_pure():
    assert trial_seed(5, 3) == trial_seed(5, 3) == int(trial_seeds(5, 10)[3])
    assert len({trial_seed(5, t) for t in range(100)}) == 100
    assert trial_seed(5, 3) != trial_seed(6, 3)


def test_degree_one_always_one():
    for model in catalog():
        s = simulate(model, 1, 500, master_seed=9)
        assert s.per_trial_counts == [1] * 500 and s.mean_zeros == 1.0 and s.std_error == 0.0


def test_summary_invariants():
    s = simulate(CovarianceModel.exponential(-0.5), 30, 300, master_seed=11)
    assert s.trials == 300 and len(s.per_trial_counts) == 300 and len(s.seeds) == 300
    assert s.mean_zeros == np.mean(s.per_trial_counts)
    assert math.isclose(s.std_error, np.std(s.per_trial_counts, ddof=1) / math.sqrt(300))
    assert all(0 <= c <= 30 for c in s.per_trial_counts)
    assert s.seeds == [trial_seed(11, t) for t in range(300)]
    d = s.to_dict()
    assert set(d) >= {"n", "trials", "mean", "std_error", "master_seed"}


@pytest.mark.parametrize("model", [CovarianceModel.exponential(0.3), catalog()[-1],
                                   CovarianceModel.spectral(expr="(1 + cos(phi)) / (2*pi)")],
                         ids=["picklable", "callable-density", "expr-density"])
def test_worker_count_invariance(model):
    a = simulate(model, 24, 60, master_seed=123, workers=1)
    b = simulate(model, 24, 60, master_seed=123, workers=3)
    assert a.per_trial_counts == b.per_trial_counts


def test_workers_env(monkeypatch):
    from realzeros.simulation import default_workers

    monkeypatch.setenv("REALZEROS_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("REALZEROS_WORKERS", "junk")
    assert default_workers() == 1


def test_independent_n50_against_kac_rice():
    s = simulate(CovarianceModel.independent(), 50, 2000, master_seed=2024)
    kr = expected_zeros_total(CovarianceModel.independent(), 50).value
    assert abs(s.mean_zeros - kr) <= 3 * s.std_error


@pytest.mark.slow
def test_constant_n512_against_kac_rice():
    model = CovarianceModel.constant(0.5)
    s = simulate(model, 512, 2000, master_seed=7)
    kr = expected_zeros_total(model, 512).value
    assert not s.failures
    assert abs(s.mean_zeros - kr) <= 3 * s.std_error


def test_trials_reproducible_from_seed():
    model = CovarianceModel.tabulated([1.0, 0.4, 0.1])
    s = simulate(model, 40, 30, master_seed=77)
    for seed, count in zip(s.seeds, s.per_trial_counts):
        assert count_real_zeros(sample_coefficients(model, 40, seed).values) == count
