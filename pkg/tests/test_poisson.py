import math

import numpy as np
import pytest
from scipy import stats

from hardcoregas.geometry import Configuration, Point
from hardcoregas.poisson import (
    AttemptsExhausted,
    ModelParams,
    Window,
    is_hardcore,
    rejection_sample_with_attempts,
    sample_hardcore_rejection,
    sample_poisson_count,
    sample_ppp,
)
from hardcoregas.rng import generator

from helpers import poisson_fit_pvalue


def test_window_validation():
    with pytest.raises(ValueError):
        Window(1, 1, 0, 1)
    with pytest.raises(ValueError):
        Window(0, 1, 2, 1)
    with pytest.raises(ValueError):
        Window(0, math.inf, 0, 1)
    assert Window(0, 2, 0, 3).area == 6.0


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(-0.1, 1.0)
    with pytest.raises(ValueError):
        ModelParams(0.1, 0.0)
    with pytest.raises(ValueError):
        ModelParams(math.nan, 1.0)


def test_poisson_count_zero_mean():
    rng = generator(1)
    assert all(sample_poisson_count(0.0, rng) == 0 for _ in range(100))


def test_poisson_count_negative_mean_raises():
    with pytest.raises(ValueError):
        sample_poisson_count(-1.0, generator(1))


def test_poisson_count_mean():
    rng = generator(2)
    n = 100_000
    draws = np.array([sample_poisson_count(4.0, rng) for _ in range(n)])
    # Poisson: variance equals the mean, so sd of the sample mean is 2/sqrt(n)
    assert abs(draws.mean() - 4.0) <= 3.0 * 2.0 / math.sqrt(n)


def test_poisson_count_pmf():
    rng = generator(909)
    draws = np.array([sample_poisson_count(4.0, rng) for _ in range(100_000)])
    assert poisson_fit_pvalue(draws, 4.0, kmax=15) > 0.001


def test_ppp_zero_intensity_empty():
    config = sample_ppp(Window(0, 10, 0, 10), 0.0, generator(3))
    assert len(config) == 0


def test_ppp_mean_count():
    window = Window(0, 10, 0, 10)
    rng = generator(4)
    n = 10_000
    counts = np.array([len(sample_ppp(window, 0.1, rng)) for _ in range(n)])
    se = math.sqrt(10.0 / n)
    assert abs(counts.mean() - 10.0) <= 3.0 * se


def test_ppp_x_marginal_uniform():
    window = Window(0, 10, 0, 10)
    rng = generator(910)
    xs = []
    for _ in range(2000):
        xs.extend(pt.x for _, pt in sample_ppp(window, 0.1, rng))
    p = stats.kstest(np.array(xs), "uniform", args=(0, 10)).pvalue
    assert p > 0.001


def test_is_hardcore_examples():
    assert is_hardcore(Configuration(), 1.0)
    assert is_hardcore(Configuration([Point(0, 0)]), 1.0)
    assert not is_hardcore(Configuration([Point(0, 0), Point(0.5, 0)]), 1.0)
    # pairs at exactly the hard-core distance are legal
    assert is_hardcore(Configuration([Point(0, 0), Point(1, 0)]), 1.0)


def test_rejection_zero_intensity():
    window = Window(0, 1, 0, 1)
    config, attempts = rejection_sample_with_attempts(
        window, ModelParams(0.0, 1.0), generator(5))
    assert len(config) == 0
    assert attempts == 1


def test_rejection_output_always_hardcore():
    window = Window(0, 3, 0, 3)
    params = ModelParams(0.3, 1.0)
    for i in range(200):
        config = sample_hardcore_rejection(window, params, generator(6, i))
        assert is_hardcore(config, params.radius)


def test_rejection_tiny_window_empty_probability():
    # window of diameter < R: at most one point fits, so the accepted
    # count is Poisson(mu) conditioned on {0, 1} and P(empty) = 1/(1+mu)
    window = Window(0, 0.5, 0, 0.5)
    params = ModelParams(4.0, 1.0)  # mu = lambda * area = 1
    rng = generator(7)
    n = 10_000
    empties = sum(
        len(sample_hardcore_rejection(window, params, rng)) == 0 for _ in range(n))
    se = math.sqrt(0.5 * 0.5 / n)
    assert abs(empties / n - 0.5) <= 3.0 * se
    assert all(len(sample_hardcore_rejection(window, params, rng)) <= 1
               for _ in range(200))


def test_rejection_count_dominated_by_poisson():
    # conditioning on the hard-core event only thins the configuration
    window = Window(0, 3, 0, 3)
    params = ModelParams(0.3, 1.0)
    rng = generator(8)
    n = 3000
    counts = np.array([len(sample_hardcore_rejection(window, params, rng))
                       for _ in range(n)])
    mean_free = 0.3 * 9.0
    se = counts.std(ddof=1) / math.sqrt(n)
    assert counts.mean() <= mean_free + 3.0 * se


def test_rejection_determinism():
    window = Window(0, 3, 0, 3)
    params = ModelParams(0.3, 1.0)
    a = sample_hardcore_rejection(window, params, generator(9))
    b = sample_hardcore_rejection(window, params, generator(9))
    assert a == b


def test_attempts_exhausted():
    # a dense regime where a Poisson draw is essentially never hard-core
    window = Window(0, 1, 0, 1)
    params = ModelParams(50.0, 1.0)
    with pytest.raises(AttemptsExhausted):
        sample_hardcore_rejection(window, params, generator(10), max_attempts=5)


def test_max_attempts_validation():
    with pytest.raises(ValueError):
        sample_hardcore_rejection(
            Window(0, 1, 0, 1), ModelParams(0.1, 1.0), generator(1), max_attempts=0)
