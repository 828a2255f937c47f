import math

import numpy as np
import pytest

from edweibull.channel import WeibullChannel
from edweibull.detector import DetectorConfig, avg_pd, prob_detection_awgn, threshold_for_pf
from edweibull.errors import DomainError
from edweibull.montecarlo import (
    CHUNK_TRIALS,
    THREADS_ENV,
    SimSpec,
    chunk_generator,
    estimate_detection,
    sample_test_statistic,
)
from edweibull.specfun import reg_upper_gamma


def _mean_within(draws, mean, var, k=4.0):
    return abs(draws.mean() - mean) <= k * math.sqrt(var / draws.size)


# --- the test statistic -------------------------------------------------------------

@pytest.mark.slow
def test_central_statistic_mean():
    y = sample_test_statistic(1, 0.0, np.random.default_rng(1), 10_000_000)
    assert _mean_within(y, 2.0, 4.0)


@pytest.mark.slow
def test_noncentral_statistic_mean():
    # noncentral chi-square: mean k + nc, variance 2(k + 2 nc)
    y = sample_test_statistic(1, 5.0, np.random.default_rng(2), 10_000_000)
    assert _mean_within(y, 12.0, 2.0 * (2.0 + 20.0))


def test_central_statistic_tail_matches_incomplete_gamma():
    u, n = 5, 2_000_000
    lam = threshold_for_pf(u, 0.05)
    y = sample_test_statistic(u, 0.0, np.random.default_rng(3), n)
    p = reg_upper_gamma(u, lam / 2)
    assert abs(np.count_nonzero(y > lam) / n - p) <= 3.0 * math.sqrt(p * (1 - p) / n)


def test_statistic_accepts_per_trial_snr():
    rng = np.random.default_rng(4)
    gamma = np.array([0.0, 1.0, 100.0])
    y = sample_test_statistic(3, gamma, rng)
    assert y.shape == (3,)
    assert isinstance(sample_test_statistic(3, 1.0, rng), float)


@pytest.mark.parametrize("u,gamma", [(0, 1.0), (1.5, 1.0), (2, -1.0), (2, math.nan)])
def test_statistic_domain(u, gamma):
    with pytest.raises(DomainError):
        sample_test_statistic(u, gamma, np.random.default_rng(0))


# --- specs -------------------------------------------------------------------------

def test_sim_spec_validation():
    cfg = DetectorConfig(5, 10.0)
    with pytest.raises(DomainError):
        SimSpec(cfg, 0, 1, "H0")
    with pytest.raises(DomainError):
        SimSpec(cfg, 10, -1, "H0")
    with pytest.raises(DomainError):
        SimSpec(cfg, 10, 2**64, "H0")
    with pytest.raises(DomainError):
        SimSpec(cfg, 10, 1, "H2")
    with pytest.raises(DomainError):
        SimSpec(cfg, 10, 1, "H1")
    with pytest.raises(DomainError):
        SimSpec(cfg, 10, 1, "H1", snr=-1.0)


def test_chunk_streams_are_distinct():
    a = chunk_generator(7, 0).random(4)
    b = chunk_generator(7, 1).random(4)
    c = chunk_generator(8, 0).random(4)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.array_equal(a, chunk_generator(7, 0).random(4))


# --- estimates -----------------------------------------------------------------------

def test_false_alarm_estimate():
    cfg = DetectorConfig.from_pf(5, 0.1)
    rep = estimate_detection(SimSpec(cfg, 1_000_000, 1, "H0"))
    assert rep.hypothesis == "H0" and rep.trials == 1_000_000 and rep.seed == 1
    assert abs(rep.estimate - 0.1) <= rep.half_width_95


def test_report_half_width():
    rep = estimate_detection(SimSpec(DetectorConfig.from_pf(2, 0.3), 5000, 3, "H0"))
    p = rep.estimate
    assert rep.half_width_95 == 1.96 * math.sqrt(p * (1 - p) / rep.trials)
    assert rep.detections == round(p * rep.trials)


def test_high_snr_missed_detection():
    cfg = DetectorConfig.from_pf(5, 0.2)
    ch = WeibullChannel.from_db(1.0, 25.0)
    rep = estimate_detection(SimSpec(cfg, 1_000_000, 5, "H1", ch))
    assert abs((1.0 - rep.estimate) - 0.1) <= max(rep.half_width_95, 0.02)


@pytest.mark.parametrize("u,pf,db", [(1, 0.01, 0.0), (5, 0.1, 5.0), (5, 0.1, 15.0), (10, 0.2, 10.0)])
def test_rayleigh_estimate_matches_analytic(u, pf, db):
    n = 400_000
    cfg = DetectorConfig.from_pf(u, pf)
    ch = WeibullChannel.from_db(2.0, db)
    p = avg_pd(cfg, ch).value
    rep = estimate_detection(SimSpec(cfg, n, 11, "H1", ch))
    assert abs(rep.estimate - p) <= 3.0 * math.sqrt(p * (1 - p) / n)


def test_fixed_snr_estimate_matches_marcum():
    n = 400_000
    cfg = DetectorConfig.from_pf(3, 0.05)
    p = prob_detection_awgn(cfg, 4.0)
    rep = estimate_detection(SimSpec(cfg, n, 12, "H1", snr=4.0))
    assert abs(rep.estimate - p) <= 3.0 * math.sqrt(p * (1 - p) / n)


def test_reproducible():
    spec = SimSpec(DetectorConfig.from_pf(5, 0.1), 150_000, 2024, "H1", WeibullChannel.from_db(1.5, 5.0))
    assert estimate_detection(spec) == estimate_detection(spec)


def test_thread_count_does_not_change_results():
    spec = SimSpec(
        DetectorConfig.from_pf(5, 0.1), 3 * CHUNK_TRIALS + 17, 77, "H1", WeibullChannel.from_db(0.75, 3.0)
    )
    serial = estimate_detection(spec, threads=1)
    for threads in (2, 3, 8):
        assert estimate_detection(spec, threads=threads) == serial


def test_thread_count_from_environment(monkeypatch):
    spec = SimSpec(DetectorConfig.from_pf(5, 0.1), 2 * CHUNK_TRIALS, 5, "H0")
    serial = estimate_detection(spec, threads=1)
    monkeypatch.setenv(THREADS_ENV, "4")
    assert estimate_detection(spec) == serial
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(DomainError):
        estimate_detection(spec)
    monkeypatch.setenv(THREADS_ENV, "0")
    with pytest.raises(DomainError):
        estimate_detection(spec)


def test_noise_only_ignores_channel():
    cfg = DetectorConfig.from_pf(5, 0.1)
    plain = estimate_detection(SimSpec(cfg, 100_000, 9, "H0"))
    for ch in (WeibullChannel(0.5, 1e3), WeibullChannel(5.0, 1e-3)):
        assert estimate_detection(SimSpec(cfg, 100_000, 9, "H0", ch)) == plain
    assert estimate_detection(SimSpec(cfg, 100_000, 9, "H0", snr=50.0)) == plain


def test_interval_coverage_over_seeds():
    n = 20_000
    cfg = DetectorConfig.from_pf(5, 0.1)
    ch = WeibullChannel.from_db(1.0, 10.0)
    p = avg_pd(cfg, ch).value
    covered = 0
    for seed in range(100):
        rep = estimate_detection(SimSpec(cfg, n, seed, "H1", ch))
        covered += abs(rep.estimate - p) <= rep.half_width_95
    assert covered >= 90
