import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ar1chaos.ar1 import AR1Params
from ar1chaos.montecarlo import (
    ExperimentConfig,
    default_bin_count,
    histogram,
    ks_distance,
    mix_seed,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    run_clt_experiment,
    run_table_experiment,
    w1_distance,
)
from ar1chaos.noise import NoiseSpec, make_preset

CHI2 = make_preset("chi2", 1.0)


def config(**kw):
    base = dict(
        params=AR1Params(0.0, 0.5, 0.0), spec=CHI2, n=200, replications=50,
        sigma=1.0, master_seed=0,
    )
    base.update(kw)
    return ExperimentConfig(**base)


# ------------------------------------------------------------------ seeding

def test_mix_seed_reference_stream():
    # first outputs of the SplitMix64 stream seeded with 0, per the
    # published test vectors
    assert mix_seed(0, 0) == 0xE220A8397B1DCDAF
    assert mix_seed(0, 1) == 0x6E789E6AA1B965F4
    assert mix_seed(0, 2) == 0x06C45D188009454F
    assert mix_seed(0, 3) == 0xF88BB8A8724C81EC


def test_mix_seed_distinct_and_bounded():
    seeds = [mix_seed(42, k) for k in range(10_000)]
    assert len(set(seeds)) == len(seeds)
    assert all(0 <= s < 2**64 for s in seeds)


def test_mix_seed_accepts_numpy_ints():
    assert mix_seed(np.int64(7), np.int64(3)) == mix_seed(7, 3)


# ---------------------------------------------------------- normal helpers

def test_normal_cdf_tabulated():
    assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-16)
    assert normal_cdf(1.0) == pytest.approx(0.841344746068543, abs=1e-12)
    assert normal_cdf(2.0) == pytest.approx(0.977249868051821, abs=1e-12)
    assert normal_cdf(-1.0) == pytest.approx(1.0 - normal_cdf(1.0), abs=1e-15)
    arr = normal_cdf(np.array([-8.0, 8.0]))
    assert arr[0] == pytest.approx(6.22096057427178e-16, rel=1e-6)
    assert arr[1] == pytest.approx(1.0, abs=1e-15)


def test_normal_quantile_round_trip():
    for p in (0.001, 0.25, 0.5, 0.9, 0.999):
        assert normal_cdf(normal_quantile(p)) == pytest.approx(p, rel=1e-12)


def test_normal_pdf():
    assert normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-15)
    assert normal_pdf(1.0) == pytest.approx(math.exp(-0.5) / math.sqrt(2.0 * math.pi), rel=1e-15)


# -------------------------------------------------------------------- ks/w1

def test_ks_quantile_sample():
    # at the (i-0.5)/m quantiles every step contributes exactly 1/(2m)
    m = 10
    sample = normal_quantile((np.arange(1, m + 1) - 0.5) / m)
    assert ks_distance(sample) == pytest.approx(0.05, abs=1e-14)


def test_ks_point_mass():
    assert ks_distance([0.0]) == pytest.approx(0.5, abs=1e-15)


def test_ks_two_extreme_points():
    assert ks_distance([-1e3, 1e3]) == pytest.approx(0.5, abs=1e-12)


def test_ks_bounds():
    rng = np.random.default_rng(5)
    sample = rng.standard_normal(400)
    d = ks_distance(sample)
    assert 0.0 <= d <= 1.0
    assert d < 0.1


def test_w1_point_mass():
    # W1 between a point mass at 0 and the standard normal is E|Z|
    assert w1_distance([0.0]) == pytest.approx(math.sqrt(2.0 / math.pi), abs=1e-12)


def test_w1_large_quantile_sample():
    m = 100_000
    sample = normal_quantile((np.arange(1, m + 1) - 0.5) / m)
    assert w1_distance(sample) <= 1e-3


def test_w1_shifted_point_mass():
    # point mass at t: W1 = E|Z - t| = 2*pdf(t) + t*(2*Phi(t) - 1)
    for t in (0.5, -1.5, 3.0):
        expected = 2.0 * normal_pdf(t) + t * (2.0 * normal_cdf(t) - 1.0)
        assert w1_distance([t]) == pytest.approx(expected, rel=1e-12)


def test_distances_permutation_invariant():
    rng = np.random.default_rng(11)
    sample = rng.standard_normal(101)
    shuffled = rng.permutation(sample)
    assert ks_distance(shuffled) == ks_distance(np.sort(sample))
    assert w1_distance(shuffled) == w1_distance(np.sort(sample))


def test_empty_sample_rejected():
    with pytest.raises(ValueError):
        ks_distance([])
    with pytest.raises(ValueError):
        w1_distance([])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-30.0, 30.0), min_size=1, max_size=60))
def test_kolmogorov_wasserstein_inequality(sample):
    # d_Kol <= 2 sqrt(d_W) for any empirical law vs the standard normal
    assert ks_distance(sample) <= 2.0 * math.sqrt(w1_distance(sample)) + 1e-12


# ---------------------------------------------------------------- histogram

def test_histogram_examples():
    assert histogram([0.0, 0.0, 0.0], 1) == [(-0.5, 0.5, 3)]
    rows = histogram([0.0, 1.0, 2.0, 3.0], 2)
    assert [r[2] for r in rows] == [2, 2]
    assert rows[0][0] == 0.0 and rows[-1][1] == 3.0


def test_histogram_counts_sum():
    rng = np.random.default_rng(3)
    sample = rng.standard_normal(997)
    rows = histogram(sample, 32)
    assert sum(r[2] for r in rows) == 997
    widths = {round(r[1] - r[0], 12) for r in rows}
    assert len(widths) == 1


def test_histogram_validation():
    with pytest.raises(ValueError):
        histogram([], 4)
    with pytest.raises(ValueError):
        histogram([1.0], 0)


def test_default_bin_count():
    assert default_bin_count(3000) == 55
    assert default_bin_count(500) == 23
    assert default_bin_count(4) == 2


# -------------------------------------------------------------- experiments

def test_config_validation():
    with pytest.raises(ValueError):
        config(replications=1)
    with pytest.raises(ValueError):
        config(workers=0)
    with pytest.raises(ValueError):
        config(sigma=0.0)
    with pytest.raises(ValueError):
        config(n=0)


def test_table_experiment_basic():
    summary = run_table_experiment(config(n=2000, replications=60))
    assert summary.domain_failures == 0
    assert len(summary.per_replication) == 60
    assert summary.mean_ahat == pytest.approx(0.5, abs=0.05)
    assert summary.mean_phi is None
    rows = summary.per_replication
    assert [r[0] for r in rows] == list(range(60))
    assert all(r[4] == "ok" and r[3] is None for r in rows)


def test_worker_count_does_not_change_results():
    a = run_clt_experiment(config(replications=40, workers=1))
    b = run_clt_experiment(config(replications=40, workers=5))
    assert a.per_replication == b.per_replication
    assert a.mean_phi == b.mean_phi
    assert a.ks == b.ks and a.w1 == b.w1


def test_replication_seed_layout():
    cfg = config()
    assert cfg.replication_seed(0) == mix_seed(0, 0)
    assert cfg.replication_seed(7) == mix_seed(0, 7)


def test_domain_failures_excluded():
    # n = 1 with sigma far above the noise scale: most replications fall
    # below the 2*sigma^2 threshold but the survivors still aggregate
    summary = run_table_experiment(config(n=1, replications=400, sigma=0.9))
    assert summary.domain_failures > 0
    failed = [r for r in summary.per_replication if r[4] == "domain_error"]
    assert len(failed) == summary.domain_failures
    assert all(r[2] is None for r in failed)
    assert math.isfinite(summary.mean_ahat)


def test_zero_noise_spectrum_all_failures():
    # a zero-weight spectrum gives Q_n = 0 <= 2 sigma^2: every replication
    # fails the domain guard and aggregation refuses to produce numbers
    cfg = config(spec=NoiseSpec((0.0,)), replications=10)
    with pytest.raises(ValueError, match="domain"):
        run_table_experiment(cfg)


def test_clt_requires_nonzero_a1():
    with pytest.raises(ValueError):
        run_clt_experiment(config(params=AR1Params(0.0, 0.0, 0.0)))


def test_clt_summary_fields():
    summary = run_clt_experiment(config(n=500, replications=80, master_seed=9))
    assert summary.std_phi is not None and summary.std_phi > 0
    assert 0.0 <= summary.ks <= 1.0
    assert summary.w1 >= 0.0
    assert summary.median_phi == pytest.approx(
        float(np.median([r[3] for r in summary.per_replication if r[4] == "ok"])))
    pairs = dict(summary.summary_pairs())
    assert pairs["ks_distance"] == summary.ks
    assert pairs["dkol_le_2sqrt_dw"] == (summary.ks <= 2.0 * math.sqrt(summary.w1))


def test_normalization_variants_scale_phi():
    pub = run_clt_experiment(config(n=500, replications=60, normalization="published"))
    cor = run_clt_experiment(config(n=500, replications=60, normalization="corrected"))
    ratio = math.sqrt(6.0 / 8.625)  # sqrt(est_var_pub / est_var_corr) at a1 = 0.5
    assert cor.std_phi == pytest.approx(ratio * pub.std_phi, rel=1e-10)


def test_std_uses_unbiased_divisor():
    summary = run_table_experiment(config(replications=12, n=300))
    vals = [r[2] for r in summary.per_replication if r[4] == "ok"]
    assert len(vals) == 12 - summary.domain_failures
    assert summary.std_ahat == pytest.approx(float(np.std(vals, ddof=1)), rel=1e-12)
