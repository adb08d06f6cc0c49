"""Replicated experiments and empirical-distribution utilities.

Seeding contract: replication r uses the 64-bit seed
splitmix64(master_seed + (r+1) * 0x9E3779B97F4A7C15), the SplitMix64
finalizer, which is a bijection of the counter for any fixed master seed, so
per-replication seeds are distinct.  Each replication builds its own PCG64
generator from its seed; results are filled in by replication index, so the
per-replication output is byte-identical for any worker count.

The standard normal CDF is evaluated through the C library's
complementary-error-function rational approximation (Cephes erfc via SciPy):
Phi(x) = erfc(-x/sqrt(2))/2, absolute error below 1e-15 on [-8, 8] (the test
suite pins it against 25-digit reference values to 1e-10).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc, ndtri

from .ar1 import AR1Params, quadratic_variation_centered, simulate
from .estimator import DomainError, estimate_a1, phi_statistic
from .noise import NoiseSpec
from .oracle import exact_nvar_qn

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def mix_seed(master_seed: int, index: int) -> int:
    """SplitMix64 finalizer of master_seed + (index+1)*golden-gamma, mod 2^64."""
    # plain-int arithmetic: numpy integer inputs would overflow at 64 bits
    z = (int(master_seed) + (int(index) + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def normal_cdf(x):
    """Standard normal CDF via erfc; vectorized, returns float or ndarray."""
    arr = np.asarray(x, dtype=float)
    out = 0.5 * erfc(-arr / _SQRT2)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def normal_pdf(x):
    arr = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * arr * arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def normal_quantile(p):
    """Inverse of normal_cdf (scipy ndtri)."""
    out = ndtri(p)
    return float(out) if np.isscalar(p) else out


def ks_distance(sample) -> float:
    """sup-norm distance between the sample ECDF and the standard normal CDF.

    max over sorted x_(i) of max(|i/m - Phi(x_i)|, |(i-1)/m - Phi(x_i)|);
    permutation-invariant by construction.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    if m == 0:
        raise ValueError("sample must be nonempty")
    cdf = normal_cdf(x)
    upper = np.arange(1, m + 1) / m - cdf
    lower = cdf - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


def _antideriv(t: np.ndarray) -> np.ndarray:
    """Antiderivative of Phi: G(t) = t*Phi(t) + pdf(t), with G(-inf) = 0."""
    return t * normal_cdf(t) + normal_pdf(t)


def w1_distance(sample) -> float:
    """Wasserstein-1 distance between the sample ECDF and the standard normal.

    Exact piecewise integral of |F_m - Phi|: Gaussian tails outside the
    sample range, and on each interior segment the ECDF is a constant c, so
    the integrand splits at the quantile Phi^{-1}(c) (clipped into the
    segment) into closed-form pieces of c*x - G(x).
    """
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    if m == 0:
        raise ValueError("sample must be nonempty")
    total = float(_antideriv(x[0]))
    total += float(normal_pdf(x[-1]) - x[-1] * (1.0 - normal_cdf(x[-1])))
    if m > 1:
        c = np.arange(1, m) / m
        a, b = x[:-1], x[1:]
        t = np.clip(ndtri(c), a, b)
        ga, gt, gb = _antideriv(a), _antideriv(t), _antideriv(b)
        total += float(np.sum(c * (t - a) - (gt - ga) + (gb - gt) - c * (b - t)))
    return max(total, 0.0)


def histogram(sample, bin_count: int):
    """Equal-width bins over [min, max]; returns (bin_left, bin_right, count) rows.

    A zero-width range (all values equal) is widened by 0.5 on each side so
    the single spike still lands in a proper bin.  Counts sum to the sample
    size.
    """
    x = np.asarray(sample, dtype=float)
    if x.size == 0:
        raise ValueError("sample must be nonempty")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        lo -= 0.5
        hi += 0.5
    counts, edges = np.histogram(x, bins=bin_count, range=(lo, hi))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bin_count)]


def default_bin_count(replications: int) -> int:
    """ceil(sqrt(replications)); the documented histogram default."""
    return int(math.ceil(math.sqrt(replications)))


@dataclass(frozen=True)
class ExperimentConfig:
    params: AR1Params
    spec: NoiseSpec
    n: int
    replications: int
    sigma: float
    master_seed: int
    normalization: str = "oracle_exact"
    centering: str = "oracle"
    workers: int = 1

    def __post_init__(self):
        if self.replications < 2:
            raise ValueError("need at least 2 replications")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def replication_seed(self, index: int) -> int:
        return mix_seed(self.master_seed, index)


@dataclass(frozen=True)
class ExperimentSummary:
    """Per-replication values plus aggregates; phi fields are None for the
    table experiment.  Standard deviations use the (replications-1) divisor;
    replications that hit the estimator domain guard are counted in
    domain_failures and excluded from every aggregate."""

    config: ExperimentConfig
    per_replication: list
    domain_failures: int
    mean_ahat: float
    std_ahat: float
    mean_phi: float | None = None
    median_phi: float | None = None
    std_phi: float | None = None
    ks: float | None = None
    w1: float | None = None
    extra: dict = field(default_factory=dict)

    def summary_pairs(self):
        cfg = self.config
        pairs = [
            ("replications", cfg.replications),
            ("n", cfg.n),
            ("a1", cfg.params.a1),
            ("sigma", cfg.sigma),
            ("master_seed", cfg.master_seed),
            ("workers", cfg.workers),
            ("centering", cfg.centering),
            ("domain_failures", self.domain_failures),
            ("mean_ahat", self.mean_ahat),
            ("std_ahat", self.std_ahat),
        ]
        if self.mean_phi is not None:
            pairs += [
                ("normalization", cfg.normalization),
                ("mean_phi", self.mean_phi),
                ("median_phi", self.median_phi),
                ("std_phi", self.std_phi),
                ("ks_distance", self.ks),
                ("w1_distance", self.w1),
                ("dkol_le_2sqrt_dw", self.ks <= 2.0 * math.sqrt(self.w1)),
            ]
        pairs += list(self.extra.items())
        return pairs


def _replicate(config: ExperimentConfig, compute_phi: bool):
    """Run all replications; returns (qn, a_hat, phi, status) arrays ordered
    by replication index regardless of worker count."""
    reps = config.replications
    qn = np.empty(reps)
    a_hat = np.full(reps, np.nan)
    phi = np.full(reps, np.nan)
    status = ["ok"] * reps

    oracle_var = None
    if compute_phi and config.normalization == "oracle_exact":
        oracle_var = exact_nvar_qn(config.n, config.params.a1, config.spec, "corrected") / config.n

    def run_block(indices):
        for r in indices:
            traj = simulate(config.params, config.spec, config.n, config.replication_seed(r))
            q = quadratic_variation_centered(traj, config.centering)
            qn[r] = q
            try:
                est = estimate_a1(q, config.sigma)
            except DomainError:
                status[r] = "domain_error"
                continue
            a_hat[r] = est.a_hat
            if compute_phi:
                phi[r] = phi_statistic(
                    est.a_hat, config.params.a1, config.n, config.normalization,
                    oracle_var=oracle_var, sigma=config.sigma,
                )

    blocks = np.array_split(np.arange(reps), config.workers)
    if config.workers == 1:
        run_block(blocks[0])
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            list(pool.map(run_block, blocks))
    return qn, a_hat, phi, status


def _aggregate(config: ExperimentConfig, qn, a_hat, phi, status, compute_phi: bool) -> ExperimentSummary:
    ok = np.array([s == "ok" for s in status])
    failures = int((~ok).sum())
    if ok.sum() < 2:
        raise ValueError(
            f"{failures} of {config.replications} replications hit the estimator "
            "domain guard; nothing to aggregate"
        )
    rows = []
    for r in range(config.replications):
        if ok[r]:
            rows.append((r, float(qn[r]), float(a_hat[r]),
                         float(phi[r]) if compute_phi else None, "ok"))
        else:
            rows.append((r, float(qn[r]), None, None, "domain_error"))
    good_ahat = a_hat[ok]
    kwargs = {}
    if compute_phi:
        good_phi = phi[ok]
        kwargs = dict(
            mean_phi=float(good_phi.mean()),
            median_phi=float(np.median(good_phi)),
            std_phi=float(good_phi.std(ddof=1)),
            ks=ks_distance(good_phi),
            w1=w1_distance(good_phi),
        )
    return ExperimentSummary(
        config=config,
        per_replication=rows,
        domain_failures=failures,
        mean_ahat=float(good_ahat.mean()),
        std_ahat=float(good_ahat.std(ddof=1)),
        **kwargs,
    )


def run_table_experiment(config: ExperimentConfig) -> ExperimentSummary:
    """Replicated (Q_n, a_hat) summary: mean and standard deviation of a_hat."""
    qn, a_hat, phi, status = _replicate(config, compute_phi=False)
    return _aggregate(config, qn, a_hat, phi, status, compute_phi=False)


def run_clt_experiment(config: ExperimentConfig) -> ExperimentSummary:
    """Replicated phi sample with its distances to the standard normal."""
    if config.params.a1 == 0:
        raise ValueError("the CLT experiment needs a1 != 0")
    qn, a_hat, phi, status = _replicate(config, compute_phi=True)
    return _aggregate(config, qn, a_hat, phi, status, compute_phi=True)
