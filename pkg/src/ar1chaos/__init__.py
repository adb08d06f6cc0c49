"""AR(1) time series driven by second-chaos white noise: simulation,
closed-form limit constants, exact finite-n moment oracle, mean-reversion
estimation, and replicated verification experiments."""

from .ar1 import AR1Params, Trajectory, drift_at, drift_path, quadratic_variation, simulate
from .estimator import DomainError, MeanReversionEstimate, estimate_a1, phi_statistic
from .montecarlo import (
    ExperimentConfig,
    ExperimentSummary,
    ks_distance,
    mix_seed,
    run_clt_experiment,
    run_table_experiment,
    w1_distance,
)
from .noise import NoiseSpec, make_preset, spectrum_sums
from .oracle import exact_mean_qn, exact_nvar_qn, exact_var_t2, exact_var_t4
from .theory import TheoryConstants, constants, convergence_rate_bound, estimator_asymptotic_variance, mu

__all__ = [
    "AR1Params",
    "DomainError",
    "ExperimentConfig",
    "ExperimentSummary",
    "MeanReversionEstimate",
    "NoiseSpec",
    "TheoryConstants",
    "Trajectory",
    "constants",
    "convergence_rate_bound",
    "drift_at",
    "drift_path",
    "estimate_a1",
    "estimator_asymptotic_variance",
    "exact_mean_qn",
    "exact_nvar_qn",
    "exact_var_t2",
    "exact_var_t4",
    "ks_distance",
    "make_preset",
    "mix_seed",
    "mu",
    "phi_statistic",
    "quadratic_variation",
    "run_clt_experiment",
    "run_table_experiment",
    "simulate",
    "spectrum_sums",
    "w1_distance",
]

__version__ = "0.1.0"
