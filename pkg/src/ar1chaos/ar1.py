"""AR(1) recursion, deterministic drift, and quadratic variation.

Model: Y_0 = y0, Y_i = a0 + a1*Y_{i-1} + eps_i with |a1| < 1 and eps i.i.d.
from a NoiseSpec.  Splitting off the drift d_i = a1^i*y0 + a0*sum_{k<=i} a1^{i-k}
leaves the centered series c_i = Y_i - d_i, which satisfies the noise-only
recursion c_i = a1*c_{i-1} + eps_i with c_0 = 0.  The quadratic variation is
Q_n = (1/n) * sum_{i=1..n} c_i^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .noise import NoiseSpec


@dataclass(frozen=True)
class AR1Params:
    """(a0, a1, y0) with |a1| < 1 enforced at construction."""

    a0: float
    a1: float
    y0: float

    def __post_init__(self):
        if not abs(self.a1) < 1.0:
            raise ValueError(f"|a1| must be < 1, got a1={self.a1}")


@dataclass(frozen=True)
class Trajectory:
    """A simulated path with its drift and centered values.

    y and drift have n+1 entries (index 0..n); centered has n entries for
    indices 1..n (index 0 centers to zero identically and is not stored).
    Drift is stored, not recomputed, so the closed form stays testable.
    """

    params: AR1Params
    n: int
    y: np.ndarray
    drift: np.ndarray
    centered: np.ndarray
    seed: int


def drift_at(params: AR1Params, i: int) -> float:
    """d_i = a1^i*y0 + a0*(1-a1^i)/(1-a1); d_0 = y0."""
    if i < 0:
        raise ValueError("index must be nonnegative")
    a1 = params.a1
    return a1**i * params.y0 + params.a0 * (1.0 - a1**i) / (1.0 - a1)


def drift_path(params: AR1Params, n: int) -> np.ndarray:
    """d_0..d_n as one array."""
    powers = params.a1 ** np.arange(n + 1)
    return powers * params.y0 + params.a0 * (1.0 - powers) / (1.0 - params.a1)


def simulate(params: AR1Params, spec: NoiseSpec, n: int, seed: int) -> Trajectory:
    """Simulate Y_0..Y_n; identical arguments give identical trajectories.

    Noise layout: one standard_normal((n, D)) block on a fresh PCG64
    generator seeded with ``seed``; row i-1 drives step i.  The centered
    series is integrated by its own recursion c_i = a1*c_{i-1} + eps_i
    (so scaling the spectrum scales centered values exactly), and
    y_i = drift_i + c_i; the raw recursion then holds to rounding error.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, len(spec.sigmas)))
    eps = (z * z - 1.0) @ np.asarray(spec.sigmas)
    centered = lfilter([1.0], [1.0, -params.a1], eps)
    drift = drift_path(params, n)
    y = np.empty(n + 1)
    y[0] = params.y0
    y[1:] = drift[1:] + centered
    return Trajectory(params=params, n=n, y=y, drift=drift, centered=centered, seed=int(seed))


def quadratic_variation(traj: Trajectory) -> float:
    """Q_n = (1/n) sum of squared centered values."""
    return float(np.mean(traj.centered**2))


def center_mode(traj: Trajectory, mode: str = "oracle") -> np.ndarray:
    """Centered values under the requested convention.

    oracle     -> Y_i - d_i using the true parameters (as stored).
    empirical  -> Y_i - mean(Y_1..Y_n), the practical mode when the drift
                  is unknown.
    """
    if mode == "oracle":
        return traj.centered
    if mode == "empirical":
        tail = traj.y[1:]
        return tail - tail.mean()
    raise ValueError(f"unknown centering mode {mode!r}")


def quadratic_variation_centered(traj: Trajectory, mode: str = "oracle") -> float:
    c = center_mode(traj, mode)
    return float(np.mean(c * c))
