"""Second-chaos innovation law: finite spectra and sampling.

An innovation is eps = sum_d sigma_d * (Z_d^2 - 1) with Z_d i.i.d. standard
normal, so it is mean zero with variance 2 * sum_d sigma_d^2.  A NoiseSpec is
just the finite weight sequence (sigma_1, ..., sigma_D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PRESET_KINDS = ("chi2", "exponential", "product_normal", "gumbel")


@dataclass(frozen=True)
class NoiseSpec:
    """Finite spectrum of weights defining the innovation law.

    Immutable and freely shareable between threads; samplers own their
    private random streams.
    """

    sigmas: tuple[float, ...]

    def __post_init__(self):
        sig = tuple(float(s) for s in self.sigmas)
        if len(sig) < 1:
            raise ValueError("spectrum must contain at least one weight")
        if not all(math.isfinite(s) for s in sig):
            raise ValueError("spectrum weights must be finite")
        object.__setattr__(self, "sigmas", sig)

    @property
    def variance(self) -> float:
        """Var(eps) = 2 * sum sigma_d^2."""
        return 2.0 * spectrum_sums(self)[0]

    def scaled(self, factor: float) -> "NoiseSpec":
        return NoiseSpec(tuple(factor * s for s in self.sigmas))


def make_preset(kind: str, sigma: float, truncation: int | None = None) -> NoiseSpec:
    """Build one of the named innovation laws, scaled by ``sigma``.

    chi2            -> [sigma]                    eps = sigma*(Z^2-1)
    exponential     -> [sigma, sigma]             eps = 2*sigma*(E-1), E ~ Exp(1)
    product_normal  -> [sigma, -sigma]            eps ~ 2*sigma*N*N'
    gumbel          -> per j = 1..truncation, two weights sigma/(2j); the
                       truncated series has variance 2*sigma^2*sum_{j<=D} 1/(2j^2),
                       increasing toward sigma^2*pi^2/6.  The truncation tail
                       is below sigma^2/(2D) on S2, hence below sigma^2/D on
                       the variance.

    ``truncation`` is required for (and only used by) the gumbel kind.
    """
    if kind not in PRESET_KINDS:
        raise ValueError(f"unknown preset kind {kind!r}; expected one of {PRESET_KINDS}")
    if not (sigma > 0):
        raise ValueError("sigma must be positive")
    if kind == "chi2":
        return NoiseSpec((sigma,))
    if kind == "exponential":
        return NoiseSpec((sigma, sigma))
    if kind == "product_normal":
        return NoiseSpec((sigma, -sigma))
    if truncation is None or int(truncation) < 1:
        raise ValueError("gumbel preset needs truncation >= 1")
    weights = []
    for j in range(1, int(truncation) + 1):
        w = sigma / (2.0 * j)
        weights.extend((w, w))
    return NoiseSpec(tuple(weights))


def spectrum_sums(spec: NoiseSpec) -> tuple[float, float, float]:
    """(S2, S4, S8) = (sum sigma^2, sum sigma^4, sum sigma^8)."""
    s = np.asarray(spec.sigmas, dtype=float)
    s2 = s * s
    s4 = s2 * s2
    return float(s2.sum()), float(s4.sum()), float((s4 * s4).sum())


def sample_noise(spec: NoiseSpec, rng: np.random.Generator) -> float:
    """One draw of eps = sum_d sigma_d*(Z_d^2 - 1)."""
    z = rng.standard_normal(len(spec.sigmas))
    return float((z * z - 1.0) @ np.asarray(spec.sigmas))


def sample_noise_block(spec: NoiseSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws of eps as a 1-d array.

    One standard_normal((n, D)) call per block: row i drives draw i, column d
    the weight sigma_d.  This layout is the determinism contract shared with
    ar1.simulate.
    """
    z = rng.standard_normal((n, len(spec.sigmas)))
    return (z * z - 1.0) @ np.asarray(spec.sigmas)
