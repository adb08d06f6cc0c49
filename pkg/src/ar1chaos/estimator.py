"""Moment estimator of |a1| from the quadratic variation, and its CLT statistic.

With sigma known, E[Q_n] -> mu = 2*sigma^2/(1-a1^2), so
a_hat = f(Q_n) with f(x) = sqrt(1 - 2*sigma^2/x), the inverse of mu viewed
as a function of |a1|.  f only makes sense for Q_n > 2*sigma^2; smaller
values are a domain error, reported rather than clamped so failures stay
visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .theory import estimator_asymptotic_variance, mu

NORMALIZATIONS = ("published", "corrected", "oracle_exact")

DOMAIN_GUARD = 1e-12


class DomainError(ValueError):
    """Q_n is incompatible with any |a1| in (0,1) at this sigma."""


@dataclass(frozen=True)
class MeanReversionEstimate:
    a_hat: float
    qn: float
    sigma: float
    phi: float | None = None
    normalization: str | None = None


def estimate_a1(qn: float, sigma: float) -> MeanReversionEstimate:
    """a_hat = sqrt(1 - 2*sigma^2/qn); raises DomainError at or below 2*sigma^2.

    The guard is relative (qn must exceed 2*sigma^2 by one part in 1e12) so
    borderline samples fail loudly instead of returning a_hat = 0.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    floor = 2.0 * sigma * sigma
    if not qn > floor * (1.0 + DOMAIN_GUARD):
        raise DomainError(
            f"qn={qn!r} is not above 2*sigma^2={floor!r}; "
            "no |a1| in (0,1) is compatible with this sample"
        )
    return MeanReversionEstimate(a_hat=math.sqrt(1.0 - floor / qn), qn=qn, sigma=sigma)


def fprime_at_mu(a1: float, sigma: float) -> float:
    """f'(mu) = (1-a1^2)^2 / (4*sigma^2*|a1|), the delta-method slope."""
    if a1 == 0:
        raise ValueError("f'(mu) diverges at a1 = 0")
    mu(a1, sigma)  # validates |a1| < 1 and sigma > 0
    return (1.0 - a1 * a1) ** 2 / (4.0 * sigma * sigma * abs(a1))


def phi_statistic(a_hat: float, a1_true: float, n: int, normalization: str = "published",
                  oracle_var: float | None = None, sigma: float = 1.0) -> float:
    """Studentized statistic comparing a_hat to |a1_true|.

    published    -> sqrt(2*a1^2/((1-a1^2)(5-4*a1^2))) * sqrt(n) * (a_hat-|a1|)
    corrected    -> same with (7-5*a1^2)
    oracle_exact -> (a_hat-|a1|) / (f'(mu)*sqrt(oracle_var)), where
                    oracle_var is the exact Var(Q_n) at the same sigma (the
                    1/sqrt(n) scale is already inside it, so n is unused).
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")
    if a1_true == 0:
        raise ValueError("phi is undefined at a1 = 0")
    dev = a_hat - abs(a1_true)
    if normalization == "oracle_exact":
        if oracle_var is None or not oracle_var > 0:
            raise ValueError("oracle_exact normalization needs a positive oracle_var")
        return dev / (fprime_at_mu(a1_true, sigma) * math.sqrt(oracle_var))
    if n < 1:
        raise ValueError("n must be >= 1")
    variant = "published" if normalization == "published" else "corrected"
    return math.sqrt(n / estimator_asymptotic_variance(a1_true, variant)) * dev
