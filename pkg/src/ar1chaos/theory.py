"""Closed-form limits and bound constants for the quadratic variation.

Everything here is a pure function of (a1, spectrum).  Two variants are
carried throughout:

* ``published``: the symmetrized fourth-chaos inner product expanded with
  coefficients (4, 4), giving l2 = 4*S4/(1-a1^2)^2 + 4*(1+a1^2)*S2^2/(1-a1^2)^3.
* ``corrected``: coefficients (8, 16) from the identity
  4!*<u~ox~u, v~ox~v> = 8*<u,v>^2 + 16*<u ox_1 v, v ox_1 u>
  (verified on rank-one tensors and by the n=1 brute-force moment
  Var((Z^2-1)^2) = 56, where the (4, 4) expansion yields 40).

The two variants agree on l1 and on every bound constant c1..c6, c0; they
differ only in l2, limit_var and est_var.  The Monte Carlo suite adjudicates
which variant matches simulated variances (the corrected one does).

c3 and c5 are implemented n-free: the printed displays carry a residual 1/n
inside the radical, which would make them depend on the sample size; the
factor is dropped so they are genuine constants.  c6 uses 2*S2/(1-a1^2)^2,
the spectrum-general form of the mean bound constant.  c0 is assembled from
its printed display, whose denominator is the published limit l1+l2, so it
is variant-independent like the other bound constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .noise import NoiseSpec, spectrum_sums

VARIANTS = ("published", "corrected")


@dataclass(frozen=True)
class TheoryConstants:
    variant: str
    a1: float
    mu: float
    l1: float
    l2: float
    limit_var: float
    c1: float
    c2: float
    c2_1: float
    c2_2: float
    c3: float
    c4_1: float
    c4_2: float
    c4_3: float
    c5: float
    c6: float
    c0: float
    est_var: float

    CSV_FIELDS = (
        "mu", "l1", "l2", "limit_var", "c1", "c2", "c2_1", "c2_2",
        "c3", "c4_1", "c4_2", "c4_3", "c5", "c6", "c0", "est_var",
    )

    def as_rows(self):
        """(name, variant, value) rows for the constants CSV."""
        return [(name, self.variant, getattr(self, name)) for name in self.CSV_FIELDS]


def mu(a1: float, sigma: float) -> float:
    """Limit mean of Q_n for the single-weight spectrum [sigma]: 2*sigma^2/(1-a1^2)."""
    if not abs(a1) < 1.0:
        raise ValueError("|a1| must be < 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return 2.0 * sigma * sigma / (1.0 - a1 * a1)


def estimator_asymptotic_variance(a1: float, variant: str = "corrected") -> float:
    """Asymptotic variance of sqrt(n)*(a_hat - |a1|), single-weight spectrum.

    published -> (1-a1^2)(5-4*a1^2)/(2*a1^2)
    corrected -> (1-a1^2)(7-5*a1^2)/(2*a1^2)

    Undefined at a1 = 0 (no mean reversion to estimate; diverges).
    """
    _check_variant(variant)
    if a1 == 0:
        raise ValueError("estimator variance is undefined at a1 = 0")
    if not abs(a1) < 1.0:
        raise ValueError("|a1| must be < 1")
    q = a1 * a1
    factor = 5.0 - 4.0 * q if variant == "published" else 7.0 - 5.0 * q
    return (1.0 - q) * factor / (2.0 * q)


def l2_limit(a1: float, spec: NoiseSpec, variant: str) -> float:
    """Fourth-chaos contribution to the limit variance, per variant."""
    _check_variant(variant)
    s2, s4, _ = spectrum_sums(spec)
    q = a1 * a1
    if variant == "published":
        return 4.0 * s4 / (1.0 - q) ** 2 + 4.0 * (1.0 + q) * s2 * s2 / (1.0 - q) ** 3
    return 16.0 * s4 / (1.0 - q) ** 2 + 8.0 * (1.0 + q) * s2 * s2 / (1.0 - q) ** 3


def constants(a1: float, spec: NoiseSpec, variant: str = "corrected") -> TheoryConstants:
    """Evaluate every closed-form constant at (a1, spectrum).

    est_var is f'(mu)^2 * limit_var with sigma^2 taken as S2, which reduces
    to the printed single-weight closed forms when the spectrum has one
    weight; it is +inf at a1 = 0.
    """
    _check_variant(variant)
    if not abs(a1) < 1.0:
        raise ValueError("|a1| must be < 1")
    s2, s4, s8 = spectrum_sums(spec)
    if s2 <= 0:
        raise ValueError("spectrum must carry positive variance")
    q = a1 * a1
    one_q = 1.0 - q
    one_p4 = 1.0 - a1**4
    one_p8 = 1.0 - a1**8

    l1 = 32.0 * s4 / one_q**2
    l2_pub = l2_limit(a1, spec, "published")
    l2 = l2_pub if variant == "published" else l2_limit(a1, spec, "corrected")

    poly = 1.0 + q * (5.0 + 6.0 * q)
    c1 = 32.0 * s4 * poly / (one_p4**2 * one_q)
    c2_1 = 4.0 * s2 * s2 * (3.0 + 17.0 * q) / one_q**4
    c2_2 = 4.0 * s4 * poly / (one_p4**2 * one_q)
    c2 = c2_1 + c2_2

    c3 = math.sqrt(24.0 * 256.0 * s8 / (one_p8 * one_q**3))
    c5 = math.sqrt(24.0 * 4.0 * s8 / (one_p8 * one_q**3))
    c4_1 = math.sqrt(24.0 * s2 * s2 * s4 / (one_q * one_p4) ** 3)
    c4_2 = math.sqrt(24.0 * s2**4 / one_q**7)
    c4_3 = math.sqrt(24.0 * s2 * s2 * s4 / (one_p4**2 * one_q**4))

    c6 = 2.0 * s2 / one_q**2

    c0 = (4.0 * math.sqrt(2.0) / (l1 + l2_pub)) * (
        (c1 + c2) / (2.0 * math.sqrt(2.0))
        + c3
        + 36.0 * c4_3
        + 9.0 * c5
        + 36.0 * math.sqrt(3.0) * c4_2
        + 6.0 * math.sqrt(3.0) * math.sqrt(c3) * math.sqrt(c4_3)
        + 12.0 * math.sqrt(10.0) * c4_1
    )

    limit_var = l1 + l2
    mu_val = 2.0 * s2 / one_q
    if a1 == 0:
        est_var = math.inf
    else:
        fprime = one_q**2 / (4.0 * s2 * abs(a1))
        est_var = fprime * fprime * limit_var

    return TheoryConstants(
        variant=variant, a1=a1, mu=mu_val, l1=l1, l2=l2, limit_var=limit_var,
        c1=c1, c2=c2, c2_1=c2_1, c2_2=c2_2, c3=c3, c4_1=c4_1, c4_2=c4_2,
        c4_3=c4_3, c5=c5, c6=c6, c0=c0, est_var=est_var,
    )


def convergence_rate_bound(a1: float, spec: NoiseSpec, variant: str = "corrected") -> float:
    """Constant K in |n*Var(Q_n) - limit_var| <= K/n.

    published -> c1 + c2 as printed.  corrected -> c1 + 2*c2_1 + 4*c2_2,
    since the corrected identity scales the squared-inner-product part of
    the fourth-chaos sum by 2 and the contraction part by 4, and each
    part's 1/n bound scales linearly with its coefficient.
    """
    tc = constants(a1, spec, variant)
    if variant == "published":
        return tc.c1 + tc.c2
    return tc.c1 + 2.0 * tc.c2_1 + 4.0 * tc.c2_2


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
