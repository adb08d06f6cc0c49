"""Cross-checks of the geometric-sum oracle against direct computation.

The brute-force route materializes the diagonal kernel entries
e_i(k, d) = a1^(i-k) * sigma_d (k <= i) and works from first principles:
with c_i = sum_m e_i(m) * W_m, W_m i.i.d. copies of Z^2 - 1 (moments
E W = 0, E W^2 = 2, E W^3 = 8, E W^4 = 60), independence gives

    Cov(c_i^2, c_j^2) = 48 * sum_m e_i(m)^2 e_j(m)^2 + 8 * (sum_m e_i e_j)^2

which uses no symmetrization identity at all, so it adjudicates the
fourth-chaos coefficient dispute from outside both formulas.
"""

import numpy as np
import pytest

from ar1chaos.noise import make_preset, spectrum_sums
from ar1chaos.oracle import (
    DEFAULT_QUAD_CAP,
    contraction_sums,
    exact_mean_qn,
    exact_nvar_qn,
    exact_var_t2,
    exact_var_t4,
    report,
)

CHI2 = make_preset("chi2", 1.0)

SPECTRA = (
    make_preset("chi2", 1.0),
    make_preset("product_normal", 1.5),
    make_preset("gumbel", 1.0, truncation=3),
)


def kernel_entries(n, a1, spec):
    """Rows i = 1..n of explicit diagonal kernel entries, flattened over (k, d)."""
    sig = np.asarray(spec.sigmas)
    e = np.zeros((n, n * sig.size))
    for i in range(1, n + 1):
        for k in range(1, i + 1):
            e[i - 1, (k - 1) * sig.size:k * sig.size] = a1 ** (i - k) * sig
    return e


def brute_mean(n, a1, spec):
    e = kernel_entries(n, a1, spec)
    return 2.0 * float((e * e).sum()) / n


def brute_nvar(n, a1, spec, c_sq, c_ct, c_t2=32.0):
    e = kernel_entries(n, a1, spec)
    e2 = e * e
    x = e2 @ e2.T          # sum_m e_i^2 e_j^2
    y = (e @ e.T) ** 2     # <f_i, f_j>^2
    return float(((c_t2 + c_ct) * x + c_sq * y).sum()) / n


@pytest.mark.parametrize("spec", SPECTRA)
@pytest.mark.parametrize("a1", (0.5, -0.6, 0.0))
def test_mean_against_brute_force(spec, a1):
    for n in (1, 2, 3, 7, 40):
        assert exact_mean_qn(n, a1, spec) == pytest.approx(
            brute_mean(n, a1, spec), rel=1e-12)


@pytest.mark.parametrize("spec", SPECTRA)
@pytest.mark.parametrize("a1", (0.5, -0.6, 0.0))
def test_variance_against_first_principles(spec, a1):
    # Isserlis coefficients (48, 8) decompose as t2 = 32x and t4 = 16x + 8y:
    # exactly the corrected identity, for every spectrum and sign of a1
    for n in (1, 2, 3, 5, 25):
        assert exact_nvar_qn(n, a1, spec, "corrected") == pytest.approx(
            brute_nvar(n, a1, spec, c_sq=8.0, c_ct=16.0), rel=1e-12)


@pytest.mark.parametrize("a1", (0.5, -0.6))
def test_published_variant_transcription(a1):
    # the published identity claims (4, 4); same sums, different weights
    for n in (1, 4, 12):
        assert exact_nvar_qn(n, a1, CHI2, "published") == pytest.approx(
            brute_nvar(n, a1, CHI2, c_sq=4.0, c_ct=4.0), rel=1e-12)


def test_frozen_values():
    assert exact_mean_qn(2, 0.5, CHI2) == pytest.approx(2.25, rel=1e-15)
    # n = 1: Q_1 = (Z^2-1)^2, Var = E(Z^2-1)^4 - 4 = 60 - 4 = 56
    assert exact_nvar_qn(1, 0.0, CHI2, "corrected") == pytest.approx(56.0, rel=1e-15)
    assert exact_nvar_qn(1, 0.5, CHI2, "corrected") == pytest.approx(56.0, rel=1e-15)
    assert exact_nvar_qn(1, 0.5, CHI2, "published") == pytest.approx(40.0, rel=1e-15)
    assert exact_var_t2(1, 0.5, CHI2) == pytest.approx(32.0, rel=1e-15)
    assert exact_nvar_qn(100, 0.5, CHI2, "published") == pytest.approx(
        75.333530864197527, rel=1e-13)
    assert exact_nvar_qn(100, 0.5, CHI2, "corrected") == pytest.approx(
        108.2563950617284, rel=1e-13)


def test_nvar_approaches_limit():
    from ar1chaos.theory import constants

    for variant in ("published", "corrected"):
        limit = constants(0.5, CHI2, variant).limit_var
        gaps = [abs(exact_nvar_qn(n, 0.5, CHI2, variant) - limit) for n in (10, 100, 1000)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.2


def brute_contractions(n, a1, spec):
    e = kernel_entries(n, a1, spec)
    e2 = e * e
    f = e @ e.T
    t4 = np.einsum("im,jm,km,lm->ijkl", e, e, e, e)   # <f_i ox1 f_j, f_k ox1 f_l>
    p8 = np.einsum("im,jm,km,lm->", e2, e2, e2, e2)   # same with squared entries
    n2 = float(n) * float(n)
    return {
        "qg2": 256.0 * p8 / n2,
        "cross": 4.0 * p8 / n2,
        "g4_r1": float(np.einsum("ik,jl,ijkl->", f, f, t4)) / n2,
        "g4_r2": float(np.trace(np.linalg.matrix_power(f, 4))) / n2,
        "g4_r3": float(np.einsum("ij,kl,ijkl->", f, f, t4)) / n2,
    }


@pytest.mark.parametrize("spec", SPECTRA)
@pytest.mark.parametrize("a1", (0.5, -0.6))
@pytest.mark.parametrize("n", (1, 2, 3, 5))
def test_contraction_sums_against_brute_force(spec, a1, n):
    got = contraction_sums(n, a1, spec)
    want = brute_contractions(n, a1, spec)
    assert set(got) == set(want)
    for name in want:
        assert got[name] == pytest.approx(want[name], rel=1e-11), name


def test_contraction_identities():
    sums = contraction_sums(6, 0.5, CHI2)
    # the four-index inner product is fully symmetric, so r1 and r3 coincide
    assert sums["g4_r1"] == pytest.approx(sums["g4_r3"], rel=1e-14)
    assert sums["qg2"] == pytest.approx(64.0 * sums["cross"], rel=1e-14)
    one = contraction_sums(1, 0.5, CHI2)
    assert one["qg2"] == pytest.approx(256.0, rel=1e-15)
    assert one["cross"] == pytest.approx(4.0, rel=1e-15)


def test_contractions_at_zero_coefficient():
    _, _, s8 = spectrum_sums(make_preset("product_normal", 1.2))
    for n in (1, 4, 9):
        sums = contraction_sums(n, 0.0, make_preset("product_normal", 1.2))
        assert sums["qg2"] == pytest.approx(256.0 * s8 / n, rel=1e-13)


def test_quadruple_cap():
    with pytest.raises(ValueError):
        contraction_sums(DEFAULT_QUAD_CAP + 1, 0.5, CHI2)
    contraction_sums(DEFAULT_QUAD_CAP + 1, 0.5, CHI2, cap=DEFAULT_QUAD_CAP + 1)


def test_report_rows():
    rep = report(10, 0.5, CHI2)
    rows = rep.as_rows()
    assert [r[0] for r in rows] == [
        "mean_qn", "var_t2_scaled", "var_t4_published", "var_t4_corrected",
        "nvar_published", "nvar_corrected",
    ]
    assert all(r[1] == 10 for r in rows)
    assert rep.nvar_corrected == pytest.approx(
        rep.var_t2_scaled + rep.var_t4_corrected, rel=1e-15)


def test_report_bounds_use_squared_constants():
    from ar1chaos.theory import constants

    rep = report(8, 0.5, CHI2, include_contractions=True)
    tc = constants(0.5, CHI2, "corrected")
    expected_rhs = {
        "qg2": tc.c3**2,
        "cross": tc.c5**2,
        "g4_r1": tc.c4_1**2,
        "g4_r2": tc.c4_2**2,
        "g4_r3": tc.c4_3**2,
    }
    for name, (lhs, rhs) in rep.bound_gaps.items():
        assert lhs == pytest.approx(8 * rep.contractions[name], rel=1e-15)
        assert rhs == pytest.approx(expected_rhs[name], rel=1e-15)
        assert lhs <= rhs


def test_input_validation():
    with pytest.raises(ValueError):
        exact_mean_qn(0, 0.5, CHI2)
    with pytest.raises(ValueError):
        exact_nvar_qn(5, 1.0, CHI2)
    with pytest.raises(ValueError):
        exact_var_t4(5, 0.5, CHI2, "alternative")
