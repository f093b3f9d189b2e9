import itertools
import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy.special import erfcinv

from maskspectra.bounds import (
    BoundSpec,
    GaussianModel,
    bound_report,
    dirichlet_closed_form,
    gaussian_bound,
    gaussian_bound_approx,
    q_function,
    q_inverse,
    ratio_approximation,
    sigma_bound,
    worst_case_bound,
)
from maskspectra.masks import worst_case_mask
from maskspectra.spectrum import dft_direct, dft_fast, max_nonzero_bin


def test_worst_case_reference_values():
    assert worst_case_bound(127, 64) == pytest.approx(40.426, abs=1e-3)
    assert worst_case_bound(127, 102) == pytest.approx(23.439, abs=1e-3)
    assert worst_case_bound(127, 13) == pytest.approx(12.778, abs=1e-3)
    assert worst_case_bound(1543, 772) == pytest.approx(491.152, abs=1e-3)


def test_worst_case_endpoints():
    for n in (7, 127, 1543):
        assert worst_case_bound(n, 1) == 1.0
        assert worst_case_bound(n, n) == 0.0


def test_worst_case_domain_errors():
    with pytest.raises(ValueError):
        worst_case_bound(127, 0)
    with pytest.raises(ValueError):
        worst_case_bound(127, 128)
    with pytest.raises(ValueError):
        worst_case_bound(1, 1)


def test_worst_case_warns_for_composite_length():
    with pytest.warns(UserWarning, match="composite"):
        worst_case_bound(1000, 500)


def test_dirichlet_reference_values():
    assert dirichlet_closed_form(127, 64) == pytest.approx(40.426, abs=1e-3)
    assert dirichlet_closed_form(127, 13) == pytest.approx(12.778, abs=1e-3)
    for n in (31, 127):
        assert dirichlet_closed_form(n, n) == 0.0


def test_sum_and_closed_form_agree_on_sampled_primes():
    # full prime grid up to 2000 runs in the acceptance suite
    for n in (7, 31, 127, 251):
        for n_p in range(1, n + 1):
            w = worst_case_bound(n, n_p)
            d = dirichlet_closed_form(n, n_p)
            assert abs(w - d) <= 1e-9 * max(1.0, d), (n, n_p)


def test_worst_case_unimodal_in_support():
    for n in (127, 1543):
        mid = worst_case_bound(n, n // 2)
        assert mid >= worst_case_bound(n, 1)
        assert mid >= worst_case_bound(n, n)


def test_no_mask_beats_the_block_exhaustively():
    # every one of the 2^7 masks of length 7
    n = 7
    kernel = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    for bits in itertools.product((0, 1), repeat=n):
        x = np.array(bits, dtype=float)
        peak = float(np.abs(kernel @ x)[1:].max())
        n_p = int(x.sum())
        if n_p == 0:
            assert peak == 0.0
            continue
        assert peak <= worst_case_bound(n, n_p) + 1e-9


def test_block_attains_the_bound():
    # primes up to 4096; exact reference transform for the small one
    value = max_nonzero_bin(dft_direct(worst_case_mask(13, 4).bits.astype(float)))[1]
    assert abs(value - worst_case_bound(13, 4)) <= 1e-9
    for n in (13, 127, 541, 1543, 4093):
        for n_p in (1, n // 3, n // 2, n - 1, n):
            value = max_nonzero_bin(dft_fast(worst_case_mask(n, n_p).bits.astype(float)))[1]
            assert abs(value - worst_case_bound(n, n_p)) <= 1e-9 * max(1.0, value)


def test_ratio_approximation_reference_values():
    assert ratio_approximation(131071, 0.5) == pytest.approx(0.637, abs=2e-3)
    assert ratio_approximation(131071, 0.1) == pytest.approx(0.984, abs=3e-3)


def test_ratio_approximation_limit():
    assert abs(ratio_approximation(10**6, 0.5) - 2.0 / math.pi) < 1e-3


def test_ratio_approximation_clamps_negative_radicand():
    with pytest.warns(UserWarning, match="clamped"):
        assert ratio_approximation(2, 0.5) == 0.0


def test_ratio_approximation_domain():
    with pytest.raises(ValueError):
        ratio_approximation(100, 0.001)  # n*p < 1
    with pytest.raises(ValueError):
        ratio_approximation(100, 1.5)


def test_ratio_tracks_exact_worst_case_for_large_n():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # composite lengths in the grid
        for n in (1009, 4096, 8191):
            for p in np.arange(0.1, 0.95, 0.1):
                n_p = math.ceil(n * p)
                exact = worst_case_bound(n, n_p) / n_p
                assert abs(ratio_approximation(n, float(p)) - exact) <= 0.02, (n, p)


def test_q_function_reference_points():
    assert q_function(0.0) == 0.5
    assert q_function(3.0) == pytest.approx(1.3499e-3, abs=1e-7)
    for x in (-5.0, -1.2, 0.3, 2.0, 7.5):
        assert q_function(x) + q_function(-x) == pytest.approx(1.0, abs=1e-14)


def test_q_function_against_mpmath_oracle():
    mpmath.mp.dps = 40
    for x in np.linspace(-8.0, 8.0, 33):
        exact = float(0.5 * mpmath.erfc(mpmath.mpf(float(x)) / mpmath.sqrt(2)))
        assert q_function(float(x)) == pytest.approx(exact, rel=1e-12)


def test_q_inverse_basics():
    assert q_inverse(0.5) == 0.0
    assert q_inverse(q_function(2.345)) == pytest.approx(2.345, abs=1e-9)
    assert q_inverse(5e-5) == pytest.approx(3.89, abs=0.01)
    with pytest.raises(ValueError):
        q_inverse(0.0)
    with pytest.raises(ValueError):
        q_inverse(1.0)


def test_q_inverse_residual_contract():
    for y in (0.4999, 0.3, 1e-2, 1e-6, 1e-12, 1e-50, 1e-300, 0.75, 0.999):
        x = q_inverse(y)
        assert abs(q_function(x) - y) <= 1e-12 * y, y


def test_q_inverse_against_erfcinv_oracle():
    for y in (0.45, 0.1, 1e-3, 1e-8, 1e-15):
        assert q_inverse(y) == pytest.approx(math.sqrt(2.0) * float(erfcinv(2.0 * y)), rel=1e-12)


def test_gaussian_bound_reference_value():
    spec = BoundSpec(127, 0.5, epsilon=1e-4)
    assert gaussian_bound(spec) == pytest.approx(31.0, abs=0.1)


def test_gaussian_bound_union_mode_is_larger():
    plain = gaussian_bound(BoundSpec(127, 0.5, epsilon=1e-4))
    union = gaussian_bound(BoundSpec(127, 0.5, epsilon=1e-4, union_mode=True))
    assert union > plain


def test_gaussian_bound_vanishes_as_epsilon_approaches_one():
    assert gaussian_bound(BoundSpec(127, 0.5, epsilon=1 - 1e-9)) == pytest.approx(0.0, abs=1e-3)


def test_gaussian_bound_decreasing_in_epsilon():
    values = [gaussian_bound(BoundSpec(127, 0.5, epsilon=e)) for e in (1e-8, 1e-6, 1e-4, 1e-2, 0.3)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_gaussian_bound_exact_variance_halves_the_square():
    spec = BoundSpec(127, 0.5, epsilon=1e-4)
    assert gaussian_bound(spec, exact_variance=True) == pytest.approx(gaussian_bound(spec) / math.sqrt(2.0))


def test_gaussian_model_variants():
    assert GaussianModel.for_mask(127, 0.5).variance == pytest.approx(31.75)
    assert GaussianModel.for_mask(127, 0.5, exact=True).variance == pytest.approx(15.875)
    with pytest.raises(ValueError):
        GaussianModel(0.0)


def test_gaussian_approx_reference_value():
    spec = BoundSpec(127, 0.5, epsilon=1e-4)
    assert gaussian_bound_approx(spec) == pytest.approx(34.2, abs=0.1)


def test_gaussian_approx_dominates_exact_bound():
    # Q(x) <= exp(-x^2/2)/2 for x >= 0
    for eps in (1e-12, 1e-8, 1e-4, 1e-2, 0.1, 0.23):
        spec = BoundSpec(127, 0.5, epsilon=eps)
        assert gaussian_bound_approx(spec) >= gaussian_bound(spec), eps


def test_gaussian_approx_vanishes_as_epsilon_approaches_one():
    assert gaussian_bound_approx(BoundSpec(127, 0.5, epsilon=1 - 1e-9)) == pytest.approx(0.0, abs=1e-2)


def test_sigma_bound_values_and_ratio():
    assert sigma_bound(127, 0.5, 4) == pytest.approx(22.539, abs=1e-3)
    for n, p in ((127, 0.5), (1543, 0.8), (8191, 0.1), (131071, 0.33)):
        s3 = sigma_bound(n, p, 3)
        s4 = sigma_bound(n, p, 4)
        assert s4 == (4.0 / 3.0) * s3  # exact in floats by construction
        assert s4 / s3 == 4.0 / 3.0


def test_sigma_bound_sqrt_scaling():
    for m in (3, 4):
        assert sigma_bound(4 * 127, 0.5, m) == 2.0 * sigma_bound(127, 0.5, m)


def test_sigma_bound_multiplier_policy():
    with pytest.raises(ValueError):
        sigma_bound(127, 0.5, 5)
    with pytest.warns(UserWarning, match="nonstandard"):
        assert sigma_bound(127, 0.5, 5, allow_general_m=True) == pytest.approx(5 * math.sqrt(31.75))


def test_bound_spec_defaults_and_validation():
    spec = BoundSpec(127, 0.5)
    assert spec.n_p == 64
    assert BoundSpec(127, 0.5, epsilon=1e-4, union_mode=True).effective_epsilon == pytest.approx(1e-4 / 126)
    with pytest.raises(ValueError):
        BoundSpec(127, 0.5, n_p=128)
    with pytest.raises(ValueError):
        BoundSpec(127, 0.5, epsilon=0.0)


def test_bound_report_table_row():
    rep = bound_report(BoundSpec(127, 0.5, n_p=64, epsilon=1e-4))
    assert rep.worst_case == pytest.approx(40.426, abs=1e-3)
    assert rep.worst_case_ratio == pytest.approx(40.4264 / 64, abs=1e-4)
    # the printed table normalizes by N*p, which rounds to 0.637
    assert round(rep.worst_case_ratio_np, 3) == 0.637
    assert rep.ratio_approx == pytest.approx(ratio_approximation(127, 0.5))
    assert rep.sigma4 == (4.0 / 3.0) * rep.sigma3
    assert rep.sigma4 > rep.sigma3
    assert all(v >= 0 and math.isfinite(v) for v in (rep.worst_case, rep.gaussian_T, rep.gaussian_T_approx))


def test_bound_report_low_rate_row():
    rep = bound_report(BoundSpec(127, 0.1, n_p=13, epsilon=1e-4))
    assert rep.worst_case == pytest.approx(12.778, abs=1e-3)
    assert rep.worst_case_ratio_np == pytest.approx(1.006, abs=5e-3)
