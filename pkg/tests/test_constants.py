"""Tests for the metric constants and the digit distribution."""

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from macsym.constants import (
    ConstantValue,
    gauss_kuzmin_cdf,
    gauss_kuzmin_pmf,
    holder_kp,
    holder_kp_direct,
    khinchin_k0,
    khinchin_k0_direct,
    limsup_upper_bound,
    limsup_upper_bound_baby,
)


# --------------------------------------------------------------- K0 and K_p

def test_k0_reference_digits():
    v = float(khinchin_k0(1e-10).value)
    assert round(v, 7) == 2.6854520


def test_k0_self_consistent_across_tolerances():
    loose = khinchin_k0(1e-6)
    tight = khinchin_k0(1e-12)
    assert abs(float(loose.value) - float(tight.value)) < 1e-6
    assert loose.terms_used <= tight.terms_used
    assert loose.tail_bound <= loose.tol


def test_k0_agrees_with_direct_route():
    accel = khinchin_k0(1e-10)
    direct = khinchin_k0_direct(1e-5)
    assert abs(float(accel.value) - float(direct.value)) < 1e-5
    assert direct.tail_bound <= 1e-5


def test_k0_direct_refuses_impractical_tolerance():
    with pytest.raises(ValueError, match="impractical"):
        khinchin_k0_direct(1e-9)


def test_k0_validation():
    with pytest.raises(ValueError):
        khinchin_k0(0.0)
    with pytest.raises(ValueError):
        khinchin_k0(1e-8, cut=3)


def test_kp_minus_one_reference_digits():
    v = float(holder_kp(-1.0, 1e-12).value)
    assert abs(v - 1.745405662407379) < 2e-12


def test_kp_agrees_with_direct_route():
    # the direct tail decays like R^(p-1), so positive p needs a loose tol
    for p, tol in ((-1.0, 1e-5), (-0.5, 1e-6), (0.5, 1e-3)):
        accel = holder_kp(p, 1e-12)
        direct = holder_kp_direct(p, tol)
        assert abs(float(accel.value) - float(direct.value)) < tol


def test_kp_validation():
    for bad in (1.0, 1.5):
        with pytest.raises(ValueError):
            holder_kp(bad, 1e-8)
        with pytest.raises(ValueError):
            holder_kp_direct(bad, 1e-4)
    with pytest.raises(ValueError):
        holder_kp(0.0, 1e-8)
    with pytest.raises(ValueError):
        holder_kp_direct(0.0, 1e-4)
    with pytest.raises(ValueError):
        holder_kp(-1.0, -1e-8)


def test_tail_bound_halves_when_cut_doubles():
    for make in (lambda cut: khinchin_k0(1e-12, cut=cut),
                 lambda cut: holder_kp(-1.0, 1e-12, cut=cut),
                 lambda cut: holder_kp(0.5, 1e-12, cut=cut)):
        a, b = make(32), make(64)
        assert abs(float(a.value) - float(b.value)) < 1e-12


def test_kp_continuous_and_increasing_through_zero():
    k0 = float(khinchin_k0(1e-13).value)
    gaps = []
    for eps in (1e-2, 1e-3):
        up = float(holder_kp(eps, 1e-13).value)
        dn = float(holder_kp(-eps, 1e-13).value)
        assert dn < k0 < up
        gaps.append(max(up - k0, k0 - dn))
    # the gap shrinks by roughly the derivative ratio and ends below 1e-2
    assert gaps[1] < gaps[0]
    assert gaps[1] < 1e-2


def test_constant_value_rejects_unmet_tolerance():
    with pytest.raises(ValueError):
        ConstantValue(mpmath.mpf(1), tol=1e-9, terms_used=3, tail_bound=1e-8)
    cv = khinchin_k0(1e-6)
    assert float(cv) == float(cv.value)


# --------------------------------------------------------- digit distribution

def test_pmf_first_value_exact_argument():
    p = gauss_kuzmin_pmf(1)
    assert p.argument == Fraction(4, 3)
    assert round(p.value, 10) == 0.4150374993


def test_pmf_second_value_scaled_floor():
    assert math.floor(gauss_kuzmin_pmf(2).value * 40) == 6


def test_pmf_positive_and_decreasing():
    vals = [gauss_kuzmin_pmf(k).value for k in range(1, 201)]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_pmf_validation():
    with pytest.raises(ValueError):
        gauss_kuzmin_pmf(0)
    with pytest.raises(ValueError):
        gauss_kuzmin_cdf(0)


def test_cdf_telescopes_partial_sums():
    acc = math.fsum(gauss_kuzmin_pmf(k).value for k in range(1, 2001))
    cdf = gauss_kuzmin_cdf(2000)
    assert cdf.argument == Fraction(2 * 2001, 2002)
    assert abs(acc - cdf.value) < 1e-12


def test_pmf_mass_sums_toward_one():
    k = np.arange(1, 10 ** 6 + 1, dtype=np.float64)
    total = float(np.sum(np.log2(1.0 + 1.0 / (k * (k + 2.0)))))
    assert abs(total - gauss_kuzmin_cdf(10 ** 6).value) < 5e-12
    deficit = 1.0 - total
    # the mass beyond 10^6 is log2(1 + 1e-6) = 1.44e-6, not 1e-6
    assert 1.0e-6 < deficit < 2.0e-6


# ------------------------------------------------------------- limsup bounds

def test_limsup_bound_is_the_stated_power_combination():
    k0 = khinchin_k0(1e-16).value
    km1 = holder_kp(-1.0, 1e-16).value
    got = limsup_upper_bound(0.5)
    assert abs(got - float(k0 ** 2 / km1)) < 1e-9
    assert abs(got - 4.13179159742097) < 1e-9


def test_limsup_improves_on_baby_bound():
    for c in np.linspace(0.1, 0.9, 9):
        assert limsup_upper_bound(float(c)) < limsup_upper_bound_baby(float(c))


def test_limsup_approaches_k0_as_c_approaches_one():
    k0 = float(khinchin_k0(1e-12).value)
    assert abs(limsup_upper_bound(0.999) - k0) < 2e-2
    assert abs(limsup_upper_bound_baby(0.999) - k0) < 2e-2


def test_limsup_validation():
    for c in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ValueError):
            limsup_upper_bound(c)
        with pytest.raises(ValueError):
            limsup_upper_bound_baby(c)
