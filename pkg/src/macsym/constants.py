"""Metric constants of continued-fraction digit averages.

The geometric digit average of almost every real converges to
K0 = prod_{r>=1} (1 + 1/(r(r+2)))^{log2 r}, and the power-p Hoelder
averages (p < 1) converge to K_p = (sum_r -r^p log2(1 - 1/(r+1)^2))^{1/p}.
The digit distribution itself follows P(k) = log2(1 + 1/(k(k+2))).

Two evaluation routes are provided for each constant. The production route
resums the tail through zeta values: with y = 1/r,
ln((r+1)^2/(r(r+2))) = 2 ln(1+y) - ln(1+2y) = sum_{j>=2} b_j y^j where
b_j = (-1)^j (2^j - 2)/j, so the tail past a cutoff R collapses to
sum_j b_j (zeta(j-p) - partial sums), which converges geometrically like
(2/R)^j. The *_direct companions sum the defining series term by term with
an integral-comparison tail bound; they are slower but independent, and the
test suite plays the two against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np

__all__ = [
    "ConstantValue", "GaussKuzminPMF", "khinchin_k0", "khinchin_k0_direct",
    "holder_kp", "holder_kp_direct", "gauss_kuzmin_pmf", "gauss_kuzmin_cdf",
    "limsup_upper_bound", "limsup_upper_bound_baby",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ConstantValue:
    """A truncated-series evaluation: the value, the tolerance it was asked
    to meet, how many series terms were consumed, and the rigorous bound on
    everything thrown away (always <= tol on return)."""

    value: mpmath.mpf
    tol: float
    terms_used: int
    tail_bound: float

    def __post_init__(self):
        if self.tail_bound > self.tol:
            raise ValueError("tail bound exceeds requested tolerance")

    def __float__(self):
        return float(self.value)


def _guard_dps(tol: float) -> int:
    # 10 guard digits beyond the precision tol implies
    return max(15, int(math.ceil(-math.log10(tol)))) + 10


def _series_b(j: int) -> Fraction:
    return Fraction((-1) ** j * (2 ** j - 2), j)


def khinchin_k0(tol: float, cut: int = 32) -> ConstantValue:
    """K0 = prod_{r>=1} (1 + 1/(r(r+2)))^{log2 r} to absolute tolerance tol.

    Terms r <= cut are summed directly; the rest arrive through
    -zeta'(j) = sum_{r>=2} ln(r) r^{-j}. The tail over j is bounded by
    (ln R + 1) R (2/R)^{j+1} / (1 - 2/R) and propagated to the value scale.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if cut < 4:
        raise ValueError("cut must be at least 4")
    R = cut
    with mpmath.workdps(_guard_dps(tol) + 8):
        lnr = [mpmath.log(r) for r in range(2, R + 1)]
        kernel = [mpmath.log(mpmath.mpf((r + 1) ** 2) / (r * (r + 2)))
                  for r in range(2, R + 1)]
        A = mpmath.fsum(l * k for l, k in zip(lnr, kernel))
        terms = R - 1
        geo = 1.0 / (1.0 - 2.0 / R)
        j = 1
        while True:
            j += 1
            bj = _series_b(j)
            partial = mpmath.fsum(l * mpmath.mpf(r) ** (-j)
                                  for l, r in zip(lnr, range(2, R + 1)))
            A += (mpmath.mpf(bj.numerator) / bj.denominator) * \
                (-mpmath.zeta(j, derivative=1) - partial)
            terms += 1
            tail_A = (math.log(R) + 1.0) * R * (2.0 / R) ** (j + 1) * geo
            value = mpmath.exp(A / mpmath.ln2)
            bound = float(value) / LN2 * tail_A * 1.01
            if bound < tol:
                return ConstantValue(value, tol, terms, bound)


def khinchin_k0_direct(tol: float) -> ConstantValue:
    """K0 by direct summation of sum_{r>=2} log2(r) ln(1 + 1/(r(r+2))).

    The terms are below ln(r)/(r^2 ln 2), so by integral comparison the log
    tail past R is below (ln R + 1)/(R ln 2); the cutoff is the smallest R
    whose bound, propagated to the value, is below tol. Practical for
    tol >= ~1e-7; tighter requests are refused rather than ground out.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    def bound(R: int) -> float:
        return 3.0 * (math.log(R) + 1.0) / (R * LN2)

    R = 4
    while bound(R) >= tol:
        R *= 2
        if R > 300_000_000:
            raise ValueError(
                "direct route impractical below ~1e-7; use khinchin_k0")
    lo, hi = R // 2, R
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if bound(mid) < tol:
            hi = mid
        else:
            lo = mid
    R = hi

    A = 0.0
    for start in range(2, R + 1, 5_000_000):
        r = np.arange(start, min(start + 5_000_000, R + 1), dtype=np.float64)
        A += float(np.sum(np.log2(r) * np.log1p(1.0 / (r * (r + 2.0)))))
    return ConstantValue(mpmath.mpf(math.exp(A)), tol, R - 1, bound(R))


def holder_kp(p: float, tol: float, cut: int = 32) -> ConstantValue:
    """K_p = (sum_{r>=1} -r^p log2(1 - 1/(r+1)^2))^{1/p} for p < 1, p != 0.

    Same zeta resummation as khinchin_k0, with -zeta'(j) replaced by
    zeta(j - p). The inner sum S_p converges for every p < 1; p = 0 is the
    geometric case and belongs to khinchin_k0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p >= 1:
        raise ValueError("series diverges for p >= 1")
    if p == 0:
        raise ValueError("p = 0 is the geometric mean; use khinchin_k0")
    if cut < 4:
        raise ValueError("cut must be at least 4")
    R = cut
    with mpmath.workdps(_guard_dps(tol) + 8):
        pp = mpmath.mpf(p)
        rpow = [mpmath.mpf(r) ** pp for r in range(1, R + 1)]
        kernel = [mpmath.log(mpmath.mpf((r + 1) ** 2) / (r * (r + 2)))
                  for r in range(1, R + 1)]
        A = mpmath.fsum(w * k for w, k in zip(rpow, kernel))
        terms = R
        geo = 1.0 / (1.0 - 2.0 / R)
        j = 1
        while True:
            j += 1
            bj = _series_b(j)
            partial = mpmath.fsum(w * mpmath.mpf(r) ** (-j)
                                  for w, r in zip(rpow, range(1, R + 1)))
            A += (mpmath.mpf(bj.numerator) / bj.denominator) * \
                (mpmath.zeta(j - pp) - partial)
            terms += 1
            # sum_{r>R} r^{p-j'} <= R^{p+1-j'}/(j'-p-1), |b_j'| <= 2^j'
            tail_A = R ** (p + 1.0) * (2.0 / R) ** (j + 1) / (j - p) * geo
            S = A / mpmath.ln2
            value = S ** (1 / pp)
            bound = abs(float(value / S / pp)) * tail_A / LN2 * 1.01
            if bound < tol:
                return ConstantValue(value, tol, terms, bound)


def holder_kp_direct(p: float, tol: float) -> ConstantValue:
    """K_p by direct summation; tail terms are below r^{p-2}/ln 2, so the
    inner-sum tail past R is below R^{p-1}/((1-p) ln 2)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p >= 1 or p == 0:
        raise ValueError("need p < 1, p != 0")

    # crude S_p estimate to propagate the inner bound through x -> x^{1/p}
    r0 = np.arange(1, 4001, dtype=np.float64)
    S_est = float(np.sum(r0 ** p * np.log1p(1.0 / (r0 * (r0 + 2.0))))) / LN2

    def bound(R: int) -> float:
        inner = R ** (p - 1.0) / ((1.0 - p) * LN2)
        return abs(S_est ** (1.0 / p) / S_est / p) * inner * 1.05

    R = 4
    while bound(R) >= tol:
        R *= 2
        if R > 300_000_000:
            raise ValueError("direct route impractical at this tol; use holder_kp")
    A = 0.0
    for start in range(1, R + 1, 5_000_000):
        r = np.arange(start, min(start + 5_000_000, R + 1), dtype=np.float64)
        A += float(np.sum(r ** p * np.log1p(1.0 / (r * (r + 2.0)))))
    S = A / LN2
    return ConstantValue(mpmath.mpf(S) ** (1.0 / p), tol, R, bound(R))


class GaussKuzminPMF(NamedTuple):
    """P(k) = log2(argument) with the argument kept exact."""
    argument: Fraction
    value: float


def gauss_kuzmin_pmf(k: int) -> GaussKuzminPMF:
    """Probability log2(1 + 1/(k(k+2))) that a digit equals k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    arg = 1 + Fraction(1, k * (k + 2))
    return GaussKuzminPMF(arg, math.log2(arg.numerator) - math.log2(arg.denominator))


def gauss_kuzmin_cdf(K: int) -> GaussKuzminPMF:
    """P(digit <= K) = log2(2(K+1)/(K+2)): the telescoped partial sum."""
    if K < 1:
        raise ValueError("K must be >= 1")
    arg = Fraction(2 * (K + 1), K + 2)
    return GaussKuzminPMF(arg, math.log2(arg.numerator) - math.log2(arg.denominator))


_BOUND_TOL = 1e-20


def limsup_upper_bound(c: float, tol: float = 1e-12) -> float:
    """Upper bound K0^{1/c} * K_{-1}^{1 - 1/c} for the limsup of the rooted
    symmetric mean S(n, ceil(cn))^{1/ceil(cn)} along almost every alpha."""
    if not 0 < c < 1:
        raise ValueError("c must lie in (0,1)")
    k0 = khinchin_k0(_BOUND_TOL).value
    km1 = holder_kp(-1.0, _BOUND_TOL).value
    with mpmath.workdps(30):
        u = 1 / mpmath.mpf(c)
        return float(k0 ** u * km1 ** (1 - u))


def limsup_upper_bound_baby(c: float, tol: float = 1e-12) -> float:
    """The simpler companion bound K0^{1/c} (no inverse-mean correction)."""
    if not 0 < c < 1:
        raise ValueError("c must lie in (0,1)")
    k0 = khinchin_k0(_BOUND_TOL).value
    with mpmath.workdps(30):
        return float(k0 ** (1 / mpmath.mpf(c)))
