"""Symmetric means of periodic positive sequences.

For X with period (x_1, ..., x_L) and a cut c in [0,1], the quantity of
interest is F_X(k, c) = S(X, kL, ceil(c k L))^{1/ceil(c k L)} on the grid
n = kL; F_X(k, 0) is the arithmetic mean of one period by convention.

The period-2 case (x, y) has closed forms: at c = 1/2 the mean reduces to
Legendre polynomials, S(X, 2k, k) = y^k (1-t)^k P_k(u) / C(2k, k) with
t = x/y and u = (1+t)/(1-t), and the limit of F_X(k, 1/2) is the 1/2-Hoelder
mean ((sqrt x + sqrt y)/2)^2. Near c = 1/3 three families of block lengths
reduce to terminating Gauss hypergeometric sums whose binomial prefactor
roots tend to 2*sqrt(3)/9.

X_d is the periodic sequence (period 10 d^2) that mimics the stationary
digit law truncated at d: floor(P(k) * 10 d^2) entries equal to k for each
k = 2..d, the remainder equal to 1.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Union

import mpmath

from .cfdigits import SurdValue, _squarefree_split
from .constants import gauss_kuzmin_pmf
from .symmeans import (CEIL, MultiplicityTable, esp_multiplicity,
                       rooted_ratio, working_dps, _ln_big, _to_mpf)

__all__ = [
    "PeriodicSeq", "FValue", "HolderHalfLimit", "ThreeScaled",
    "f_periodic", "legendre_p", "legendre_p_exact", "legendre_explicit",
    "scaled_legendre", "holder_half_limit", "hyp2f1_terminating",
    "hyp2f1_exact", "three_scaled", "xd_sequence",
]


def _normalize_entry(x):
    f = Fraction(x)
    if f <= 0:
        raise ValueError("period entries must be positive")
    return int(f) if f.denominator == 1 else f


@dataclass(frozen=True)
class PeriodicSeq:
    """A positive sequence given by one period (length L >= 1)."""

    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "period",
                           tuple(_normalize_entry(x) for x in self.period))
        if not self.period:
            raise ValueError("period must be nonempty")

    def __len__(self):
        return len(self.period)


@dataclass(frozen=True)
class FValue:
    """F_X(k, c) with the pre-root mean kept exact when on the grid."""

    k: int
    c: Union[float, Fraction]
    value: mpmath.mpf
    exact: Optional[Fraction] = None


def f_periodic(X: PeriodicSeq, k: int, c, precision: int = 30) -> FValue:
    """F_X(k, c) over n = kL entries, non-increasing and piecewise constant
    in c for fixed k. Pass c as a Fraction for exact grid placement."""
    if k < 1:
        raise ValueError("k must be >= 1")
    L = len(X.period)
    cf = Fraction(c)
    if not 0 <= cf <= 1:
        raise ValueError("c must lie in [0,1]")
    n = k * L
    if cf == 0:
        am = Fraction(sum(Fraction(x) for x in X.period), L)
        with mpmath.workdps(working_dps(precision)):
            return FValue(k, c, _to_mpf(am), am)
    m = CEIL.index(cf, n)
    counts = Counter(X.period)
    table = MultiplicityTable(tuple(sorted(((d, mult * k)
                                            for d, mult in counts.items()),
                                           reverse=True)), n)
    T = esp_multiplicity(table, m)
    binom = math.comb(n, m)
    return FValue(k, c, rooted_ratio(T, binom, m, precision),
                  Fraction(T) / binom)


def legendre_p(k: int, u, precision: int = 30) -> mpmath.mpf:
    """P_k(u) by the recursion (k+1) P_{k+1} = (2k+1) u P_k - k P_{k-1}."""
    if k < 0:
        raise ValueError("k must be >= 0")
    with mpmath.workdps(working_dps(precision)):
        uu = _to_mpf(u)
        prev, cur = mpmath.mpf(1), uu
        if k == 0:
            return prev
        for i in range(1, k):
            prev, cur = cur, ((2 * i + 1) * uu * cur - i * prev) / (i + 1)
        return cur


def legendre_p_exact(k: int, u) -> Fraction:
    """P_k(u) for rational u, exact, by the same recursion."""
    if k < 0:
        raise ValueError("k must be >= 0")
    uu = Fraction(u)
    prev, cur = Fraction(1), uu
    if k == 0:
        return prev
    for i in range(1, k):
        prev, cur = cur, ((2 * i + 1) * uu * cur - i * prev) / (i + 1)
    return cur


def legendre_explicit(k: int, u) -> Fraction:
    """P_k(u) for rational u via the explicit binomial-square sum
    2^{-k} sum_j C(k,j)^2 (u-1)^{k-j} (u+1)^j, an independent route."""
    if k < 0:
        raise ValueError("k must be >= 0")
    uu = Fraction(u)
    total = Fraction(0)
    for j in range(k + 1):
        total += Fraction(math.comb(k, j) ** 2) * (uu - 1) ** (k - j) * (uu + 1) ** j
    return total / 2 ** k


def scaled_legendre(k: int, u, precision: int = 30) -> mpmath.mpf:
    """(P_k(u) / C(2k,k))^{1/k}, accumulated in the log domain: the raw P_k
    overflow fixed-width floats near k ~ 150, so magnitude is swept into an
    integer power of two as the recursion runs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    with mpmath.workdps(working_dps(precision)):
        uu = _to_mpf(u)
        prev, cur = mpmath.mpf(1), uu
        shift_bits = 0
        for i in range(1, k):
            nxt = ((2 * i + 1) * uu * cur - i * prev) / (i + 1)
            e = mpmath.mag(nxt)
            if e > 256:
                scale = mpmath.mpf(2) ** (-e)
                nxt, cur = nxt * scale, cur * scale
                shift_bits += e
            prev, cur = cur, nxt
        ln_p = mpmath.log(cur) + shift_bits * mpmath.ln2
        return mpmath.exp((ln_p - _ln_big(math.comb(2 * k, k))) / k)


class HolderHalfLimit(NamedTuple):
    """((sqrt x + sqrt y)/2)^2 exactly and as a float."""
    exact: SurdValue
    value: float


def holder_half_limit(x, y) -> HolderHalfLimit:
    """The 1/2-Hoelder mean of x and y: the limit of F_X(k, 1/2) for the
    period-2 sequence X = (x, y)."""
    xf, yf = Fraction(x), Fraction(y)
    if xf <= 0 or yf <= 0:
        raise ValueError("x and y must be positive")
    # ((sqrt x + sqrt y)/2)^2 = (x + y)/4 + (1/2) sqrt(x y)
    prod = xf * yf
    s, D = _squarefree_split(prod.numerator * prod.denominator)
    # sqrt(x y) = (s / den) sqrt(D)
    lin = Fraction(s, prod.denominator)
    rat = (xf + yf) / 4
    c = math.lcm(rat.denominator, (lin / 2).denominator)
    exact = SurdValue(int(rat * c), int(lin / 2 * c), c, D)
    return HolderHalfLimit(exact, float(rat) + float(lin) / 2 * math.sqrt(D))


def _termination_index(a, b) -> int:
    nns = [int(-v) for v in (a, b)
           if Fraction(v).denominator == 1 and v <= 0]
    if not nns:
        raise ValueError("need a or b a nonpositive integer for termination")
    return min(nns)


def hyp2f1_terminating(a, b, c, t, precision: int = 30) -> mpmath.mpf:
    """Terminating Gauss sum sum_n (a)_n (b)_n / (c)_n * t^n / n! with
    rising factorials; a or b must be a nonpositive integer."""
    N = _termination_index(a, b)
    with mpmath.workdps(working_dps(precision)):
        aa, bb, cc, tt = (_to_mpf(v) for v in (a, b, c, t))
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        for n in range(N):
            den = (cc + n) * (n + 1)
            if den == 0:
                raise ValueError(f"c = {c} hits a pole at term {n + 1}")
            term = term * (aa + n) * (bb + n) / den * tt
            total += term
        return total


def hyp2f1_exact(a: int, b: int, c, t) -> Fraction:
    """Exact rational value of the terminating Gauss sum."""
    N = _termination_index(a, b)
    cc, tt = Fraction(c), Fraction(t)
    term = Fraction(1)
    total = Fraction(1)
    for n in range(N):
        if cc + n == 0:
            raise ValueError(f"c = {c} hits a pole at term {n + 1}")
        term = term * (a + n) * (b + n) / ((cc + n) * (n + 1)) * tt
        total += term
    return total


class ThreeScaled(NamedTuple):
    ns: tuple
    ms: tuple
    values: tuple
    prefactor_roots: tuple


def three_scaled(k: int, t, precision: int = 30) -> ThreeScaled:
    """The three closed-form means S(X, n, m) for the period-2 sequence
    (t, 1) at the block lengths n = 6k-2, 6k, 6k+2 (m = 2k, 2k, 2k+1),
    each a binomial prefactor times a terminating Gauss sum, plus the
    prefactor roots (C(n/2, m)/C(n, m))^{1/m}, which tend to 2 sqrt(3)/9.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    specs = (
        (6 * k - 2, 2 * k, math.comb(3 * k - 1, 2 * k), (-3 * k + 1, -2 * k, k)),
        (6 * k, 2 * k, math.comb(3 * k, 2 * k), (-3 * k, -2 * k, 1 + k)),
        (6 * k + 2, 2 * k + 1, math.comb(3 * k + 1, 2 * k + 1),
         (-3 * k - 1, -2 * k - 1, 1 + k)),
    )
    values, roots = [], []
    with mpmath.workdps(working_dps(precision)):
        for n, m, half_binom, (a, b, c) in specs:
            binom = math.comb(n, m)
            pref = mpmath.exp(_ln_big(half_binom) - _ln_big(binom))
            values.append(pref * hyp2f1_terminating(a, b, c, t, precision))
            roots.append(mpmath.exp((_ln_big(half_binom) - _ln_big(binom)) / m))
    return ThreeScaled(tuple(s[0] for s in specs), tuple(s[1] for s in specs),
                       tuple(values), tuple(roots))


def _floor_pow_log2(arg: Fraction, N: int) -> int:
    """floor(N * log2(arg)) exactly: largest m with 2^m <= arg^N."""
    An, Bn = arg.numerator ** N, arg.denominator ** N
    m = 0
    while (Bn << (m + 1)) <= An:
        m += 1
    return m


def xd_sequence(d: int) -> PeriodicSeq:
    """The period-10d^2 sequence matching the stationary digit law up to d:
    floor(P(k) * 10 d^2) copies of each digit k = 2..d (in that order),
    then 1s. The digit order within the period does not change any
    symmetric mean; this order matches the worked d = 2, 3 values, e.g.
    d=3 gives fifteen 2s, eight 3s, sixty-seven 1s."""
    if d < 2:
        raise ValueError("d must be >= 2")
    N = 10 * d * d
    period = []
    for digit in range(2, d + 1):
        cnt = _floor_pow_log2(gauss_kuzmin_pmf(digit).argument, N)
        period.extend([digit] * cnt)
    if len(period) > N:
        raise RuntimeError("digit counts exceed the period length")
    period.extend([1] * (N - len(period)))
    return PeriodicSeq(tuple(period))
