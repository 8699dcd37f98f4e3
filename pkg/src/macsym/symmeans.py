"""Exact elementary symmetric means of digit sequences.

The k-th symmetric mean of an n-tuple is the k-th elementary symmetric
polynomial divided by C(n,k). Everything up to the final k-th root is exact:
the numerator T is an arbitrary-precision integer (or rational for
reciprocal digits), assembled either by the classic prefix recursion or, for
long sequences with repeated digits, as one coefficient of the product
prod_j (1 + d_j z)^{m_j} over the distinct digits.

Only the root S_root = (T / C(n,k))^{1/k} is floating point, and it carries
an explicit precision.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

import mpmath

from ._poly import binom_times_power_row, poly_prod_trunc
from .cfdigits import DigitSeq

__all__ = [
    "MultiplicityTable", "MeanReport", "CeilPolicy", "CEIL", "NiculescuResult",
    "esp_prefix", "esp_multiplicity", "mean_report", "inverse_mean_report",
    "maclaurin_chain", "niculescu_check", "binom_root", "binom_root_limit",
    "working_dps", "rooted_ratio",
]

Digit = Union[int, Fraction]


def working_dps(precision: int) -> int:
    """Internal decimal precision used for a requested significant-digit
    count: max(30, 25 + precision)."""
    return max(30, 25 + precision)


def _ln_big(x: int) -> mpmath.mpf:
    """log of a positive integer at the current mpmath precision, via a
    scaled mantissa plus exponent * ln 2 (safe for million-bit inputs)."""
    drop = x.bit_length() - mpmath.mp.prec - 16
    if drop > 0:
        return mpmath.log(mpmath.mpf(x >> drop)) + drop * mpmath.ln2
    return mpmath.log(mpmath.mpf(x))


def _ln_exact(x: Union[int, Fraction]) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return _ln_big(x.numerator) - _ln_big(x.denominator)
    return _ln_big(x)


def _to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _digit_tuple(digits) -> tuple:
    if isinstance(digits, DigitSeq):
        return digits.digits
    return tuple(digits)


@dataclass(frozen=True)
class MultiplicityTable:
    """Digit sequence compressed to (digit, multiplicity) pairs, digits
    strictly decreasing. Decreasing order is a performance default: the
    truncated-product engine runs fastest when large digits enter first."""

    entries: tuple
    total: int

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           tuple((d, int(m)) for d, m in self.entries))
        if any(m < 1 or d <= 0 for d, m in self.entries):
            raise ValueError("digits must be positive, multiplicities >= 1")
        values = [d for d, _ in self.entries]
        if any(a <= b for a, b in zip(values, values[1:])):
            raise ValueError("digits must be strictly decreasing")
        if sum(m for _, m in self.entries) != self.total:
            raise ValueError("multiplicities must sum to total")

    @classmethod
    def from_digits(cls, digits) -> "MultiplicityTable":
        seq = _digit_tuple(digits)
        counts = Counter(seq)
        entries = tuple(sorted(counts.items(), reverse=True))
        return cls(entries, len(seq))


@dataclass(frozen=True)
class MeanReport:
    """One symmetric mean, exact and rooted.

    T is the exact symmetric-polynomial value, S = T / C(n,k), and S_root is
    S^{1/k} carrying `precision` significant decimal digits. R_root is set
    by inverse_mean_report (the report then describes the reciprocal
    digits, so S_root and R_root coincide).
    """

    n: int
    k: int
    T: Union[int, Fraction]
    binom: int
    S: Fraction
    S_root: mpmath.mpf
    precision: int
    R_root: Optional[mpmath.mpf] = None

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k={self.k} out of range 1..{self.n}")
        if self.S != Fraction(self.T) / self.binom:
            raise ValueError("S must equal T / binom exactly")


@dataclass(frozen=True)
class CeilPolicy:
    """Fixed rule for real-valued k: a non-integer k(n) maps to its ceiling.
    Applied uniformly by every operation that accepts a real k."""

    rule: str = "ceil"

    def index(self, c, n: int) -> int:
        k = math.ceil(Fraction(c) * n)
        if not 1 <= k <= n:
            raise ValueError(f"ceil({c}*{n}) = {k} out of range 1..{n}")
        return k


CEIL = CeilPolicy()


def esp_prefix(x: Sequence, kmax: int) -> list:
    """All elementary symmetric polynomial values E_0..E_kmax of x, exact,
    via the prefix recursion E(i,k) = x_i E(i-1,k-1) + E(i-1,k).

    Integer inputs produce integers; rational inputs produce Fractions.
    """
    xs = list(x)
    n = len(xs)
    if kmax > n:
        raise ValueError(f"kmax={kmax} exceeds sequence length {n}")
    E = [0] * (kmax + 1)
    E[0] = 1
    for i, v in enumerate(xs, start=1):
        for k in range(min(i, kmax), 0, -1):
            E[k] = E[k] + v * E[k - 1]
    return E


def _int_coeff(entries, kmax: int) -> list:
    rows = [binom_times_power_row(d, m, kmax) for d, m in entries]
    return poly_prod_trunc(rows, kmax)


def _scaled_entries(entries) -> tuple[list, int]:
    """Rewrite rational digits p/q over a common denominator so the integer
    engine applies: coefficient k of the scaled product / Q^k is exact."""
    fracs = [Fraction(d) for d, _ in entries]
    Q = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    scaled = [(int(f * Q), m) for f, (_, m) in zip(fracs, entries)]
    return scaled, Q


def esp_multiplicity(L: MultiplicityTable, k: int):
    """Exact T = E_k of the expanded digit list, computed as the degree-k
    coefficient of prod_j (1 + d_j z)^{m_j} with truncated multiplication.

    Identical to esp_prefix on the expanded list, but scales to n in the
    thousands when there are few distinct digits.
    """
    if not 0 <= k <= L.total:
        raise ValueError(f"k={k} out of range 0..{L.total}")
    if k == 0:
        return 1
    if all(isinstance(d, int) for d, _ in L.entries):
        return int(_int_coeff(L.entries, k)[k])
    scaled, Q = _scaled_entries(L.entries)
    return Fraction(int(_int_coeff(scaled, k)[k]), Q ** k)


def _esp_all(L: MultiplicityTable) -> list:
    """Every coefficient E_0..E_total in one truncated-product sweep."""
    if all(isinstance(d, int) for d, _ in L.entries):
        return [int(c) for c in _int_coeff(L.entries, L.total)]
    scaled, Q = _scaled_entries(L.entries)
    raw = _int_coeff(scaled, L.total)
    return [Fraction(int(c), Q ** j) for j, c in enumerate(raw)]


def rooted_ratio(T, binom: int, k: int, precision: int) -> mpmath.mpf:
    """exp((ln T - ln binom)/k) at working_dps(precision): the k-th root of
    an exact ratio, with both logarithms taken of exact values."""
    with mpmath.workdps(working_dps(precision)):
        return mpmath.exp((_ln_exact(T) - _ln_big(binom)) / k)


def mean_report(digits, k: int, precision: int = 30) -> MeanReport:
    """Exact symmetric mean S and its k-th root for a digit sequence.

    T is exact; S_root = exp((ln T - ln C(n,k)) / k) with both logarithms
    of exact integers carried at >= precision significant digits.
    """
    seq = _digit_tuple(digits)
    n = len(seq)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    if precision < 15:
        raise ValueError("precision must be >= 15")
    table = MultiplicityTable.from_digits(seq)
    T = esp_multiplicity(table, k)
    binom = math.comb(n, k)
    return MeanReport(n=n, k=k, T=T, binom=binom, S=Fraction(T, binom),
                      S_root=rooted_ratio(T, binom, k, precision),
                      precision=precision)


def _S_exact(table: MultiplicityTable, k: int) -> Fraction:
    return Fraction(esp_multiplicity(table, k), math.comb(table.total, k))


def inverse_mean_report(digits, k: int, precision: int = 30) -> MeanReport:
    """Symmetric mean of the reciprocal digits 1/a_i, exact.

    Every call also re-derives the reflection identity
    S(n, n-k) = S(n, n) * R(n, k) exactly in rational arithmetic, tying the
    rational-digit engine back to the integer-digit engine.
    """
    seq = _digit_tuple(digits)
    n = len(seq)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    if precision < 15:
        raise ValueError("precision must be >= 15")
    table_r = MultiplicityTable.from_digits([Fraction(1, a) for a in seq])
    T = esp_multiplicity(table_r, k)
    binom = math.comb(n, k)
    R = Fraction(T) / binom

    table = MultiplicityTable.from_digits(seq)
    lhs = _S_exact(table, n - k) if k < n else Fraction(1)
    if lhs != _S_exact(table, n) * R:
        raise RuntimeError("inversion identity failed; engine inconsistency")

    root = rooted_ratio(T, binom, k, precision)
    return MeanReport(n=n, k=k, T=T, binom=binom, S=R, S_root=root,
                      precision=precision, R_root=root)


def maclaurin_chain(digits, precision: int = 30) -> list:
    """The full chain S(n,k)^{1/k} for k = 1..n, from one coefficient sweep.

    Non-increasing in k, strictly unless all digits are equal.
    """
    seq = _digit_tuple(digits)
    n = len(seq)
    if n < 1:
        raise ValueError("need at least one digit")
    coeffs = _esp_all(MultiplicityTable.from_digits(seq))
    out = []
    with mpmath.workdps(working_dps(precision)):
        binom = 1
        for k in range(1, n + 1):
            binom = binom * (n - k + 1) // k
            out.append(mpmath.exp((_ln_exact(coeffs[k]) - _ln_big(binom)) / k))
    return out


class NiculescuResult(NamedTuple):
    holds: bool
    lhs: mpmath.mpf
    rhs: mpmath.mpf


def niculescu_check(digits, j: int, k: int, t, precision: int = 30) -> NiculescuResult:
    """Check S(n, tj+(1-t)k) >= S(n,j)^t * S(n,k)^{1-t} for 0 < t < 1.

    The index tj+(1-t)k must be an integer (no ceiling is applied here: the
    hypothesis requires integrality, so a fractional index is an error).
    Pass t as a Fraction for non-dyadic values. For moderate denominators
    the verdict is decided in exact rational arithmetic (S_m^b versus
    S_j^a S_k^{b-a} with t = a/b); otherwise the floating comparison allows
    a margin of 10^(-precision/2).
    """
    seq = _digit_tuple(digits)
    n = len(seq)
    t = Fraction(t)
    if not 0 < t < 1:
        raise ValueError("t must lie strictly between 0 and 1")
    if not (1 <= j <= n and 1 <= k <= n):
        raise ValueError("j, k out of range")
    m_fr = t * j + (1 - t) * k
    if m_fr.denominator != 1:
        raise ValueError(
            f"t*j + (1-t)*k = {m_fr} is not an integer; the interpolation "
            f"index must be integral")
    m = int(m_fr)
    table = MultiplicityTable.from_digits(seq)
    S_m, S_j, S_k = (_S_exact(table, i) for i in (m, j, k))

    a, b = t.numerator, t.denominator
    if b <= 64:
        holds = S_m ** b >= S_j ** a * S_k ** (b - a)
    else:
        holds = None
    with mpmath.workdps(working_dps(precision)):
        lhs = _to_mpf(S_m)
        rhs = mpmath.exp(_to_mpf(t) * _ln_exact(S_j)
                         + _to_mpf(1 - t) * _ln_exact(S_k))
        if holds is None:
            holds = bool(lhs - rhs >= -mpmath.mpf(10) ** (-precision // 2))
    return NiculescuResult(holds, lhs, rhs)


def binom_root(n: int, c, precision: int = 30) -> mpmath.mpf:
    """C(n, ceil(c*n))^(1/ceil(c*n)) as a high-precision float."""
    k = CEIL.index(c, n)
    with mpmath.workdps(working_dps(precision)):
        return mpmath.exp(_ln_big(math.comb(n, k)) / k)


def binom_root_limit(c, precision: int = 30) -> mpmath.mpf:
    """Limit of binom_root(n, c) as n grows: (1-c)^(1-1/c) / c."""
    with mpmath.workdps(working_dps(precision)):
        cc = _to_mpf(Fraction(c))
        return (1 - cc) ** (1 - 1 / cc) / cc
