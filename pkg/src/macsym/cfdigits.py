"""Certified continued-fraction digit sequences.

A real alpha in (0,1) is described either symbolically (exact rational,
eventually periodic digit pattern, closed-form digit rule) or by an exact
rational enclosure [lo, hi] of its decimal expansion. Digit extraction is
certified: every digit returned is provably the digit of *every* real inside
the enclosure, so widening the input can only shorten the output, never
corrupt it.

Rule of thumb for sizing enclosures: budget about 1.2 decimal digits of the
input expansion per continued-fraction digit requested. Extraction fails
loudly (with the certified count) instead of guessing.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence, Union

import gmpy2

__all__ = [
    "AlphaSpec", "Rational", "PeriodicCF", "DecimalInterval", "DigitRule",
    "DigitSeq", "SurdValue", "PrecisionExhausted", "RationalTerminated",
    "CacheFormatError", "parse_alpha", "extract_digits", "surd_value",
    "read_digit_cache", "write_digit_cache", "PRESETS",
]


class PrecisionExhausted(Exception):
    """The enclosure became too wide to certify the next digit.

    Carries the digits that *were* certified so callers can keep them.
    """

    def __init__(self, certified: int, requested: int, digits: tuple[int, ...]):
        self.certified = certified
        self.requested = requested
        self.digits = digits
        super().__init__(
            f"certified only {certified} of {requested} requested digits "
            f"before the interval endpoints disagreed")


class RationalTerminated(Exception):
    """A rational alpha has a finite expansion shorter than requested."""

    def __init__(self, available: int, requested: int, digits: tuple[int, ...]):
        self.available = available
        self.requested = requested
        self.digits = digits
        super().__init__(
            f"rational alpha has only {available} digits, {requested} requested")


class CacheFormatError(ValueError):
    """A digit cache file failed header or payload validation."""


@dataclass(frozen=True)
class Rational:
    """alpha = p/q in lowest terms, 0 < p < q."""

    p: int
    q: int

    def __post_init__(self):
        if self.q <= 0 or not 0 < self.p < self.q:
            raise ValueError(f"rational {self.p}/{self.q} not in (0,1)")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"rational {self.p}/{self.q} not in lowest terms")


@dataclass(frozen=True)
class PeriodicCF:
    """Eventually periodic digit pattern: preperiod digits, then the period
    repeated forever."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise ValueError("period must be nonempty")
        if any(d < 1 for d in self.preperiod + self.period):
            raise ValueError("all digits must be >= 1")


@dataclass(frozen=True)
class DecimalInterval:
    """Exact rational enclosure 0 < lo < hi < 1 of alpha."""

    lo: Fraction
    hi: Fraction
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not (0 < self.lo < self.hi < 1):
            raise ValueError("interval must satisfy 0 < lo < hi < 1")


@dataclass(frozen=True)
class DigitRule:
    """Digits given by a closed-form rule index -> digit (1-based index)."""

    label: str
    rule: Callable[[int], int]


AlphaSpec = Union[Rational, PeriodicCF, DecimalInterval, DigitRule]


@dataclass(frozen=True)
class DigitSeq:
    """A certified run of continued-fraction digits with its provenance."""

    digits: tuple[int, ...]
    source: AlphaSpec
    certified_count: int

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(self.digits))
        if self.certified_count != len(self.digits):
            raise ValueError("certified_count must equal len(digits)")
        if any(d < 1 for d in self.digits):
            raise ValueError("digits must be positive integers")

    def __len__(self):
        return len(self.digits)


@dataclass(frozen=True)
class SurdValue:
    """Exact quadratic irrational (a + b*sqrt(D))/c with D squarefree
    (squarefree up to the trial-division bound), c > 0, gcd(a,b,c) = 1."""

    a: int
    b: int
    c: int
    D: int

    def to_fraction_interval(self, decimals: int, label: str = "") -> DecimalInterval:
        """Exact rational enclosure of width 1/(c*10^decimals)."""
        scale = 10 ** decimals
        s = int(gmpy2.isqrt(self.b * self.b * self.D * scale * scale))
        if self.b >= 0:
            t_lo, t_hi = s, s + 1
        else:
            t_lo, t_hi = -s - 1, -s
        lo = Fraction(self.a * scale + t_lo, self.c * scale)
        hi = Fraction(self.a * scale + t_hi, self.c * scale)
        return DecimalInterval(lo, hi, label=label)


def _int_from_digits(s: str) -> int:
    # chunked to dodge the CPython int<->str conversion length guard
    v = 0
    for i in range(0, len(s), 4000):
        chunk = s[i:i + 4000]
        v = v * 10 ** len(chunk) + int(chunk)
    return v


def _read_decimal_file(path: Path) -> tuple[Fraction, int]:
    """Parse a plain-text decimal expansion: optional leading '0.',
    whitespace ignored. Returns (value as Fraction, digit count)."""
    text = path.read_text()
    text = "".join(text.split())
    if text.startswith("0."):
        text = text[2:]
    elif text.startswith("."):
        text = text[1:]
    if not text or not text.isdigit():
        raise ValueError(f"{path}: expected only decimal digits after '0.'")
    n = len(text)
    return Fraction(_int_from_digits(text), 10 ** n), n


def _data_dir() -> Path:
    override = os.environ.get("MACSYM_DATA_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("macsym").joinpath("data")))


def _e2_rule(i: int) -> int:
    # digits 1,2,1,1,4,1,1,6,...: every third digit (i = 2, 5, 8, ...)
    # is 2(i+1)/3, all others are 1
    return 2 * (i + 1) // 3 if i % 3 == 2 else 1


def _preset(name: str) -> AlphaSpec:
    if name == "sqrt2-1":
        return PeriodicCF((), (2,))
    if name == "sqrt3-1":
        return PeriodicCF((), (1, 2))
    if name == "e-2":
        return DigitRule("e-2", _e2_rule)
    if name in ("pi-3", "gamma", "sin1"):
        path = _data_dir() / f"{name}.txt"
        if not path.is_file():
            raise FileNotFoundError(f"bundled data file missing: {path}")
        value, ndig = _read_decimal_file(path)
        # expansions are truncations, so alpha lies in [v, v + 10^-ndig]
        return DecimalInterval(value, value + Fraction(1, 10 ** ndig), label=name)
    raise ValueError(f"unknown preset {name!r}")


PRESETS = ("pi-3", "gamma", "sin1", "e-2", "sqrt2-1", "sqrt3-1")

_CF_RE = re.compile(r"^cf:\[([0-9,\s]*);([0-9,\s]+)\]$")
_RAT_RE = re.compile(r"^(\d+)\s*/\s*(\d+)$")
_DEC_RE = re.compile(r"^dec:(.+?)(?:±|\+-)(\S+)$")


def parse_alpha(text: str) -> AlphaSpec:
    """Parse a specification string into an AlphaSpec.

    Grammar: "p/q" | "cf:[pre;per]" | "dec:<file or literal>±<ulp>" |
    one of the presets pi-3, gamma, sin1, e-2, sqrt2-1, sqrt3-1.
    """
    text = text.strip()
    if text in PRESETS:
        return _preset(text)
    m = _RAT_RE.match(text)
    if m:
        f = Fraction(int(m.group(1)), int(m.group(2)))
        return Rational(f.numerator, f.denominator)
    m = _CF_RE.match(text)
    if m:
        pre = tuple(int(t) for t in m.group(1).replace(" ", "").split(",") if t)
        per = tuple(int(t) for t in m.group(2).replace(" ", "").split(",") if t)
        return PeriodicCF(pre, per)
    m = _DEC_RE.match(text)
    if m:
        body, ulp_text = m.group(1).strip(), m.group(2)
        ulp = Fraction(ulp_text) if "/" in ulp_text else _fraction_from_decimal(ulp_text)
        path = Path(body)
        if path.is_file():
            value, _ = _read_decimal_file(path)
            label = path.name
        else:
            value = _fraction_from_decimal(body)
            label = body
        return DecimalInterval(value - ulp, value + ulp, label=label)
    raise ValueError(f"unrecognized alpha specification {text!r}")


def _fraction_from_decimal(text: str) -> Fraction:
    """Exact Fraction from a decimal/scientific literal without float round."""
    m = re.match(r"^([0-9]*)(?:\.([0-9]*))?(?:[eE]([+-]?\d+))?$", text)
    if not m or (not m.group(1) and not m.group(2)):
        raise ValueError(f"malformed decimal literal {text!r}")
    whole = m.group(1) or "0"
    frac = m.group(2) or ""
    expo = int(m.group(3) or 0)
    v = Fraction(_int_from_digits(whole + frac) if (whole + frac) else 0,
                 10 ** len(frac))
    return v * Fraction(10) ** expo


def _euclid_digits(p: int, q: int) -> list[int]:
    digits = []
    while p:
        d = q // p
        digits.append(d)
        p, q = q - d * p, p
    return digits


def _interval_digits(lo: Fraction, hi: Fraction, n: int) -> tuple[list[int], bool]:
    """Digits certified for every x in [lo, hi]. Second item: True when n
    digits were produced, False when the endpoints disagreed first."""
    lo_p, lo_q = lo.numerator, lo.denominator
    hi_p, hi_q = hi.numerator, hi.denominator
    digits: list[int] = []
    while len(digits) < n:
        if lo_p <= 0 or hi_p <= 0:
            return digits, False
        d_hi = hi_q // hi_p
        d_lo = lo_q // lo_p
        if d_hi != d_lo:
            return digits, False
        digits.append(d_hi)
        # x -> 1/x - d maps [lo, hi] onto [1/hi - d, 1/lo - d]: endpoints swap
        lo_p, lo_q, hi_p, hi_q = hi_q - d_hi * hi_p, hi_p, lo_q - d_hi * lo_p, lo_p
    return digits, True


def extract_digits(alpha: AlphaSpec, n: int) -> DigitSeq:
    """First n continued-fraction digits of alpha, each certified exact.

    Raises PrecisionExhausted when a DecimalInterval is too wide to pin down
    all n digits, and RationalTerminated when a Rational alpha has a finite
    expansion shorter than n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(alpha, Rational):
        digits = _euclid_digits(alpha.p, alpha.q)
        if len(digits) < n:
            raise RationalTerminated(len(digits), n, tuple(digits))
        return DigitSeq(tuple(digits[:n]), alpha, n)
    if isinstance(alpha, PeriodicCF):
        digits = list(alpha.preperiod)
        while len(digits) < n:
            digits.extend(alpha.period)
        return DigitSeq(tuple(digits[:n]), alpha, n)
    if isinstance(alpha, DigitRule):
        digits = tuple(alpha.rule(i) for i in range(1, n + 1))
        return DigitSeq(digits, alpha, n)
    if isinstance(alpha, DecimalInterval):
        digits, complete = _interval_digits(alpha.lo, alpha.hi, n)
        if not complete:
            raise PrecisionExhausted(len(digits), n, tuple(digits))
        return DigitSeq(tuple(digits), alpha, n)
    raise TypeError(f"not an AlphaSpec: {alpha!r}")


def _squarefree_split(n: int, bound: int = 100000) -> tuple[int, int]:
    """n = f*f*d with d squarefree up to the trial bound. Square factors
    with a prime divisor above the bound are left inside d."""
    f, d, m = 1, 1, n
    for p in range(2, bound):
        if p * p > m:
            break
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        f *= p ** (e // 2)
        if e % 2:
            d *= p
    if m > 1:
        if gmpy2.is_square(m):
            f *= int(gmpy2.isqrt(m))
        else:
            d *= m
    return f, d


def _surd_is_between_0_and_1(a: int, b: int, c: int, D: int) -> bool:
    # sign of a + b*sqrt(D) by integer comparison of squares
    def positive(a_: int, b_: int) -> bool:
        if b_ >= 0:
            return a_ > 0 or b_ > 0 if a_ >= 0 else b_ * b_ * D > a_ * a_
        return a_ > 0 and a_ * a_ > b_ * b_ * D
    return positive(a, b) and positive(c - a, -b)


def surd_value(spec: PeriodicCF) -> SurdValue:
    """Exact value of an eventually periodic digit pattern.

    One period induces the Moebius fixed point x = (P x + Q)/(R x + S); the
    positive root of R x^2 + (S - P) x - Q is normalized to (a + b sqrt D)/c
    and the preperiod is then applied by an exact Moebius transformation.
    """
    p, q, r, s = 1, 0, 0, 1
    for d in spec.period:
        p, q, r, s = q, p + q * d, s, r + s * d
    disc = (s - p) ** 2 + 4 * q * r
    f, D = _squarefree_split(disc)
    a, b, c = p - s, f, 2 * r
    g = math.gcd(math.gcd(a, b), c)
    a, b, c = a // g, b // g, c // g
    if c < 0:
        a, b, c = -a, -b, -c

    if spec.preperiod:
        n00, n01, n10, n11 = 1, 0, 0, 1
        for d in spec.preperiod:
            n00, n01, n10, n11 = n01, n00 + n01 * d, n11, n10 + n11 * d
        # x = (n00 y + n01)/(n10 y + n11) with y = (a + b sqrt D)/c
        pp, qq = n00 * a + n01 * c, n00 * b
        ss, tt = n10 * a + n11 * c, n10 * b
        den = ss * ss - tt * tt * D
        a, b, c = pp * ss - qq * tt * D, qq * ss - pp * tt, den
        g = math.gcd(math.gcd(a, b), c)
        a, b, c = a // g, b // g, c // g
        if c < 0:
            a, b, c = -a, -b, -c

    if not _surd_is_between_0_and_1(a, b, c, D):
        raise RuntimeError(
            f"internal error: surd ({a}+{b}*sqrt({D}))/{c} not in (0,1)")
    return SurdValue(a, b, c, D)


_CACHE_MAGIC = "cfdigits v1"


def write_digit_cache(path, label: str, seq: DigitSeq) -> None:
    """Write the one-digit-per-line cache format (atomic rename)."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(f"{_CACHE_MAGIC} {label} {len(seq.digits)}\n")
        for d in seq.digits:
            fh.write(f"{d}\n")
    os.replace(tmp, path)


def read_digit_cache(path) -> tuple[str, tuple[int, ...]]:
    """Read and validate a digit cache file; returns (label, digits)."""
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split()
        if len(parts) != 4 or " ".join(parts[:2]) != _CACHE_MAGIC:
            raise CacheFormatError(f"{path}: bad cache header {header!r}")
        label, n_text = parts[2], parts[3]
        try:
            n = int(n_text)
        except ValueError:
            raise CacheFormatError(f"{path}: bad digit count {n_text!r}") from None
        digits = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if not line.isdigit() or int(line) < 1:
                raise CacheFormatError(f"{path}: bad digit line {line!r}")
            digits.append(int(line))
    if len(digits) != n:
        raise CacheFormatError(
            f"{path}: header promises {n} digits, found {len(digits)}")
    return label, tuple(digits)
