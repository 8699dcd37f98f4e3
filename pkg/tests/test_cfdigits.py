"""Tests for certified continued-fraction digit extraction."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macsym.cfdigits import (
    CacheFormatError,
    DecimalInterval,
    DigitRule,
    DigitSeq,
    PeriodicCF,
    PrecisionExhausted,
    PRESETS,
    Rational,
    RationalTerminated,
    extract_digits,
    parse_alpha,
    read_digit_cache,
    surd_value,
    write_digit_cache,
)


# ---------------------------------------------------------------- parsing

def test_parse_rational_reduces():
    spec = parse_alpha("2/4")
    assert spec == Rational(1, 2)


def test_parse_rational_rejects_values_outside_unit_interval():
    with pytest.raises(ValueError):
        parse_alpha("5/3")
    with pytest.raises(ValueError):
        parse_alpha("0/5")
    with pytest.raises(ValueError):
        parse_alpha("7/7")


def test_parse_periodic_with_preperiod_and_whitespace():
    spec = parse_alpha("cf:[ 3 ; 1 , 2 ]")
    assert spec == PeriodicCF((3,), (1, 2))
    assert parse_alpha("cf:[;2]") == PeriodicCF((), (2,))


def test_parse_decimal_literal_plusminus_forms():
    a = parse_alpha("dec:0.5±1e-3")
    b = parse_alpha("dec:0.5+-1e-3")
    assert isinstance(a, DecimalInterval)
    assert a.lo == b.lo == Fraction(499, 1000)
    assert a.hi == b.hi == Fraction(501, 1000)


def test_parse_decimal_scientific_and_fraction_ulp():
    spec = parse_alpha("dec:4.142e-1±1/5000")
    assert spec.lo == Fraction(4142, 10000) - Fraction(1, 5000)
    assert spec.hi == Fraction(4142, 10000) + Fraction(1, 5000)


def test_parse_decimal_file(tmp_path):
    path = tmp_path / "val.txt"
    path.write_text("0.41421356237309504880168872420969807856967\n")
    spec = parse_alpha(f"dec:{path}±1e-30")
    assert isinstance(spec, DecimalInterval)
    assert spec.label == "val.txt"
    assert extract_digits(spec, 6).digits == (2, 2, 2, 2, 2, 2)


def test_parse_decimal_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0.12x34")
    with pytest.raises(ValueError):
        parse_alpha(f"dec:{path}±1e-3")


@pytest.mark.parametrize("text", [
    "pi", "dec:0.5", "cf:[;]", "cf:[1,2]", "dec:abc±1e-3", "", "1/2/3",
])
def test_parse_rejects_malformed_specs(text):
    with pytest.raises(ValueError):
        parse_alpha(text)


def test_presets_all_parse():
    for name in PRESETS:
        spec = parse_alpha(name)
        assert extract_digits(spec, 5).certified_count == 5


@given(st.integers(1, 10 ** 6), st.integers(2, 10 ** 6))
@settings(max_examples=80, deadline=None)
def test_parse_rational_roundtrip(a, b):
    f = Fraction(a, a + b)
    spec = parse_alpha(f"{a}/{a + b}")
    assert spec == Rational(f.numerator, f.denominator)


# ------------------------------------------------------------ validation

def test_rational_validation():
    with pytest.raises(ValueError):
        Rational(2, 4)
    with pytest.raises(ValueError):
        Rational(3, 2)


def test_periodic_validation():
    with pytest.raises(ValueError):
        PeriodicCF((), ())
    with pytest.raises(ValueError):
        PeriodicCF((0,), (2,))
    with pytest.raises(ValueError):
        PeriodicCF((), (1, 0))


def test_interval_validation():
    with pytest.raises(ValueError):
        DecimalInterval(Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(ValueError):
        DecimalInterval(Fraction(0), Fraction(1, 2))
    with pytest.raises(ValueError):
        DecimalInterval(Fraction(1, 2), Fraction(3, 2))


def test_digitseq_validation():
    spec = Rational(1, 2)
    with pytest.raises(ValueError):
        DigitSeq((1, 2), spec, 3)
    with pytest.raises(ValueError):
        DigitSeq((1, 0), spec, 2)


# ------------------------------------------------------- digit extraction

def test_euclid_matches_independent_reference():
    rnd = random.Random(7)
    for _ in range(300):
        q = rnd.randrange(2, 10 ** 6)
        p = rnd.randrange(1, q)
        f = Fraction(p, q)
        expected = []
        x = Fraction(f.denominator, f.numerator)
        while True:
            d = math.floor(x)
            expected.append(d)
            if x == d:
                break
            x = 1 / (x - d)
        got = extract_digits(Rational(f.numerator, f.denominator),
                             len(expected)).digits
        assert list(got) == expected


def test_rational_terminated_carries_full_expansion():
    with pytest.raises(RationalTerminated) as exc:
        extract_digits(Rational(2, 3), 5)
    assert exc.value.available == 2
    assert exc.value.requested == 5
    assert exc.value.digits == (1, 2)


def test_periodic_unrolls_with_preperiod():
    seq = extract_digits(PeriodicCF((3,), (1, 2)), 6)
    assert seq.digits == (3, 1, 2, 1, 2, 1)


def test_digit_rule_is_one_based():
    seen = []

    def rule(i):
        seen.append(i)
        return i

    extract_digits(DigitRule("idx", rule), 4)
    assert seen == [1, 2, 3, 4]


def test_e2_preset_first_digits():
    seq = extract_digits(parse_alpha("e-2"), 8)
    assert seq.digits == (1, 2, 1, 1, 4, 1, 1, 6)


def test_extract_rejects_nonpositive_n():
    with pytest.raises(ValueError):
        extract_digits(Rational(1, 2), 0)


def test_pi3_first_digits():
    seq = extract_digits(parse_alpha("pi-3"), 10)
    assert seq.digits == (7, 15, 1, 292, 1, 1, 1, 2, 1, 3)


# ------------------------------------------------- certification behavior

def test_interval_extraction_certifies_every_member():
    # digits certified for [lo, hi] must be a common prefix of the digit
    # expansions of both endpoints (checked via narrow sub-intervals)
    lo = Fraction(414, 1000)
    hi = Fraction(415, 1000)
    digits = extract_digits_partial(DecimalInterval(lo, hi))
    for x in (lo + Fraction(1, 10 ** 9), hi - Fraction(1, 10 ** 9)):
        narrow = DecimalInterval(x, x + Fraction(1, 10 ** 30))
        ref = extract_digits(narrow, len(digits) + 2).digits
        assert ref[: len(digits)] == digits


def extract_digits_partial(spec, n=50):
    try:
        return extract_digits(spec, n).digits
    except PrecisionExhausted as exc:
        return exc.digits


def test_widening_enclosure_only_shortens_output():
    base = parse_alpha("pi-3")
    wide = DecimalInterval(base.lo, base.lo + Fraction(1, 10 ** 40))
    narrow = DecimalInterval(base.lo, base.lo + Fraction(1, 10 ** 80))
    with pytest.raises(PrecisionExhausted) as exc_w:
        extract_digits(wide, 200)
    with pytest.raises(PrecisionExhausted) as exc_n:
        extract_digits(narrow, 200)
    got_w, got_n = exc_w.value.digits, exc_n.value.digits
    assert 0 < len(got_w) < len(got_n) < 200
    assert got_n[: len(got_w)] == got_w
    assert exc_w.value.certified == len(got_w)
    assert exc_w.value.requested == 200


def test_digits_per_decimal_matches_typical_rate():
    # about 0.97 continued-fraction digits per decimal digit of input
    spec = parse_alpha("pi-3")
    width = spec.hi - spec.lo
    decimals = round((width.denominator.bit_length()
                      - width.numerator.bit_length()) * math.log10(2))
    with pytest.raises(PrecisionExhausted) as exc:
        extract_digits(spec, decimals + 1000)
    rate = exc.value.certified / decimals
    assert abs(rate - 0.97) < 0.1


def test_roundtrip_through_convergent_interval():
    # rebuild an enclosure from 500 extracted digits and re-extract
    cases = [
        PeriodicCF((), (2,)),
        PeriodicCF((), (1, 2)),
        PeriodicCF((3, 1), (2, 7)),
        parse_alpha("e-2"),
        parse_alpha("pi-3"),
    ]
    n = 500
    for spec in cases:
        digits = extract_digits(spec, n).digits
        p0, q0, p1, q1 = 1, 0, 0, 1  # p: numerators, q: denominators
        for d in digits:
            p0, p1 = p1, d * p1 + p0
            q0, q1 = q1, d * q1 + q0
        conv = Fraction(p1, q1)
        mediant = Fraction(p1 + p0, q1 + q0)
        lo, hi = min(conv, mediant), max(conv, mediant)
        pad = (hi - lo) / 10
        again = extract_digits(DecimalInterval(lo + pad, hi - pad), n)
        assert again.digits == digits


# ------------------------------------------------------------ surd values

def test_surd_single_digit_period():
    s = surd_value(PeriodicCF((), (2,)))
    assert (s.a, s.b, s.c, s.D) == (-1, 1, 1, 2)


def test_surd_two_digit_period():
    s = surd_value(PeriodicCF((), (1, 2)))
    assert (s.a, s.b, s.c, s.D) == (-1, 1, 1, 3)


def test_surd_preperiod_gives_conjugate_form():
    s = surd_value(PeriodicCF((3,), (1, 2)))
    assert (s.a, s.b, s.c, s.D) == (2, -1, 1, 3)


def test_surd_interval_width_and_membership():
    s = surd_value(PeriodicCF((), (2,)))
    iv = s.to_fraction_interval(30)
    assert iv.hi - iv.lo == Fraction(1, 10 ** 30)
    # membership of sqrt(2)-1 certified exactly: (lo+1)^2 < 2 < (hi+1)^2
    assert (iv.lo + 1) ** 2 < 2 < (iv.hi + 1) ** 2


def test_surd_interval_negative_coefficient_branch():
    s = surd_value(PeriodicCF((3,), (1, 2)))
    assert s.b < 0
    iv = s.to_fraction_interval(40)
    assert 0 < iv.lo < iv.hi < 1
    assert extract_digits(iv, 20).digits == (3, 1, 2, 1, 2, 1, 2, 1, 2, 1,
                                             2, 1, 2, 1, 2, 1, 2, 1, 2, 1)


@pytest.mark.parametrize("pre,per", [
    ((), (2,)),
    ((), (1, 2)),
    ((7, 15), (1, 4)),
    ((), (1, 1, 2)),
    ((2,), (5,)),
])
def test_surd_interval_reproduces_periodic_digits(pre, per):
    # 800 decimals covers the worst digit cost here: the (2,),(5,) case
    # burns about 1.43 decimals per digit (convergents grow like 5.19^n)
    spec = PeriodicCF(pre, per)
    expected = extract_digits(spec, 500).digits
    iv = surd_value(spec).to_fraction_interval(800)
    assert extract_digits(iv, 500).digits == expected


# ------------------------------------------------------------- digit cache

def test_cache_roundtrip(tmp_path):
    seq = extract_digits(parse_alpha("pi-3"), 25)
    path = tmp_path / "pi-3.digits"
    write_digit_cache(path, "pi-3", seq)
    label, digits = read_digit_cache(path)
    assert label == "pi-3"
    assert digits == seq.digits
    assert not path.with_suffix(".digits.tmp").exists()


def test_cache_rejects_bad_header(tmp_path):
    path = tmp_path / "c.digits"
    path.write_text("cfdigits v2 pi-3 2\n7\n15\n")
    with pytest.raises(CacheFormatError):
        read_digit_cache(path)


def test_cache_rejects_bad_count_field(tmp_path):
    path = tmp_path / "c.digits"
    path.write_text("cfdigits v1 pi-3 two\n7\n15\n")
    with pytest.raises(CacheFormatError):
        read_digit_cache(path)


def test_cache_rejects_count_mismatch(tmp_path):
    path = tmp_path / "c.digits"
    path.write_text("cfdigits v1 pi-3 3\n7\n15\n")
    with pytest.raises(CacheFormatError):
        read_digit_cache(path)


def test_cache_rejects_bad_digit_line(tmp_path):
    path = tmp_path / "c.digits"
    path.write_text("cfdigits v1 pi-3 2\n7\n0\n")
    with pytest.raises(CacheFormatError):
        read_digit_cache(path)
    path.write_text("cfdigits v1 pi-3 2\n7\n-3\n")
    with pytest.raises(CacheFormatError):
        read_digit_cache(path)


def test_cache_tolerates_blank_lines(tmp_path):
    path = tmp_path / "c.digits"
    path.write_text("cfdigits v1 x 2\n7\n\n15\n")
    assert read_digit_cache(path) == ("x", (7, 15))
