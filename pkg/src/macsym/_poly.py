"""Internal helpers for truncated products of integer polynomials.

Everything here is exact. Multiplication packs nonnegative coefficient
vectors into single big integers (fixed-width limbs sized so that no column
sum can carry) and lets gmpy2's integer multiplication do the work, which in
turn rides on GMP's subquadratic algorithms. A product tree keeps the
operands balanced when many small factors are combined.
"""

from __future__ import annotations

from typing import Sequence

import gmpy2

__all__ = ["poly_mul_trunc", "poly_prod_trunc", "binom_times_power_row"]


def poly_mul_trunc(A: Sequence[int], B: Sequence[int], kmax: int) -> list:
    """Coefficients 0..kmax of A*B. All inputs must be nonnegative."""
    la, lb = len(A), len(B)
    out_len = min(la + lb - 1, kmax + 1)
    if la == 1:
        return [A[0] * b for b in B[:out_len]]
    if lb == 1:
        return [a * B[0] for a in A[:out_len]]
    # limb width: max product bit length plus room for min(la, lb) summands
    w = (max(a.bit_length() for a in A)
         + max(b.bit_length() for b in B)
         + min(la, lb).bit_length())
    prod = gmpy2.pack([int(a) for a in A], w) * gmpy2.pack([int(b) for b in B], w)
    out = gmpy2.unpack(prod, w)[:out_len]
    if len(out) < out_len:
        # unpack drops high zero limbs
        out.extend([gmpy2.mpz(0)] * (out_len - len(out)))
    return out


def poly_prod_trunc(polys: list, kmax: int) -> list:
    """Truncated product of a list of polynomials via a balanced tree."""
    if not polys:
        return [gmpy2.mpz(1)]
    level = list(polys)
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            nxt.append(poly_mul_trunc(level[i], level[i + 1], kmax))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return list(level[0])


def binom_times_power_row(d: int, m: int, kmax: int) -> list:
    """Coefficients of (1 + d*x)^m truncated at degree kmax, i.e. the row
    C(m, b) * d^b for b = 0..min(m, kmax), built incrementally."""
    top = min(m, kmax)
    row = [gmpy2.mpz(1)] * (top + 1)
    c = gmpy2.mpz(1)
    for b in range(top):
        c = c * (m - b) * d // (b + 1)
        row[b + 1] = c
    return row
