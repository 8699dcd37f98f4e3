"""Monte-Carlo experiments with proxy digit streams.

A digit stream for a uniformly random alpha is generated together with a
binarized proxy stream: at each step the next digit has conditional law
P[digit = d | state theta] with theta the reversed continued fraction of
the digits so far, realized by drawing a uniform Y and solving
(1 + theta) X / (1 + theta X) = Y, whose closed form is
X = Y / (1 + theta (1 - Y)); the digit is floor(1/X). The proxy digit is
beta = 2^ceil(-log2 Y), an i.i.d. power of two with P[beta = 2^l] = 2^-l,
and since theta is in [0,1] the two are coupled within a factor of four:
alpha/2 < beta < 4 alpha at every step, no exceptions.

The band experiment samples i.i.d. binarized digits directly and measures
S(n,k)^{1/k} / log(n/k) across trials; exact binomial tail bounds used in
that analysis are verified by big-rational summation; the heavy-tail block
experiment probes sums of density-1/x^2 variables.

All randomness flows through numpy SeedSequences keyed by (seed, trial), so
trials are reproducible and order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import mpmath
import numpy as np

from .symmeans import MultiplicityTable, esp_multiplicity, rooted_ratio

__all__ = [
    "CoupledStream", "ProxyExperimentReport", "TailCheck", "HeavyTailReport",
    "coupled_digit_stream", "binomial_tail_check", "band_experiment",
    "heavy_tail_block_experiment", "laplace_transform_check",
    "tail_check_grid", "PROXY_CSV_HEADER", "DIGIT_CAP",
]

DIGIT_CAP = 10 ** 9

PROXY_CSV_HEADER = ("trial", "seed", "n", "k", "S_root", "ratio")


@dataclass(frozen=True)
class CoupledStream:
    """One coupled (digit, proxy) run with its consumed uniforms.

    theta is the final reversed-continued-fraction state. restarts counts
    the times a digit above DIGIT_CAP forced theta back to 0 (the digit is
    still emitted; only the exact-rational state is clipped).
    """

    y: tuple
    alpha_digits: tuple
    beta_digits: tuple
    theta: Fraction
    restarts: int = 0

    def __post_init__(self):
        if not (len(self.y) == len(self.alpha_digits) == len(self.beta_digits)):
            raise ValueError("per-step fields must have equal length")
        if not 0 <= self.theta <= 1:
            # theta = 1 exactly is reachable only when the first digit is 1
            # and nothing follows (continuants p = q = 1)
            raise ValueError("theta must lie in [0,1]")
        for a, b in zip(self.alpha_digits, self.beta_digits):
            l = b.bit_length() - 1
            if b != 1 << l or l < 1:
                raise ValueError(f"beta {b} is not 2^l with l >= 1")
            if not a < 2 * b < 8 * a:
                raise ValueError(f"coupling violated: alpha={a}, beta={b}")


def _rng_for(seed, trial: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def coupled_digit_stream(n: int, seed=0,
                         uniforms: Optional[Sequence] = None) -> CoupledStream:
    """Generate n coupled (alpha, beta) digits.

    With `uniforms` given (exact rationals in (0,1)), those drive the
    stream and the seed is ignored; otherwise uniforms are dyadic rationals
    v/2^64 drawn from the (seed, 0) substream. Zero draws are rejected, so
    degenerate Y in {0, 1} never occurs.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng_for(seed, 0) if uniforms is None else None
    ys, alphas, betas = [], [], []
    p, q = 0, 1
    restarts = 0
    for j in range(n):
        if uniforms is not None:
            y = Fraction(uniforms[j])
            if not 0 < y < 1:
                raise ValueError(f"uniform #{j} = {y} outside (0,1)")
            a, b = y.numerator, y.denominator
        else:
            a = 0
            while a == 0:
                a = int(rng.integers(0, 2 ** 64, dtype=np.uint64))
            b = 1 << 64
            y = Fraction(a, b)
        # X = Y/(1 + theta (1 - Y)) with theta = p/q, so
        # 1/X = (q b + p (b - a)) / (a q)
        alpha = (q * b + p * (b - a)) // (a * q)
        beta = 1 << (((b + a - 1) // a) - 1).bit_length()
        ys.append(y)
        alphas.append(alpha)
        betas.append(beta)
        if alpha > DIGIT_CAP:
            p, q = 0, 1
            restarts += 1
        else:
            p, q = q, alpha * q + p
    return CoupledStream(tuple(ys), tuple(alphas), tuple(betas),
                         Fraction(p, q), restarts)


class TailCheck(NamedTuple):
    """Exact binomial tail against one closed-form bound."""
    form: str
    tail: Fraction
    bound: float
    holds: bool


def _binom_tail(n: int, lam: Fraction, lo: int, hi: int) -> Fraction:
    # integer accumulation over the common denominator q^n; one gcd at the
    # end instead of one per term
    lam = Fraction(lam)
    a, q = lam.numerator, lam.denominator
    c, pa, pb = math.comb(n, lo), a ** lo, (q - a) ** (n - lo)
    num = 0
    for j in range(lo, hi + 1):
        num += c * pa * pb
        if j < hi:
            c = c * (n - j) // (j + 1)
            pa *= a
            pb //= q - a
    return Fraction(num, q ** n)


def _iv_of_fraction(f: Fraction):
    return mpmath.iv.mpf(f.numerator) / mpmath.iv.mpf(f.denominator)


def binomial_tail_check(n: int, m: int, s: int, lam, form: str = "upper",
                        tau=None) -> TailCheck:
    """Exact Bin(n, lam) tail versus the matching closed-form bound.

    form="upper":  P[B >= m+s] <= n * exp(1 - s^2 / (2 n (1-lam))),
                   needs m,s >= 1, m+s <= n, 0 < lam <= 1/2, lam*n <= m.
    form="lower":  P[B <= m-s] <= n * exp((s - s^2) / (2 lam n)),
                   needs m-s >= 1, 0 < lam <= 1/2, lam*n >= m.
    form="geometric": P[B >= m] < tau^-m (1 + lam (tau - 1))^n for tau > 1
                   and m >= lam*n; here everything is rational, s unused.

    Hypothesis violations raise ValueError naming the failed constraint.
    The upper/lower comparisons are decided in interval arithmetic, so
    `holds` is certified, not a float coincidence.
    """
    lam = Fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("hypothesis failed: lambda must lie in (0,1)")
    if form == "geometric":
        if tau is None:
            raise ValueError("geometric form needs tau")
        tau = Fraction(tau)
        if tau <= 1:
            raise ValueError("hypothesis failed: tau > 1 required")
        if m < lam * n:
            raise ValueError("hypothesis failed: m >= lambda*n required")
        tail = _binom_tail(n, lam, m, n)
        bound = tau ** (-m) * (1 + lam * (tau - 1)) ** n
        return TailCheck(form, tail, float(bound), tail < bound)

    if min(n, m, s) < 1:
        raise ValueError("hypothesis failed: n, m, s must be positive")
    if lam > Fraction(1, 2):
        raise ValueError("hypothesis failed: lambda <= 1/2 required")
    if form == "upper":
        if m + s > n:
            raise ValueError("hypothesis failed: m + s <= n required")
        if lam * n > m:
            raise ValueError("hypothesis failed: lambda*n <= m required")
        tail = _binom_tail(n, lam, m + s, n)
        expo = 1 - Fraction(s * s, 2 * n) / (1 - lam)
    elif form == "lower":
        if m - s < 1:
            raise ValueError("hypothesis failed: m - s >= 1 required")
        if lam * n < m:
            raise ValueError("hypothesis failed: lambda*n >= m required")
        tail = _binom_tail(n, lam, 0, m - s)
        expo = Fraction(s, 2 * n) / lam - Fraction(s * s, 2 * n) / lam
    else:
        raise ValueError(f"unknown form {form!r}")

    old = mpmath.iv.dps
    mpmath.iv.dps = 40
    try:
        bound_iv = n * mpmath.iv.exp(_iv_of_fraction(expo))
        tail_iv = _iv_of_fraction(tail)
        holds = tail_iv.b < bound_iv.a
        bound = float(mpmath.mpf(bound_iv.mid))
    finally:
        mpmath.iv.dps = old
    return TailCheck(form, tail, bound, bool(holds))


def tail_check_grid() -> list:
    """Every closed-form tail bound exercised across n in {32..4096} and
    lambda in {2^-1..2^-8}: a few hundred exact rational comparisons.
    Returns the individual TailCheck results (all expected to hold)."""
    checks = []
    for e in range(5, 13):
        n = 2 ** e
        for le in range(1, 9):
            lam = Fraction(1, 2 ** le)
            m_up = math.ceil(lam * n)
            for s in (1, math.isqrt(n), n // 4):
                if s >= 1 and m_up + s <= n:
                    checks.append(binomial_tail_check(n, m_up, s, lam, "upper"))
            m_lo = math.floor(lam * n)
            for s in (1, m_lo // 2, m_lo - 1):
                if s >= 1 and m_lo - s >= 1:
                    checks.append(binomial_tail_check(n, m_lo, s, lam, "lower"))
            m_geo = math.ceil(2 * lam * n)
            for tau in (Fraction(3, 2), Fraction(2), Fraction(4)):
                if m_geo >= lam * n:
                    checks.append(binomial_tail_check(n, m_geo, 0, lam,
                                                      "geometric", tau=tau))
    return checks


@dataclass(frozen=True)
class ProxyExperimentReport:
    """Empirical band for S(n,k)^{1/k} / log(n/k) over Monte-Carlo trials."""

    n: int
    k: int
    trials: int
    seed: int
    ratios: tuple
    s_roots: tuple
    c1_hat: float
    c2_hat: float
    failures: int

    def __post_init__(self):
        if len(self.ratios) + self.failures != self.trials:
            raise ValueError("ratios + failures must account for all trials")
        if len(self.ratios) != len(self.s_roots):
            raise ValueError("need one S_root per ratio")
        if self.ratios and not self.c1_hat <= self.c2_hat:
            raise ValueError("c1_hat must not exceed c2_hat")

    def csv_rows(self):
        """Rows matching PROXY_CSV_HEADER, one per trial kept."""
        return [(t, self.seed, self.n, self.k, sr, r)
                for t, (sr, r) in enumerate(zip(self.s_roots, self.ratios))]


def _binarized_table(rng: np.random.Generator, n: int) -> MultiplicityTable:
    ls = rng.geometric(0.5, size=n)
    counts = np.bincount(ls)
    entries = [(1 << l, int(c)) for l, c in reversed(list(enumerate(counts)))
               if l >= 1 and c > 0]
    return MultiplicityTable(tuple(entries), n)


def band_experiment(n: int, k: int, trials: int, seed: int = 0,
                    precision: int = 30, r_guess: int = 8) -> ProxyExperimentReport:
    """Sample i.i.d. binarized digits (2^l with probability 2^-l) and
    record S(n,k)^{1/k} / log(n/k) per trial.

    The admissible window is n^{3/4} <= k <= n/r_guess (checked exactly:
    k^4 >= n^3 on the left). Each trial draws from its own (seed, trial)
    substream, so results do not depend on execution order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if k ** 4 < n ** 3 or k * r_guess > n:
        raise ValueError(
            f"k={k} outside [n^(3/4), n/{r_guess}] = "
            f"[{n ** 0.75:.1f}, {n / r_guess:.1f}] for n={n}")
    log_ratio = math.log(n / k)
    ratios, s_roots = [], []
    for t in range(trials):
        table = _binarized_table(_rng_for(seed, t), n)
        T = esp_multiplicity(table, k)
        s_root = float(rooted_ratio(T, math.comb(n, k), k, precision))
        s_roots.append(s_root)
        ratios.append(s_root / log_ratio)
    return ProxyExperimentReport(
        n=n, k=k, trials=trials, seed=seed, ratios=tuple(ratios),
        s_roots=tuple(s_roots), c1_hat=min(ratios), c2_hat=max(ratios),
        failures=0)


def laplace_transform_check(grid=None, precision: int = 30):
    """Verify F(s) = int_1^inf x^-2 e^{-sx} dx < exp(s log s) on (0,1).

    F is evaluated two independent ways (adaptive quadrature, and the
    closed form e^{-s} - s E1(s)); both must agree and sit below the bound.
    Returns a list of (s, F, bound, ok).
    """
    if grid is None:
        grid = [Fraction(i, 10) for i in range(1, 10)]
    out = []
    with mpmath.workdps(max(30, precision)):
        for s in grid:
            ss = mpmath.mpf(Fraction(s).numerator) / Fraction(s).denominator
            quad = mpmath.quad(lambda x: mpmath.exp(-ss * x) / x ** 2,
                               [1, mpmath.inf])
            closed = mpmath.exp(-ss) - ss * mpmath.e1(ss)
            if abs(quad - closed) > mpmath.mpf(10) ** (-precision // 2):
                raise RuntimeError(
                    f"quadrature and closed form disagree at s={float(ss)}")
            bound = mpmath.exp(ss * mpmath.log(ss))
            out.append((float(ss), float(closed), float(bound),
                        bool(closed < bound)))
    return out


@dataclass(frozen=True)
class HeavyTailReport:
    """Block sums of density-1/x^2 digits versus the shortfall bound."""

    r: int
    blocks: int
    seed: int
    threshold: float
    shortfall_prob: float
    bound: float
    min_block_sum: float
    laplace_points: tuple

    @property
    def laplace_ok(self) -> bool:
        return all(ok for *_, ok in self.laplace_points)


def heavy_tail_block_experiment(r: int, blocks: int, seed: int = 0) -> HeavyTailReport:
    """Sample blocks of r heavy-tailed values x = 1/(1-Y) (density 1/x^2 on
    [1, inf)) and measure how often the block sum U falls below
    r log r - K r with K = 1 + 2 log log r, against the bound exp(-log^2 r).
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    K = 1.0 + 2.0 * math.log(math.log(r))
    threshold = r * math.log(r) - K * r
    rng = _rng_for(seed, 0)
    short = 0
    min_sum = math.inf
    chunk = max(1, min(blocks, 2_000_000 // r))
    done = 0
    while done < blocks:
        b = min(chunk, blocks - done)
        y = rng.random((b, r))
        sums = (1.0 / (1.0 - y)).sum(axis=1)
        short += int(np.count_nonzero(sums <= threshold))
        min_sum = min(min_sum, float(sums.min()))
        done += b
    return HeavyTailReport(
        r=r, blocks=blocks, seed=seed, threshold=threshold,
        shortfall_prob=short / blocks, bound=math.exp(-math.log(r) ** 2),
        min_block_sum=min_sum, laplace_points=tuple(laplace_transform_check()))
