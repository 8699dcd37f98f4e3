"""Command line front end for digit means, constants, and experiments.

Twelve subcommands: digits, mean, chain, scan-c, scan-n, periodic, xd,
constants, simulate, tails, bench, fit. Tabular output goes to stdout or,
with --out, to a file written atomically (temp + rename). Exit codes:
0 success, 2 usage error, 3 precision/digit-supply error, 4 data error.
Errors are one line on stderr: "error <code> <message>".
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import mpmath

from .cfdigits import (CacheFormatError, DigitSeq, PeriodicCF,
                       PrecisionExhausted, RationalTerminated, extract_digits,
                       parse_alpha, read_digit_cache, surd_value,
                       write_digit_cache)
from .constants import (gauss_kuzmin_pmf, holder_kp, khinchin_k0,
                        limsup_upper_bound, limsup_upper_bound_baby)
from .periodic import PeriodicSeq, f_periodic, xd_sequence
from .proxysim import (PROXY_CSV_HEADER, band_experiment, binomial_tail_check,
                       coupled_digit_stream, heavy_tail_block_experiment,
                       tail_check_grid)
from .symmeans import (CEIL, MultiplicityTable, esp_multiplicity, esp_prefix,
                       inverse_mean_report, maclaurin_chain, mean_report)

__all__ = ["RunConfig", "run", "cache_digits", "main"]

DEFAULT_SCAN_N = (600, 800, 1000)
DEFAULT_SCAN_C = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
DEFAULT_PERIODS = ("1,2", "1,4", "2,3", "1,2,3", "1,1,2", "2,2,5")


@dataclass
class RunConfig:
    """One resolved invocation: the command plus its validated inputs."""

    command: str
    alpha: Optional[str] = None
    n: Optional[int] = None
    k: Optional[int] = None
    c: Optional[list] = None
    precision: int = 15
    seed: int = 0
    out: Optional[str] = None
    format: str = "csv"
    options: dict = field(default_factory=dict)


_REQUIRED = {
    "digits": ("alpha", "n"),
    "mean": ("alpha", "n", "k"),
    "chain": ("alpha", "n"),
    "scan-c": ("alpha",),
    "scan-n": ("alpha", "n"),
    "periodic": (),
    "xd": (),
    "constants": (),
    "simulate": (),
    "tails": (),
    "bench": ("alpha", "n", "k"),
    "fit": (),
}


def _fmt(v, precision: int) -> str:
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    return mpmath.nstr(mpmath.mpf(v), precision, strip_zeros=False)


def _atomic_write(path: str, text: str) -> None:
    p = Path(path)
    tmp = p.with_suffix(p.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, p)


def _emit(rows, header, config: RunConfig) -> None:
    delim = "\t" if config.format == "tsv" else ","
    lines = [delim.join(header)]
    lines += [delim.join(_fmt(v, config.precision) for v in row)
              for row in rows]
    text = "\n".join(lines) + "\n"
    if config.out:
        _atomic_write(config.out, text)
    else:
        sys.stdout.write(text)


def read_rows(path, fmt: str = "csv") -> tuple[list, list]:
    """Re-parse a table this tool emitted; returns (header, rows of str)."""
    delim = "\t" if fmt == "tsv" else ","
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise CacheFormatError(f"{path}: empty table")
    header = lines[0].split(delim)
    rows = [line.split(delim) for line in lines[1:] if line]
    if any(len(r) != len(header) for r in rows):
        raise CacheFormatError(f"{path}: ragged rows")
    return header, rows


def cache_digits(alpha: str, n: int, path) -> DigitSeq:
    """Extract n digits of alpha, reusing `path` as a validated cache.

    A cache whose label matches and which holds at least n digits is
    trusted after header and length validation; anything else is
    regenerated and rewritten atomically.
    """
    spec = parse_alpha(alpha)
    label = alpha.replace(" ", "")
    path = Path(path)
    if path.exists():
        cached_label, digits = read_digit_cache(path)
        if cached_label == label and len(digits) >= n:
            return DigitSeq(digits[:n], spec, n)
    seq = extract_digits(spec, n)
    write_digit_cache(path, label, seq)
    return seq


def _digits_for(config: RunConfig, n: int) -> DigitSeq:
    cache = config.options.get("cache")
    if cache:
        return cache_digits(config.alpha, n, cache)
    return extract_digits(parse_alpha(config.alpha), n)


def _parse_c_list(text: str) -> list:
    return [Fraction(tok) for tok in text.split(",") if tok]


def _gnuplot(config: RunConfig, title: str, xlabel: str, ylabel: str,
             using: str) -> None:
    if not config.options.get("gnuplot"):
        return
    if not config.out:
        raise ValueError("--gnuplot requires --out")
    sep = "\\t" if config.format == "tsv" else ","
    script = "\n".join([
        f'set datafile separator "{sep}"',
        f'set title "{title}"',
        f'set xlabel "{xlabel}"',
        f'set ylabel "{ylabel}"',
        "set key autotitle columnhead",
        f"plot '{config.out}' using {using} with linespoints",
        "pause -1",
    ]) + "\n"
    _atomic_write(config.out + ".gp", script)


def _cmd_digits(config: RunConfig) -> int:
    seq = (_digits_for(config, config.n) if config.options.get("cache")
           else extract_digits(parse_alpha(config.alpha), config.n))
    if config.out:
        write_digit_cache(config.out, config.alpha.replace(" ", ""), seq)
    else:
        print(",".join(str(d) for d in seq.digits))
    return 0


def _cmd_mean(config: RunConfig) -> int:
    seq = _digits_for(config, config.n)
    fn = inverse_mean_report if config.options.get("inverse") else mean_report
    report = fn(seq, config.k, precision=config.precision)
    print(mpmath.nstr(report.S_root, config.precision))
    return 0


def _cmd_chain(config: RunConfig) -> int:
    seq = _digits_for(config, config.n)
    chain = maclaurin_chain(seq, precision=config.precision)
    if config.out:
        _emit([(k, v) for k, v in enumerate(chain, start=1)],
              ("k", "S_root"), config)
    else:
        print(", ".join(mpmath.nstr(v, config.precision) for v in chain))
    return 0


def _cmd_scan_c(config: RunConfig) -> int:
    ns = config.options.get("n_list") or list(DEFAULT_SCAN_N)
    seq = _digits_for(config, max(ns))
    rows = []
    for n in ns:
        chain = maclaurin_chain(seq.digits[:n], precision=config.precision)
        rows += [(n, k, Fraction(k, n), v)
                 for k, v in enumerate(chain, start=1)]
    _emit(rows, ("n", "k", "c", "S_root"), config)
    _gnuplot(config, "S(alpha,n,k)^(1/k) against k/n", "c = k/n", "S_root",
             "3:4")
    return 0


def _cmd_scan_n(config: RunConfig) -> int:
    cs = config.c or list(DEFAULT_SCAN_C)
    step = config.options.get("step") or max(1, config.n // 40)
    seq = _digits_for(config, config.n)
    rows = []
    for n in range(step, config.n + 1, step):
        for c in cs:
            k = CEIL.index(c, n)
            report = mean_report(seq.digits[:n], k, precision=config.precision)
            rows.append((n, c, k, report.S_root))
    _emit(rows, ("n", "c", "k", "S_root"), config)
    _gnuplot(config, "S(alpha,n,cn)^(1/cn) against n", "n", "S_root", "1:4")
    return 0


def _cmd_periodic(config: RunConfig) -> int:
    seq_texts = config.options.get("x_list") or list(DEFAULT_PERIODS)
    kmax = config.options.get("kmax") or 8
    cs = config.c or [Fraction(0), Fraction(1, 4), Fraction(1, 3),
                      Fraction(1, 2), Fraction(2, 3), Fraction(3, 4),
                      Fraction(1)]
    rows = []
    for text in seq_texts:
        X = PeriodicSeq(tuple(Fraction(t) for t in text.split(",")))
        for k in range(1, kmax + 1):
            for c in cs:
                fv = f_periodic(X, k, c, precision=config.precision)
                rows.append((text.replace(",", ";"), k, c, fv.value))
    _emit(rows, ("sequence", "k", "c", "F"), config)
    _gnuplot(config, "F_X(k,c)", "k", "F", "2:4")
    return 0


def _cmd_xd(config: RunConfig) -> int:
    d = config.options.get("d") or 2
    X = xd_sequence(d)
    surd = surd_value(PeriodicCF((), X.period))
    with mpmath.workdps(max(30, config.precision + 10)):
        value = (surd.a + surd.b * mpmath.sqrt(surd.D)) / surd.c
        print(mpmath.nstr(value, max(config.precision, 12)))
    counts = MultiplicityTable.from_digits(X.period).entries
    print("period", len(X.period),
          " ".join(f"{dig}x{m}" for dig, m in counts))
    print(f"surd ({surd.a}+{surd.b}*sqrt({surd.D}))/{surd.c}")
    return 0


def _cmd_constants(config: RunConfig) -> int:
    tol = config.options.get("tol") or 1e-10
    decimals = max(1, round(-math.log10(tol)))
    if not any(config.options.get(key) is not None and
               config.options.get(key) is not False
               for key in ("k0", "kp", "gk", "limsup")):
        raise ValueError("constants needs one of --k0 --kp --gk --limsup")
    if config.options.get("k0"):
        print(f"{float(khinchin_k0(tol).value):.{decimals}f}")
    if config.options.get("kp") is not None:
        print(f"{float(holder_kp(config.options['kp'], tol).value):.{decimals}f}")
    if config.options.get("gk") is not None:
        print(f"{gauss_kuzmin_pmf(config.options['gk']).value:.{decimals}f}")
    if config.options.get("limsup") is not None:
        c = config.options["limsup"]
        print(f"{limsup_upper_bound(c):.{decimals}f} "
              f"{limsup_upper_bound_baby(c):.{decimals}f}")
    return 0


def _cmd_simulate(config: RunConfig) -> int:
    mode = config.options.get("mode") or "band"
    if mode == "band":
        report = band_experiment(config.n or 4096, config.k or 512,
                                 config.options.get("trials") or 100,
                                 seed=config.seed, precision=config.precision)
        if config.out:
            _emit(report.csv_rows(), PROXY_CSV_HEADER, config)
        print(f"n={report.n} k={report.k} trials={report.trials} "
              f"seed={report.seed} c1_hat={report.c1_hat:.6f} "
              f"c2_hat={report.c2_hat:.6f} failures={report.failures}")
        return 0
    if mode == "coupled":
        stream = coupled_digit_stream(config.n or 1000, seed=config.seed)
        if config.out:
            rows = [(j, a, b) for j, (a, b) in enumerate(
                zip(stream.alpha_digits, stream.beta_digits))]
            _emit(rows, ("j", "alpha", "beta"), config)
        shown = min(len(stream.alpha_digits), 20)
        print("alpha", ",".join(map(str, stream.alpha_digits[:shown])))
        print("beta", ",".join(map(str, stream.beta_digits[:shown])))
        print(f"n={len(stream.alpha_digits)} restarts={stream.restarts}")
        return 0
    if mode == "heavy":
        report = heavy_tail_block_experiment(
            config.options.get("r") or 256,
            config.options.get("blocks") or 100_000, seed=config.seed)
        print(f"r={report.r} blocks={report.blocks} "
              f"threshold={report.threshold:.4f} "
              f"shortfall={report.shortfall_prob:.3e} "
              f"bound={report.bound:.3e} min_sum={report.min_block_sum:.4f} "
              f"laplace_ok={report.laplace_ok}")
        return 0
    raise ValueError(f"unknown simulate mode {mode!r}")


def _cmd_tails(config: RunConfig) -> int:
    if config.options.get("grid"):
        checks = tail_check_grid()
        bad = [c for c in checks if not c.holds]
        print(f"checks={len(checks)} holds={len(checks) - len(bad)} "
              f"violations={len(bad)}")
        return 0 if not bad else 1
    needed = ("m", "s", "lam")
    if config.n is None or any(config.options.get(x) is None for x in needed):
        raise ValueError("tails needs --grid or all of --n --m --s --lambda")
    check = binomial_tail_check(
        config.n, config.options["m"], config.options["s"],
        Fraction(config.options["lam"]),
        form=config.options.get("form") or "upper",
        tau=config.options.get("tau"))
    print(f"form={check.form} tail={float(check.tail):.6e} "
          f"bound={check.bound:.6e} holds={check.holds}")
    return 0 if check.holds else 1


def _cmd_bench(config: RunConfig) -> int:
    seq = _digits_for(config, config.n)
    t0 = time.perf_counter()
    via_prefix = esp_prefix(seq.digits, config.k)[config.k]
    t1 = time.perf_counter()
    table = MultiplicityTable.from_digits(seq)
    via_mult = esp_multiplicity(table, config.k)
    t2 = time.perf_counter()
    if via_prefix != via_mult:
        raise RuntimeError(
            f"algorithm mismatch at n={config.n} k={config.k}: the two "
            f"routes disagree")
    print(f"n={config.n} k={config.k} equal=True "
          f"prefix_ms={1000 * (t1 - t0):.2f} "
          f"multiplicity_ms={1000 * (t2 - t1):.2f}")
    return 0


def _cmd_fit(config: RunConfig) -> int:
    from scipy.optimize import minimize_scalar
    import numpy as np

    path = config.options.get("input")
    if not path:
        raise ValueError("fit needs --input (a scan-c table)")
    header, rows = read_rows(path, config.format)
    try:
        i_n, i_c, i_s = (header.index(x) for x in ("n", "c", "S_root"))
    except ValueError:
        raise CacheFormatError(f"{path}: need columns n, c, S_root") from None
    cmin = config.options.get("cmin") or 0.1
    k0 = float(khinchin_k0(1e-10).value)

    groups = {}
    for row in rows:
        c = float(Fraction(row[i_c]))
        if c >= cmin:
            groups.setdefault(int(row[i_n]), []).append((c, float(row[i_s])))
    out_rows = []
    for n in sorted(groups):
        pts = sorted(groups[n])
        xs = np.array([p[0] for p in pts])
        ys = np.log(np.array([p[1] for p in pts]) / k0)

        # model K0/b * b^(1/c^a): in logs, ln(S/K0) = (c^-a - 1) ln b, which
        # is linear in ln b, so profile ln b out and search only over a.
        # The fitted values are exploratory output, not contract values.
        def profiled_sse(a):
            w = np.power(xs, -a) - 1.0
            ww = float(np.dot(w, w))
            g = float(np.dot(w, ys)) / ww if ww > 0 else 0.0
            r = ys - g * w
            return float(np.dot(r, r))

        res = minimize_scalar(profiled_sse, bounds=(0.05, 5.0),
                              method="bounded")
        a = float(res.x)
        w = np.power(xs, -a) - 1.0
        b = math.exp(float(np.dot(w, ys)) / float(np.dot(w, w)))
        rmse = math.sqrt(profiled_sse(a) / len(pts))
        out_rows.append((n, a, b, rmse))
        print(f"n={n} a={a:.6f} b={b:.6f} log_rmse={rmse:.3e}")
    if config.out:
        _emit(out_rows, ("n", "a", "b", "log_rmse"), config)
    return 0


_COMMANDS = {
    "digits": _cmd_digits,
    "mean": _cmd_mean,
    "chain": _cmd_chain,
    "scan-c": _cmd_scan_c,
    "scan-n": _cmd_scan_n,
    "periodic": _cmd_periodic,
    "xd": _cmd_xd,
    "constants": _cmd_constants,
    "simulate": _cmd_simulate,
    "tails": _cmd_tails,
    "bench": _cmd_bench,
    "fit": _cmd_fit,
}


def run(config: RunConfig) -> int:
    """Validate per-command requirements, dispatch, map errors to exit
    codes (0 ok, 2 usage, 3 precision, 4 data)."""
    try:
        if config.command not in _COMMANDS:
            raise ValueError(f"unknown command {config.command!r}")
        missing = [f for f in _REQUIRED[config.command]
                   if getattr(config, f) is None]
        if missing:
            raise ValueError(
                f"{config.command} requires --{', --'.join(missing)}")
        return _COMMANDS[config.command](config)
    except (PrecisionExhausted, RationalTerminated) as exc:
        print(f"error precision {exc}", file=sys.stderr)
        return 3
    except (CacheFormatError, FileNotFoundError, OSError) as exc:
        print(f"error data {exc}", file=sys.stderr)
        return 4
    except (ValueError, TypeError) as exc:
        print(f"error usage {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error internal {exc}", file=sys.stderr)
        return 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error usage {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="macsym",
                     description="continued-fraction digit means toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, alpha=False):
        if alpha:
            p.add_argument("--alpha", help="digit source specification")
            p.add_argument("--cache", help="digit cache file to reuse")
        p.add_argument("--precision", type=int, default=15)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write table to this path")
        p.add_argument("--format", choices=("csv", "tsv"), default="csv")
        p.add_argument("--gnuplot", action="store_true",
                       help="also write a gnuplot script next to --out")

    p = sub.add_parser("digits", help="extract/cache digits")
    common(p, alpha=True)
    p.add_argument("--n", type=int)

    p = sub.add_parser("mean", help="one symmetric mean")
    common(p, alpha=True)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--inverse", action="store_true",
                   help="mean of reciprocal digits")

    p = sub.add_parser("chain", help="all k-th roots for k=1..n")
    common(p, alpha=True)
    p.add_argument("--n", type=int)

    p = sub.add_parser("scan-c", help="S_root against c=k/n for several n")
    common(p, alpha=True)
    p.add_argument("--n-list", default=",".join(map(str, DEFAULT_SCAN_N)))

    p = sub.add_parser("scan-n", help="S_root against n at fixed cuts c")
    common(p, alpha=True)
    p.add_argument("--n", type=int)
    p.add_argument("--step", type=int)
    p.add_argument("--c-list", default="1/4,1/2,3/4")

    p = sub.add_parser("periodic", help="F_X(k,c) grids")
    common(p)
    p.add_argument("--x", action="append",
                   help="period, e.g. 1,2 (repeatable; default six samples)")
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--c-list", default="0,1/4,1/3,1/2,2/3,3/4,1")

    p = sub.add_parser("xd", help="digit-law period X_d and its value")
    common(p)
    p.add_argument("--d", type=int, default=2)

    p = sub.add_parser("constants", help="metric constants")
    common(p)
    p.add_argument("--k0", action="store_true")
    p.add_argument("--kp", type=float)
    p.add_argument("--gk", type=int)
    p.add_argument("--limsup", type=float)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("simulate", help="Monte-Carlo experiments")
    common(p)
    p.add_argument("--mode", choices=("band", "coupled", "heavy"),
                   default="band")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--r", type=int, default=256)
    p.add_argument("--blocks", type=int, default=100_000)

    p = sub.add_parser("tails", help="exact binomial tails vs bounds")
    common(p)
    p.add_argument("--grid", action="store_true")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--form", choices=("upper", "lower", "geometric"),
                   default="upper")
    p.add_argument("--tau")

    p = sub.add_parser("bench", help="time the two mean algorithms")
    common(p, alpha=True)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)

    p = sub.add_parser("fit", help="least squares on a scan-c table")
    common(p)
    p.add_argument("--input")
    p.add_argument("--cmin", type=float, default=0.1)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    d = vars(args)
    core = {"command", "alpha", "n", "k", "precision", "seed", "out", "format"}
    options = {k: v for k, v in d.items() if k not in core and k != "c_list"}
    c = _parse_c_list(d["c_list"]) if d.get("c_list") else None
    if "n_list" in d and d["n_list"]:
        options["n_list"] = [int(t) for t in d["n_list"].split(",") if t]
    if "x" in d:
        options["x_list"] = d.get("x")
    return RunConfig(
        command=d["command"], alpha=d.get("alpha"), n=d.get("n"),
        k=d.get("k"), c=c, precision=d.get("precision", 15),
        seed=d.get("seed", 0), out=d.get("out"),
        format=d.get("format", "csv"), options=options)


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(_config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
