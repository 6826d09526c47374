"""Command-line front end.

Data goes to stdout (or ``--out``), logs to stderr.  Every numeric field is
written as a decimal string so that CSV and JSON carry identical digits.

Exit codes: 0 success, 1 usage error, 2 integrity mismatch,
3 verification failure, 4 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mpf

from . import __version__
from .continuum import (
    TruncationPolicy,
    closed_form_check,
    hookup_continuum,
    hookup_probability,
    landen_check,
    odd_sinh_identity,
    poisson_fourier_side,
    poisson_identity_suite,
    prudnikov_pair,
    residue_identity,
    series_Y,
    series_Y_alt,
    series_Z,
    series_ZI,
    series_ZI_alt,
    symmetry_check,
)
from .continuum.hookup import LARGE_L, SMALL_L
from .errors import (
    ConvergenceFailure,
    DimensionTooLarge,
    EnumerationCapExceeded,
    ParityViolation,
    PrecisionInsufficient,
)
from .oracle import GridSpec, count_matchings, exhaustive_hookup
from .spectral import hookup_discrete, hookup_exact, monomer_count, q0_partition

log = logging.getLogger("dimerlab")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_VERIFY = 3
EXIT_RESOURCE = 4

DEFAULT_PRECISION = 256
MIN_PRECISION = 64
DEFAULT_EPSILON = "1e-30"
MAX_EPSILON = mpf("1e-6")
PRECISION_ENV = "DIMERLAB_PRECISION"

CONVERGE_FIELDS = ("M", "N", "L_eff", "P_discrete", "H_continuum", "abs_error", "Z_ratio")
L_EFF_NOTE = "L_eff = M/N; M = nearest even integer to L*N (ties up); N forced odd"


class UsageError(Exception):
    pass


class IntegrityError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    precision_bits: int = DEFAULT_PRECISION
    epsilon: str = DEFAULT_EPSILON
    output_format: str = "json"
    output_path: str | None = None

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION:
            raise UsageError(f"--precision must be at least {MIN_PRECISION} bits, got {self.precision_bits}")
        try:
            eps = mpf(self.epsilon)
        except (ValueError, TypeError):
            raise UsageError(f"--epsilon must be a decimal number, got {self.epsilon!r}") from None
        if not 0 < eps < MAX_EPSILON:
            raise UsageError(f"--epsilon must lie in (0, 1e-6), got {self.epsilon}")
        # series cannot be certified below the working precision
        if eps < mpf(2) ** (8 - self.precision_bits):
            raise UsageError(f"--epsilon {self.epsilon} is below what {self.precision_bits} bits can resolve")

    def policy(self, max_terms: int | None = None) -> TruncationPolicy:
        with mpmath.workprec(self.precision_bits):
            eps = mpf(self.epsilon)
        if max_terms is None:
            return TruncationPolicy(epsilon=eps)
        return TruncationPolicy(epsilon=eps, max_terms=max_terms)


@dataclass
class Report:
    """Rows of string-valued fields plus header metadata."""

    command: str
    fields: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK


def fmt(x, precision: int) -> str:
    """Decimal string carrying every digit the working precision supports."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, Fraction)):
        return str(x)
    # a few guard digits are dropped so exact values print cleanly
    digits = max(1, int(precision * math.log10(2)) - 3)
    return mpmath.nstr(mpf(x), digits)


def fmt_dev(x) -> str:
    return mpmath.nstr(mpf(x), 6)


# ---------------------------------------------------------------- parsing


def parse_monomers(text: str | None) -> tuple[tuple[int, int], ...]:
    """``"1,1:2,1"`` -> ((1, 1), (2, 1))."""
    if not text:
        return ()
    sites = []
    for chunk in text.split(":"):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise UsageError(f"monomer {chunk!r} is not of the form m,n")
        try:
            sites.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise UsageError(f"monomer {chunk!r} is not of the form m,n") from None
    return tuple(sites)


def parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--N-sizes must be a comma-separated list of integers, got {text!r}") from None
    if not sizes or any(n < 1 for n in sizes):
        raise UsageError(f"--N-sizes must list positive integers, got {text!r}")
    return sizes


def parse_positive_real(text: str, name: str, precision: int):
    with mpmath.workprec(precision):
        try:
            value = mpf(text)
        except (ValueError, TypeError):
            raise UsageError(f"{name} must be a number, got {text!r}") from None
    if not value > 0 or not mpmath.isfinite(value):
        raise UsageError(f"{name} must be positive and finite, got {text}")
    return value


def _grid(M: int, N: int) -> GridSpec:
    try:
        return GridSpec(M, N)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- commands


def cmd_count(cfg: RunConfig, M: int, N: int, monomers: str | None, method: str) -> Report:
    grid = _grid(M, N)
    sites = parse_monomers(monomers)
    fields = ("M", "N", "monomers", "dp", "spectral", "verdict")
    row = {"M": str(M), "N": str(N), "monomers": ":".join(f"{m},{n}" for m, n in sites),
           "dp": "", "spectral": "", "verdict": ""}

    dp = spectral = None
    if method in ("dp", "both"):
        try:
            dp = count_matchings(grid, sites)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        row["dp"] = str(dp)
    if method in ("spectral", "both"):
        spectral = _spectral_count(grid, sites, cfg.precision_bits)
        row["spectral"] = str(spectral)
    if method == "both":
        if dp != spectral:
            raise IntegrityError(
                f"dp and spectral counts disagree on {M}x{N} monomers={list(sites)}: "
                f"dp={dp} spectral={spectral} (difference {dp - spectral})"
            )
        row["verdict"] = "MATCH"
    return Report("count", fields, [row])


def _spectral_count(grid: GridSpec, sites, precision: int) -> int:
    if not sites:
        return q0_partition(grid, precision)
    by_column = {m: n for m, n in sites}
    if len(sites) != 2 or set(by_column) != {1, grid.M}:
        raise UsageError("the spectral method handles exactly two monomers, at (1, n1) and (M, n2)")
    try:
        return monomer_count(grid, by_column[1], by_column[grid.M], precision)
    except ParityViolation as exc:
        log.info("%s", exc)
        return 0
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_hookup(cfg: RunConfig, M: int, N: int, oracle: bool) -> Report:
    grid = _grid(M, N)
    try:
        grid.require_hookup_shape()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    prec = cfg.precision_bits
    r = hookup_discrete(grid, prec)
    fields = ["M", "N", "Z", "Z_I", "P"]
    row = {"M": str(M), "N": str(N), "Z": fmt(r.Z, prec), "Z_I": fmt(r.Z_I, prec), "P": fmt(r.P, prec)}
    if oracle:
        fields += ["P_exact", "P_oracle", "verdict"]
        exact = hookup_exact(grid, prec)
        report = exhaustive_hookup(grid)
        row["P_exact"] = str(exact)
        row["P_oracle"] = str(report.P)
        with mpmath.workprec(prec):
            gap = abs(r.P - mpf(report.P.numerator) / report.P.denominator)
            numeric_ok = gap <= mpf(2) ** (16 - prec)
        if exact != report.P or not numeric_ok:
            raise IntegrityError(
                f"hook-up probabilities disagree on {M}x{N}: spectral P={row['P']} "
                f"exact={exact} oracle={report.P}"
            )
        row["verdict"] = "MATCH"
    return Report("hookup", tuple(fields), [row])


def cmd_continuum(cfg: RunConfig, L: str, terms: int | None) -> Report:
    prec = cfg.precision_bits
    value = parse_positive_real(L, "--L", prec)
    if terms is not None and terms < 1:
        raise UsageError(f"--terms must be positive, got {terms}")
    point = hookup_continuum(value, cfg.policy(terms), prec)
    data = point.as_dict()
    path = "dual" if value < SMALL_L or value > LARGE_L else "direct"
    row = {key: fmt(v, prec) for key, v in data.items()}
    row["series_path"] = path
    return Report("continuum", tuple(row), [row])


def synthesize_grid(L, N: int) -> GridSpec:
    """N forced odd, M the nearest even integer to L*N with ties rounded up, at least 2."""
    if N % 2 == 0:
        log.info("N=%d is even; using N=%d", N, N + 1)
        N += 1
    N = max(N, 3)
    M = max(2, 2 * int(mpmath.floor(L * N / 2 + mpf(1) / 2)))
    return GridSpec(M, N)


def cmd_converge(cfg: RunConfig, L: str, sizes: str) -> Report:
    prec = cfg.precision_bits
    target = parse_positive_real(L, "--L", prec)
    Ns = sorted(parse_sizes(sizes))
    with mpmath.workprec(prec):
        H = hookup_probability(target, prec)
        Z_cont = series_Z(target, cfg.policy(), prec)
        rows = []
        for N in Ns:
            grid = synthesize_grid(target, N)
            r = hookup_discrete(grid, prec)
            L_eff = mpf(grid.M) / grid.N
            rows.append({
                "M": str(grid.M),
                "N": str(grid.N),
                "L_eff": fmt(L_eff, prec),
                "P_discrete": fmt(r.P, prec),
                "H_continuum": fmt(H, prec),
                "abs_error": fmt(abs(r.P - H), prec),
                "Z_ratio": fmt(grid.M * grid.N * r.Z / Z_cont, prec),
            })
    meta = {"L": fmt(target, prec), "L_eff": L_EFF_NOTE}
    return Report("converge", CONVERGE_FIELDS, rows, meta)


@dataclass(frozen=True)
class Check:
    name: str
    deviation: object
    tolerance: str

    @property
    def passed(self) -> bool:
        return mpf(self.deviation) < mpf(self.tolerance)


def identity_checks(cfg: RunConfig) -> list[Check]:
    prec = cfg.precision_bits
    policy = cfg.policy()
    out: list[Check] = []
    alphas = (("0.5", mpf("0.5")), ("1", mpf(1)), ("2", mpf(2)), ("pi", mpmath.pi))
    for label, alpha in alphas:
        for m in (1, 2, 3):
            for c in poisson_identity_suite(alpha, m, policy, prec).checks:
                out.append(Check(f"cosh_sum/{c.name}[alpha={label},m={m}]", c.deviation, "1e-20"))
        c = residue_identity(alpha, policy, prec)
        out.append(Check(f"residue[alpha={label}]", c.deviation, "1e-20"))
    c = poisson_fourier_side(1, mpf("0.3"), policy, prec)
    out.append(Check("poisson_fourier[alpha=1,m=0.3]", c.deviation, "1e-20"))
    for i in range(1, 10):
        k = mpf(i) / 10
        out.append(Check(f"landen[k=0.{i}]", landen_check(k, prec).deviation, "1e-25"))
    for label in ("0.2", "0.5", "0.8"):
        for c in (*prudnikov_pair(mpf(label), policy, prec), odd_sinh_identity(mpf(label), policy, prec)):
            out.append(Check(f"{c.name}[k={label}]", c.deviation, "1e-20"))
    for label in ("0.5", "1", "2"):
        for c in symmetry_check(mpf(label), policy, prec).checks:
            out.append(Check(f"symmetry/{c.name}[L={label}]", c.deviation, "1e-20"))
        for c in closed_form_check(mpf(label), policy, prec):
            out.append(Check(f"closed_form/{c.name}[L={label}]", c.deviation, "1e-20"))
    return out


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def discrete_checks(cfg: RunConfig) -> list[Check]:
    prec = cfg.precision_bits
    policy = cfg.policy()
    out: list[Check] = []
    for M in (2, 4, 6):
        for N in (3, 5, 7):
            grid = GridSpec(M, N)
            ok = q0_partition(grid, prec) == count_matchings(grid)
            out.append(Check(f"q0_vs_dp[{M}x{N}]", 0 if ok else 1, "0.5"))
            for n1, n2 in ((1, 1), (1, N), (2, 2), (N, N)):
                sites = ((1, n1), (M, n2))
                ok = monomer_count(grid, n1, n2, prec) == count_matchings(grid, sites)
                out.append(Check(f"monomers_vs_dp[{M}x{N},n1={n1},n2={n2}]", 0 if ok else 1, "0.5"))
    for M, N in ((2, 3), (2, 5), (4, 3)):
        grid = GridSpec(M, N)
        ok = hookup_exact(grid, prec) == exhaustive_hookup(grid).P
        out.append(Check(f"hookup_vs_enumeration[{M}x{N}]", 0 if ok else 1, "0.5"))
    for label in ("0.5", "1", "2"):
        L = mpf(label)
        Z, ZI, Y = series_Z(L, policy, prec), series_ZI(L, policy, prec), series_Y(L, policy, prec)
        out.append(Check(f"series/ZI_alt[L={label}]", _rel(ZI, series_ZI_alt(L, policy, prec)), "1e-25"))
        out.append(Check(f"series/Y_alt[L={label}]", _rel(Y, series_Y_alt(L, policy, prec)), "1e-25"))
        out.append(Check(f"series/Z_minus_ZI[L={label}]", _rel(Z - ZI, Y), "1e-25"))
    point = hookup_continuum(1, policy, prec)
    out.append(Check("continuum/H_spread[L=1]", point.spread, "1e-18"))
    out.append(Check("continuum/H_self_dual[L=1]", abs(point.H - mpf(1) / 3), "1e-25"))
    for label in ("0.5", "2", "3"):
        L = mpf(label)
        h, hd = hookup_probability(L, prec), hookup_probability(1 / L, prec)
        product = (1 / h - 1) * (1 / hd - 1)
        out.append(Check(f"continuum/H_duality_product[L={label}]", abs(product - 4) / 4, "1e-25"))
    return out


def cmd_verify(cfg: RunConfig, suite: str) -> Report:
    with mpmath.workprec(cfg.precision_bits):
        checks = identity_checks(cfg)
        if suite == "all":
            checks += discrete_checks(cfg)
        rows = []
        for c in checks:
            rows.append({"name": c.name, "deviation": fmt_dev(c.deviation), "tolerance": c.tolerance,
                         "status": "PASS" if c.passed else "FAIL"})
            if not c.passed:
                log.error("check %s failed: deviation %s >= %s", c.name, fmt_dev(c.deviation), c.tolerance)
    failed = sum(r["status"] == "FAIL" for r in rows)
    meta = {"suite": suite, "checks": str(len(rows)), "failed": str(failed)}
    return Report("verify", ("name", "deviation", "tolerance", "status"), rows, meta,
                  EXIT_VERIFY if failed else EXIT_OK)


# ---------------------------------------------------------------- output


def render(report: Report, cfg: RunConfig) -> str:
    if cfg.output_format == "json":
        doc = {"dimerlab": __version__, "command": report.command, "precision": cfg.precision_bits,
               "epsilon": cfg.epsilon, **report.meta, "rows": report.rows}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# dimerlab {__version__} {report.command} precision={cfg.precision_bits} epsilon={cfg.epsilon}\n")
    for key, value in report.meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.DictWriter(buf, fieldnames=list(report.fields), lineterminator="\n")
    writer.writeheader()
    writer.writerows(report.rows)
    return buf.getvalue()


def emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None


def build_parser(default_precision: int = DEFAULT_PRECISION) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=default_precision,
                        help=f"working precision in bits (default {default_precision}, env {PRECISION_ENV})")
    common.add_argument("--epsilon", default=DEFAULT_EPSILON,
                        help="relative series truncation tolerance, in (0, 1e-6)")
    common.add_argument("--format", choices=("csv", "json"), default=None, dest="output_format")
    common.add_argument("--out", default=None, help="write data here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(prog="dimerlab", description="Double-dimer hook-up probabilities, three ways.")
    parser.add_argument("--version", action="version", version=f"dimerlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", parents=[common], help="count dimer covers of an M x N grid")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--monomers", default=None, help='removed sites, e.g. "1,1:2,1"')
    p.add_argument("--method", choices=("dp", "spectral", "both"), default="dp")

    p = sub.add_parser("hookup", parents=[common], help="discrete hook-up probability")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="compare against exhaustive enumeration")

    p = sub.add_parser("continuum", parents=[common], help="continuum hook-up probability H(L)")
    p.add_argument("--L", required=True)
    p.add_argument("--terms", type=int, default=None, help="cap on series terms")

    p = sub.add_parser("converge", parents=[common], help="discrete vs continuum at growing sizes")
    p.add_argument("--L", required=True)
    p.add_argument("--N-sizes", required=True, dest="sizes")

    p = sub.add_parser("verify", parents=[common], help="run the identity suites")
    p.add_argument("--suite", choices=("identities", "all"), default="identities")
    return parser


def run(args: argparse.Namespace) -> int:
    fmt_default = "csv" if args.command in ("converge", "verify") else "json"
    cfg = RunConfig(args.command, args.precision, args.epsilon, args.output_format or fmt_default, args.out)
    with mpmath.workprec(cfg.precision_bits):
        if args.command == "count":
            report = cmd_count(cfg, args.M, args.N, args.monomers, args.method)
        elif args.command == "hookup":
            report = cmd_hookup(cfg, args.M, args.N, args.oracle)
        elif args.command == "continuum":
            report = cmd_continuum(cfg, args.L, args.terms)
        elif args.command == "converge":
            report = cmd_converge(cfg, args.L, args.sizes)
        else:
            report = cmd_verify(cfg, args.suite)
    emit(render(report, cfg), cfg.output_path)
    return report.exit_code


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser(_default_precision())
    except UsageError as exc:
        print(f"dimerlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return run(args)
    except UsageError as exc:
        print(f"dimerlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrityError as exc:
        print(f"dimerlab: integrity mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (DimensionTooLarge, EnumerationCapExceeded, PrecisionInsufficient, ConvergenceFailure) as exc:
        print(f"dimerlab: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"dimerlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
