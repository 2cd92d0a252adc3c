"""Command-line front end: |alpha|^2 sweeps, custom Gram files and thresholds.

Exit codes: 0 success, 2 usage error, 3 input validation failure,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .capacity import (
    ACTIVATION_LEVEL,
    CapacityResult,
    activation_threshold,
    ask3_capacity,
    generic_capacity,
    qam16_capacity,
    symmetric_capacity,
)
from .ensemble import make_psk
from .errors import ConvergenceError, NotPSDError, ValidationError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

KKT_TOL = 1e-6
FLOAT_FORMAT = "{:.12g}"

COLUMNS = {
    "psk": ("alpha_sq", "capacity_bits", "iterations"),
    "ask3": ("alpha_sq", "capacity_bits", "xi1", "iterations"),
    "qam16": ("alpha_sq", "capacity_bits", "xi1", "xi2", "xi3", "iterations"),
}


class GramParseError(ValidationError):
    """The Gram file does not follow the documented grammar."""


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return FLOAT_FORMAT.format(float(x))


# ---------------------------------------------------------------- sweep spec

@dataclass(frozen=True)
class SweepSpec:
    kind: str
    alpha_sq_min: float
    alpha_sq_max: float
    points: int
    scale: str = "linear"
    m: int | None = None

    def __post_init__(self):
        if self.kind not in COLUMNS:
            raise UsageError(f"unknown sweep kind {self.kind!r}")
        if self.kind == "psk" and (self.m is None or self.m < 2):
            raise UsageError("psk needs --M >= 2")
        lo, hi = self.alpha_sq_min, self.alpha_sq_max
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo < 0:
            raise UsageError("alpha_sq bounds must be finite and non-negative")
        if lo > hi:
            raise UsageError("--alpha-sq-min must not exceed --alpha-sq-max")
        if self.points < 1:
            raise UsageError("--points must be >= 1")
        if self.scale not in ("linear", "log"):
            raise UsageError(f"unknown scale {self.scale!r}")
        if self.scale == "log" and lo <= 0:
            raise UsageError("log scale needs --alpha-sq-min > 0")

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.alpha_sq_min])
        if self.scale == "log":
            return np.geomspace(self.alpha_sq_min, self.alpha_sq_max, self.points)
        return np.linspace(self.alpha_sq_min, self.alpha_sq_max, self.points)


def sweep_point(kind: str, alpha_sq: float, m: int | None = None) -> tuple:
    """One CSV row (as floats/ints) for a sweep point."""
    if kind == "psk":
        r = symmetric_capacity(make_psk(m, math.sqrt(alpha_sq)))
        return (alpha_sq, r.capacity_bits, r.iterations)
    if kind == "ask3":
        r = ask3_capacity(alpha_sq)
        return (alpha_sq, r.capacity_bits, r.parameters[0], r.iterations)
    r = qam16_capacity(alpha_sq)
    return (alpha_sq, r.capacity_bits, *r.parameters, r.iterations)


def _point(args):
    return sweep_point(*args)


def format_row(row: tuple) -> str:
    return ",".join(str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row)


def run_sweep(spec: SweepSpec, jobs: int | None = 1) -> str:
    """CSV text (header plus one row per point, ascending ``alpha_sq``)."""
    tasks = [(spec.kind, float(a), spec.m) for a in spec.grid()]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(tasks) == 1:
        rows = [_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            rows = list(pool.map(_point, tasks))
    out = io.StringIO()
    out.write(",".join(COLUMNS[spec.kind]) + "\n")
    for row in rows:
        out.write(format_row(row) + "\n")
    return out.getvalue()


# ----------------------------------------------------------------- gram files

def parse_complex(token: str) -> complex:
    """Parse ``a+bi``, ``a``, ``bi`` (exponents allowed) into a complex number."""
    t = token.strip().lower()
    if t.endswith("i"):
        t = t[:-1] + "j"
    if "j" in t[:-1] or not t:
        raise GramParseError(f"cannot parse complex entry {token!r}")
    try:
        z = complex(t)
    except ValueError:
        raise GramParseError(f"cannot parse complex entry {token!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise GramParseError(f"non-finite entry {token!r}")
    return z


def parse_gram(text: str) -> np.ndarray:
    """Read the Gram text format: first line ``M``, then ``M`` rows of ``M`` entries.

    ``#`` starts a comment that runs to the end of the line; blank lines are
    ignored. Only the grammar is checked here, not the Gram invariants.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body.split()))
    if not lines:
        raise GramParseError("empty Gram file")
    lineno, head = lines[0]
    if len(head) != 1:
        raise GramParseError(f"line {lineno}: expected the dimension M alone")
    try:
        m = int(head[0])
    except ValueError:
        raise GramParseError(f"line {lineno}: dimension {head[0]!r} is not an integer") from None
    if m < 1:
        raise GramParseError(f"line {lineno}: dimension must be >= 1, got {m}")
    rows = lines[1:]
    if len(rows) != m:
        raise GramParseError(f"expected {m} matrix rows, found {len(rows)}")
    g = np.empty((m, m), dtype=complex)
    for i, (lineno, tokens) in enumerate(rows):
        if len(tokens) != m:
            raise GramParseError(f"line {lineno}: expected {m} entries, found {len(tokens)}")
        for j, tok in enumerate(tokens):
            try:
                g[i, j] = parse_complex(tok)
            except GramParseError as exc:
                raise GramParseError(f"line {lineno}: {exc}") from None
    return g


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def format_gram(g) -> str:
    """Inverse of :func:`parse_gram` (round-trips every double exactly)."""
    g = np.asarray(g, dtype=complex)
    lines = [str(g.shape[0])]
    lines += [" ".join(format_complex(z) for z in row) for row in g]
    return "\n".join(lines) + "\n"


def render_result(result: CapacityResult, style: str = "text") -> str:
    prior = " ".join(fmt(x) for x in result.optimal_prior)
    lam = " ".join(fmt(x) for x in result.optimal_eigenvalues)
    if style == "csv":
        out = ["quantity,index,value", f"capacity_bits,,{fmt(result.capacity_bits)}",
               f"kkt_residual_bits,,{fmt(result.first_order_residual)}",
               f"iterations,,{result.iterations}"]
        out += [f"prior,{i},{fmt(x)}" for i, x in enumerate(result.optimal_prior)]
        out += [f"eigenvalue,{i},{fmt(x)}" for i, x in enumerate(result.optimal_eigenvalues)]
        return "\n".join(out) + "\n"
    return (f"capacity_bits: {fmt(result.capacity_bits)}\n"
            f"prior: {prior}\n"
            f"eigenvalues: {lam}\n"
            f"kkt_residual_bits: {fmt(result.first_order_residual)}\n"
            f"iterations: {result.iterations}\n")


def run_custom(path: str, style: str = "text") -> tuple:
    """Capacity of the ensemble in a Gram file; returns ``(result, rendered)``."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GramParseError(f"cannot read {path}: {exc.strerror}") from None
    result = generic_capacity(parse_gram(text))
    return result, render_result(result, style)


# ----------------------------------------------------------------- argparse

_SWEEP_HELP = """CSV columns (floats with 12 significant digits):
  psk:   alpha_sq,capacity_bits,iterations
  ask3:  alpha_sq,capacity_bits,xi1,iterations
  qam16: alpha_sq,capacity_bits,xi1,xi2,xi3,iterations
Rows come in ascending alpha_sq."""

_GRAM_HELP = """Gram file: first line M, then M lines of M whitespace-separated
complex entries written a+bi (a, bi and exponents also accepted).
'#' starts a comment."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_sweep_flags(p, lo=0.0, hi=2.0, points=51):
    p.add_argument("--alpha-sq-min", type=float, default=lo)
    p.add_argument("--alpha-sq-max", type=float, default=hi)
    p.add_argument("--points", type=int, default=points)
    p.add_argument("--scale", choices=("linear", "log"), default="linear")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="holevocap", description="Holevo capacity of coherent-state ensembles.",
                     epilog=_SWEEP_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, title in (("psk", "M-ary PSK sweep"), ("ask3", "ternary ASK sweep"), ("qam16", "16QAM sweep")):
        p = sub.add_parser(name, help=title, epilog=_SWEEP_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        if name == "psk":
            p.add_argument("--M", dest="m", type=int, required=True, help="number of phases")
        _add_sweep_flags(p)
        p.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    p = sub.add_parser("custom", help="capacity of a user Gram matrix", epilog=_GRAM_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("gram_file")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out")
    p = sub.add_parser("threshold", help="activation threshold of a reduced prior")
    p.add_argument("kind", choices=("ask3", "qam16"))
    p.add_argument("parameter", choices=("xi1", "xi2"))
    p.add_argument("--level", type=float, default=ACTIVATION_LEVEL,
                   help="a parameter is active above this value (default %(default)g)")
    p.add_argument("--width", type=float, default=1e-4, help="bisection stopping width")
    _add_sweep_flags(p, hi=5.0, points=1)
    return parser


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in COLUMNS:
            spec = SweepSpec(args.command, args.alpha_sq_min, args.alpha_sq_max, args.points,
                             args.scale, getattr(args, "m", None))
            if args.jobs is not None and args.jobs < 1:
                raise UsageError("--jobs must be >= 1")
            _emit(run_sweep(spec, args.jobs), args.out)
        elif args.command == "custom":
            result, text = run_custom(args.gram_file, args.format)
            _emit(text, args.out)
            if not result.first_order_residual < KKT_TOL:
                print(f"error: KKT residual {result.first_order_residual:.3g} exceeds {KKT_TOL:g}",
                      file=sys.stderr)
                return EXIT_NUMERICAL
        else:
            if args.kind == "ask3" and args.parameter != "xi1":
                raise UsageError("ask3 has only the parameter xi1")
            if not (args.level > 0 and args.width > 0):
                raise UsageError("--level and --width must be positive")
            if not 0 <= args.alpha_sq_min < args.alpha_sq_max:
                raise UsageError("need 0 <= --alpha-sq-min < --alpha-sq-max")
            t = activation_threshold(args.kind, args.parameter, args.level,
                                     args.alpha_sq_min, args.alpha_sq_max, args.width)
            _emit(f"{args.kind} {args.parameter} threshold alpha_sq = {fmt(t.value)} "
                  f"+/- {fmt(t.width / 2)} (level {args.level:g})\n", args.out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotPSDError as exc:
        print(f"error: invalid Gram matrix: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GramParseError as exc:
        print(f"error: cannot parse Gram file: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
