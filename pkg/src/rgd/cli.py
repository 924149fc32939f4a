"""``rgd`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import density as dn
from . import diffusion as df
from . import partition as pt
from . import tables, verify
from .numerics import LogSigned, ToleranceNotMet
from .oracle import InsufficientSamples
from .precision import NumericallySingular, PrecisionExhausted
from .products import EnsembleSpec

EXIT_OK, EXIT_VERIFY, EXIT_ARGS, EXIT_NUMERIC = 0, 1, 2, 3

NUMERICAL_ERRORS = (
    pt.NumericalFailure,
    NumericallySingular,
    PrecisionExhausted,
    ToleranceNotMet,
    InsufficientSamples,
    OverflowError,
    ZeroDivisionError,
)


class UsageError(ValueError):
    """Invalid command-line input."""


# ---------------------------------------------------------------------------
# argument parsing


def _number(text: str, kind: Callable):
    try:
        return kind(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def parse_range(text: str, kind: Callable = float) -> list:
    """Parse ``v`` or ``start:stop:step`` (stop inclusive) into a list."""
    parts = text.split(":")
    if len(parts) == 1:
        return [_number(parts[0], kind)]
    if len(parts) not in (2, 3):
        raise UsageError(f"range must be start:stop:step, got {text!r}")
    start, stop = _number(parts[0], kind), _number(parts[1], kind)
    step = _number(parts[2], kind) if len(parts) == 3 else kind(1)
    if not step > 0:
        raise UsageError("range step must be positive")
    if stop < start:
        raise UsageError("range stop is below start")
    if kind is int:
        return list(range(start, stop + 1, step))
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def parse_vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"not a comma-separated list of numbers: {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1, metavar="INT")
    p.add_argument("--decimals", type=int, default=6, metavar="INT", help="fixed decimals for log values")


def _grid_cells(p: argparse.ArgumentParser, m_default: str | None = None, s_default: str | None = None) -> None:
    p.add_argument("--m", default=m_default, required=m_default is None, metavar="INT|RANGE")
    p.add_argument("--sigma2", default=s_default, required=s_default is None, metavar="REAL|RANGE")
    p.add_argument("--linear", action="store_true", help="print values instead of natural logs")
    p.add_argument("--odd-border", choices=pt.ODD_BORDERS, default="exact",
                   help="border column for odd-m beta=1 Pfaffians")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rgd", description="Riemannian Gaussian partition functions and densities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeta", help="log of the beta=1 normalisation constant zeta")
    _grid_cells(p)
    _common(p)

    p = sub.add_parser("partition", help="log z_beta for one ensemble")
    _grid_cells(p)
    p.add_argument("--family", choices=("a", "so", "sp"), default="a")
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=1)
    p.add_argument("--convention", choices=("paper", "variance"), default="paper")
    _common(p)

    p = sub.add_parser("table", help="reference tables of log zeta (beta=1) or log z_beta")
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=1)
    p.add_argument("--layout", choices=("grid", "small"), default="grid",
                   help="grid: m x sigma2 table; small: -log value at a single small sigma2")
    p.add_argument("--m", metavar="INT|RANGE")
    p.add_argument("--sigma2", metavar="REAL|RANGE")
    p.add_argument("--convention", choices=("paper", "variance"), default="paper")
    p.add_argument("--odd-border", choices=pt.ODD_BORDERS, default="paper",
                   help="border for odd m; 'paper' reproduces the published layout")
    p.add_argument("--linear", action="store_true")
    _common(p)
    p.set_defaults(decimals=3)

    p = sub.add_parser("density", help="eigenvalue density on a grid (family a)")
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=2)
    p.add_argument("--family", choices=("a", "so", "sp"), default="a")
    p.add_argument("--m", type=int, required=True, metavar="INT")
    p.add_argument("--sigma2", type=float, required=True, metavar="REAL")
    p.add_argument("--grid", metavar="LO:HI:STEP")
    p.add_argument("--mixture", action="store_true", help="print the beta=2 Gaussian-mixture terms instead")
    _common(p)

    p = sub.add_parser("kernel", help="Karlin-McGregor transition density")
    p.add_argument("--x", required=True, help="end points, comma separated, strictly decreasing")
    p.add_argument("--eta", required=True, help="start points, comma separated, strictly decreasing")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--chamber", choices=("a", "b"), default="a", help="b adds an absorbing wall at 0")
    _common(p)

    p = sub.add_parser("verify", help="run the certification suite")
    p.add_argument("--seed", type=int, default=verify.DEFAULT_SEED, metavar="UINT64")
    p.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    _common(p)
    return parser


# ---------------------------------------------------------------------------
# output


def _fmt_log(v: float, decimals: int) -> str:
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    s = f"{v:.{decimals}f}"
    return "0." + "0" * decimals if s.lstrip("-") == "0." + "0" * decimals else s


def _fmt_linear(v: LogSigned) -> str:
    if v.is_zero:
        return "0"
    with mpmath.workdps(20):
        return mpmath.nstr(v.to_mpf(), 15, min_fixed=-4, max_fixed=16)


def _emit(args, header: Sequence[str], rows: list[list]) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        def cell(v):
            if isinstance(v, str):
                try:
                    return json.loads(v)
                except ValueError:
                    return v
            return v
        text = json.dumps([dict(zip(header, map(cell, r))) for r in rows], indent=1) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _map(fn: Callable, items: list, threads: int) -> list:
    if threads < 1:
        raise UsageError("--threads must be at least 1")
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands


def _log_zeta(cell) -> LogSigned:
    m, s2, border = cell
    return pt.zeta(m, s2, border)


def _partition_cell(cell) -> LogSigned:
    fam, beta, m, s2, convention, border = cell
    return pt.partition(EnsembleSpec(fam, beta, m, s2), convention, border).value


def _cells(args) -> tuple[list[int], list[float]]:
    ms = parse_range(args.m, int)
    s2s = parse_range(args.sigma2, float)
    if any(m < 1 for m in ms):
        raise UsageError("m must be positive")
    if any(not s > 0 for s in s2s):
        raise UsageError("sigma2 must be positive")
    return ms, s2s


def _value_rows(args, ms, s2s, values, negate: bool = False, name: str = "log_value") -> None:
    rows = []
    for (m, s2), v in zip(((m, s) for m in ms for s in s2s), values):
        if args.linear:
            rows.append([m, repr(s2), _fmt_linear(v)])
        else:
            lv = v.log()
            rows.append([m, repr(s2), _fmt_log(-lv if negate else lv, args.decimals)])
    col = "value" if args.linear else ("neg_" + name if negate else name)
    _emit(args, ["m", "sigma2", col], rows)


def cmd_zeta(args) -> int:
    ms, s2s = _cells(args)
    values = _map(_log_zeta, [(m, s, args.odd_border) for m in ms for s in s2s], args.threads)
    _value_rows(args, ms, s2s, values)
    return EXIT_OK


def cmd_partition(args) -> int:
    ms, s2s = _cells(args)
    cells = [(args.family, args.beta, m, s, args.convention, args.odd_border) for m in ms for s in s2s]
    values = _map(_partition_cell, cells, args.threads)
    _value_rows(args, ms, s2s, values)
    return EXIT_OK


TABLE_LAYOUTS = {
    # beta: (grid m range, small-sigma m range, small sigma2)
    1: ("2:12", "2:40:2", tables.NEG_LOG_ZETA_SMALL_SIGMA2),
    2: ("2:12", "1:20", 0.02),
    4: ("2:7", "1:20", tables.NEG_LOG_Z4_SMALL_SIGMA2),
}


def cmd_table(args) -> int:
    grid_m, small_m, small_s2 = TABLE_LAYOUTS[args.beta]
    if args.layout == "grid":
        args.m = args.m or grid_m
        args.sigma2 = args.sigma2 or "0.1:2.4:0.1"
    else:
        args.m = args.m or small_m
        args.sigma2 = args.sigma2 or repr(small_s2)
    ms, s2s = _cells(args)
    if args.beta == 1:
        # odd m takes the chosen border, even m has none
        values = _map(_log_zeta, [(m, s, args.odd_border) for m in ms for s in s2s], args.threads)
    else:
        cells = [("A", args.beta, m, s, args.convention, "exact") for m in ms for s in s2s]
        values = _map(_partition_cell, cells, args.threads)
    name = "log_zeta" if args.beta == 1 else "log_z"
    _value_rows(args, ms, s2s, values, negate=args.layout == "small", name=name)
    return EXIT_OK


def cmd_density(args) -> int:
    spec = EnsembleSpec(args.family, args.beta, args.m, args.sigma2)
    if spec.family != "A":
        raise UsageError("densities are implemented for family a only (so/sp densities are out of scope)")
    if spec.beta == 1 and spec.m % 2:
        raise UsageError("the beta=1 density is implemented for even m only (odd m is out of scope)")
    if spec.beta == 4 and spec.m != 2:
        raise UsageError("the beta=4 density is implemented for m=2 only (m > 2 is out of scope)")
    if args.mixture:
        if spec.beta != 2:
            raise UsageError("the mixture form exists for beta=2 only")
        rows = [[repr(c), v.sign, repr(v.lnmag)] for c, v in dn.rho2_mixture(spec.m, spec.sigma2)]
        _emit(args, ["center", "coefficient_sign", "coefficient_lnmag"], rows)
        return EXIT_OK
    if args.grid:
        parts = args.grid.split(":")
        if len(parts) != 3:
            raise UsageError("--grid must be LO:HI:STEP")
        grid = np.array(parse_range(args.grid, float))
    else:
        grid = np.linspace(*dn.default_window(spec.m, spec.sigma2), 801)
    chunks = [c for c in np.array_split(grid, max(1, args.threads)) if len(c)]
    values = np.concatenate(_map(_density_chunk, [(spec, c) for c in chunks], args.threads))
    if not np.all(np.isfinite(values)):
        raise pt.NumericalFailure("density evaluation produced non-finite values")
    _emit(args, ["r", "rho"], [[repr(float(r)), repr(float(v))] for r, v in zip(grid, values)])
    return EXIT_OK


def _density_chunk(job):
    spec, grid = job
    return dn.density_curve(spec, grid).values


def cmd_kernel(args) -> int:
    x, eta = parse_vector(args.x), parse_vector(args.eta)
    cfg = df.WalkerConfig(x, eta, args.t, args.chamber.upper())
    v = df.km_kernel_a(cfg) if cfg.family == "A" else df.km_kernel_b(cfg)
    _emit(args, ["sign", "log_magnitude"], [[v.sign, repr(v.lnmag) if v.sign else "-inf"]])
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    criteria = None
    if args.criteria:
        criteria = [int(v) for v in parse_vector(args.criteria)]
    rows = verify.run_suite(seed=args.seed, criteria=criteria, threads=args.threads)

    def show(v):
        return repr(v) if isinstance(v, float) else str(v)

    _emit(args, ["check_id", "status", "observed", "expected", "tolerance"],
          [[r.check_id, r.status, show(r.observed), show(r.expected), show(r.tolerance)] for r in rows])
    bad = verify.first_failure(rows)
    if bad is not None:
        failed = sum(r.status == "fail" for r in rows)
        print(f"rgd verify: {failed} check(s) failed; first: {bad.check_id} "
              f"(observed {show(bad.observed)}, expected {show(bad.expected)}, tolerance {show(bad.tolerance)})",
              file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {
    "zeta": cmd_zeta,
    "partition": cmd_partition,
    "table": cmd_table,
    "density": cmd_density,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
}


VALUE_FLAGS = ("--grid", "--sigma2", "--m", "--x", "--eta", "--t")


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--grid -3:3:0.1`` into ``--grid=-3:3:0.1``.

    argparse would otherwise read a value starting with '-' as an option.
    """
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in VALUE_FLAGS and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        return COMMANDS[args.command](args)
    except NUMERICAL_ERRORS as exc:
        print(f"rgd {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"rgd {args.command}: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
