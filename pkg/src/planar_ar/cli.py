"""Command-line front end.

Exit codes: 0 on success, 1 for usage errors and malformed input, 2 when the
parameters fall outside the domain of the requested operation.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from . import __version__
from .acf import acf_grid
from .errors import InputFormatError, LagRangeError, PlanarARError
from .estimate import recover_from_grid
from .io import (
    acf_to_csv,
    acf_to_json,
    acf_to_table,
    array_to_pgm,
    csv_text,
    dumps_json,
    field_to_csv,
    field_to_json,
    field_to_pgm,
    field_to_table,
    fmt,
    fmt_table,
    load_grid,
    psi_to_csv,
    psi_to_json,
    psi_to_table,
    write_atomic,
)
from .ma import psi_table
from .params import ParamSet, check_conditions, equivalence_class
from .sim import DEFAULT_TOL, MAX_TABLE, FieldGrid, NoiseKind, Provenance, empirical_acf, simulate_stationary
from .spectral import QuadratureSpec, acf_quadrature_window, density_grid

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2

FORMATS = ("json", "csv", "pgm", "table")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite(s: str) -> float:
    try:
        x = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"must be finite: {s!r}")
    return x


def _positive(s: str) -> float:
    x = _finite(s)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
    return x


def _count(s: str) -> int:
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {s!r}")
    return n


def _seed(s: str) -> int:
    n = _count(s)
    if n >= 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits: {s!r}")
    return n


def _common(default_format: str, formats=FORMATS) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("-a", type=_finite, default=0.0, help="coefficient of X[i-1, j]")
    p.add_argument("-b", type=_finite, default=0.0, help="coefficient of X[i, j-1]")
    p.add_argument("-c", type=_finite, default=0.0, help="coefficient of X[i-1, j-1]")
    p.add_argument("--sigma2", type=_positive, default=1.0, help="white-noise variance")
    p.add_argument("--format", choices=formats, default=default_format)
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--seed", type=_seed, help="random seed (simulate)")
    p.add_argument("--nodes", type=_count, default=2048, help="quadrature nodes per axis")
    p.add_argument("--tol", type=_positive, default=None, help="numerical tolerance")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="planar-ar", description="Planar first-order autoregression toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("check", parents=[_common("json", ("json", "csv", "table"))],
                   help="stationarity, causality and symmetry report")

    acf = sub.add_parser("acf", parents=[_common("csv", ("json", "csv", "table"))],
                         help="exact autocovariance on a lag window")
    acf.add_argument("--h1-min", type=int, default=-2)
    acf.add_argument("--h1-max", type=int, default=2)
    acf.add_argument("--h2-min", type=int, default=-2)
    acf.add_argument("--h2-max", type=int, default=2)
    acf.add_argument("--oracle", action="store_true", help="add quadrature values and differences")

    psi = sub.add_parser("psi", parents=[_common("csv", ("json", "csv", "table"))],
                         help="moving-average coefficients")
    psi.add_argument("--kmax", type=_count, default=8)
    psi.add_argument("--lmax", type=_count, default=8)

    sim = sub.add_parser("simulate", parents=[_common("csv")], help="sample the stationary field")
    sim.add_argument("--rows", type=_count, default=128)
    sim.add_argument("--cols", type=_count, default=128)
    sim.add_argument("--method", choices=[Provenance.CAUSAL_MA.value, Provenance.BOUNDARY_RECURSION.value],
                     default=Provenance.CAUSAL_MA.value)
    sim.add_argument("--noise", choices=[k.value for k in NoiseKind], default=NoiseKind.GAUSSIAN.value)
    sim.add_argument("--table-cap", type=_count, default=MAX_TABLE, help="largest coefficient table side")
    sim.add_argument("--margin", type=_count, default=None, help="burn-in margin (BoundaryRecursion)")

    est = sub.add_parser("estimate", parents=[_common("json", ("json", "table"))],
                         help="recover parameters from an autocovariance grid or a field")
    est.add_argument("input", help="CSV or JSON file written by `acf` or `simulate`")

    sub.add_parser("equiv", parents=[_common("json", ("json", "table"))],
                   help="parameter sets sharing the autocovariance")

    spec = sub.add_parser("spectrum", parents=[_common("csv")], help="spectral density on a grid")
    spec.add_argument("--resolution", type=_count, default=65, help="grid points per axis")
    return parser


def _params(args) -> ParamSet:
    return ParamSet(args.a, args.b, args.c, args.sigma2)


def _kv_table(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in pairs)


def _show(v) -> str:
    if isinstance(v, float):
        return fmt_table(v)
    return str(v).lower() if isinstance(v, bool) else str(v)


def cmd_check(args) -> tuple[str, int]:
    report = check_conditions(_params(args), symmetry_tol=args.tol)
    d = report.to_dict()
    code = EXIT_OK if report.stationary else EXIT_DOMAIN
    if args.format == "json":
        return dumps_json(d), code
    if args.format == "csv":
        return csv_text(["key", "value"], [[k, fmt(v) if isinstance(v, float) else _show(v)] for k, v in d.items()]), code
    return _kv_table([(k, _show(v)) for k, v in d.items()]), code


def cmd_acf(args) -> tuple[str, int]:
    p = _params(args)
    g = acf_grid(p, args.h1_min, args.h1_max, args.h2_min, args.h2_max)
    oracle = None
    if args.oracle:
        spec = QuadratureSpec(args.nodes)
        oracle = acf_quadrature_window(p, list(g.h1_range), list(g.h2_range), spec)
    render = {"csv": acf_to_csv, "json": acf_to_json, "table": acf_to_table}[args.format]
    return render(g, oracle), EXIT_OK


def cmd_psi(args) -> tuple[str, int]:
    t = psi_table(_params(args), args.kmax, args.lmax)
    render = {"csv": psi_to_csv, "json": psi_to_json, "table": psi_to_table}[args.format]
    return render(t), EXIT_OK


def cmd_simulate(args) -> tuple[str, int]:
    if args.rows < 1 or args.cols < 1:
        raise UsageError("--rows and --cols must be positive")
    g = simulate_stationary(
        _params(args), args.rows, args.cols, seed=args.seed, method=args.method,
        tol=args.tol or DEFAULT_TOL, noise=args.noise, table_cap=args.table_cap, margin=args.margin,
    )
    render = {"csv": field_to_csv, "json": field_to_json, "pgm": field_to_pgm, "table": field_to_table}[args.format]
    return render(g), EXIT_OK


def cmd_estimate(args) -> tuple[str, int]:
    grid = load_grid(args.input)
    if isinstance(grid, FieldGrid):
        if grid.n_rows < 3 or grid.n_cols < 3:
            raise InputFormatError(f"{args.input}: a field needs at least 3 x 3 cells")
        grid = empirical_acf(grid, 2, 2)
    est = recover_from_grid(grid)
    doc = est.to_dict()
    if args.format == "json":
        return dumps_json(doc), EXIT_OK
    pairs = [(k, _show(v)) for k, v in doc["estimate"].items()]
    pairs += [("class_size", str(est.equivalence.class_size))]
    pairs += [(f"member T{m}", " ".join(fmt_table(x) for x in q.as_tuple())) for m, q in est.equivalence.members]
    pairs += [(k, _show(v)) for k, v in doc["condition_report"].items()]
    return _kv_table(pairs), EXIT_OK


def cmd_equiv(args) -> tuple[str, int]:
    cls = equivalence_class(_params(args))
    if args.format == "json":
        return dumps_json(cls.to_dict()), EXIT_OK
    rows = [("class_size", str(cls.class_size)), ("causal_member_index", str(cls.causal_member_index))]
    rows += [(f"T{m}", " ".join(fmt_table(x) for x in q.as_tuple())) for m, q in cls.members]
    return _kv_table(rows), EXIT_OK


def cmd_spectrum(args) -> tuple[str, int]:
    if args.resolution < 2:
        raise UsageError("--resolution must be at least 2")
    p = _params(args)
    nu, dens = density_grid(p, args.resolution)
    if args.format == "json":
        return dumps_json({"nu": nu, "density": dens, "params": p.to_dict()}), EXIT_OK
    if args.format == "pgm":
        return array_to_pgm(dens, {"params": p.to_dict(), "nu_min": -0.5, "nu_max": 0.5}), EXIT_OK
    if args.format == "table":
        rows = [[""] + [fmt_table(v) for v in nu]]
        rows += [[fmt_table(nu[i])] + [fmt_table(v) for v in dens[i]] for i in range(nu.size)]
        widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
        return "".join("  ".join(s.rjust(w) for s, w in zip(r, widths)) + "\n" for r in rows), EXIT_OK
    i1, i2 = np.meshgrid(np.arange(nu.size), np.arange(nu.size), indexing="ij")
    rows = [[fmt(nu[i]), fmt(nu[j]), fmt(dens[i, j])] for i, j in zip(i1.ravel(), i2.ravel())]
    return csv_text(["nu1", "nu2", "density"], rows), EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "acf": cmd_acf,
    "psi": cmd_psi,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "equiv": cmd_equiv,
    "spectrum": cmd_spectrum,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"planar-ar {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputFormatError, LagRangeError) as exc:
        print(f"planar-ar {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PlanarARError as exc:
        print(f"planar-ar {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
