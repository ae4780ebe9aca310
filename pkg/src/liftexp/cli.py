"""Command line interface.

Exit codes: 0 success, 2 invalid input, 3 algorithmic failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import identify, lift, order, tuples
from .errors import AlgorithmError, ValidationError
from .io import (
    BinnedCodeScheme,
    diagnostics_block,
    fmt,
    ingest_codes,
    load_sample,
    polygon_svg,
    read_oracle_csv,
    read_tuples,
    synthesize_codes,
    write_codes,
    write_intervals,
    write_oracle_csv,
    write_polygon_csv,
    write_reconstruction_csv,
)

EXIT_OK, EXIT_INVALID, EXIT_ALGORITHM = 0, 2, 3


def _scheme(args) -> BinnedCodeScheme:
    return BinnedCodeScheme(args.width, args.origin, args.max_code)


def _load(args, path=None):
    sample, rejected = load_sample(path or args.input, _scheme(args))
    if rejected:
        print(f"rejected {len(rejected)} rows", file=sys.stderr)
    return sample


def _grid(dim: int, count: int, seed: int):
    if dim == 1:
        return [(1.0,), (-1.0,)]
    if dim == 2:
        return list(order.DirectionGrid.angles(count))
    return list(order.DirectionGrid.seeded(dim, count, seed))


def _header(dim: int) -> str:
    return ",".join(f"u{i + 1}" for i in range(dim))


def _row(u, *rest) -> str:
    return ",".join([fmt(c) for c in u] + [fmt(x) if not isinstance(x, str) else x for x in rest])


def _support_table(out, sample, dirs, func):
    out.write(f"{_header(sample.dim)},value\n")
    for u in dirs:
        out.write(_row(u, func(u)) + "\n")


def cmd_mean(args, out):
    sample = _load(args)
    if sample.dim == 1:
        lo = -lift.expectation_support(sample, (-1,))
        hi = lift.expectation_support(sample, (1,))
        out.write(f"{fmt(lo)},{fmt(hi)}\n")
    else:
        dirs = _grid(sample.dim, args.dirs, args.seed)
        _support_table(out, sample, dirs, lambda u: lift.expectation_support(sample, u))


def cmd_polygon(args, out):
    poly = lift.polygon_1d(_load(args))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            write_polygon_csv(poly, fh)
    else:
        write_polygon_csv(poly, out)
    if args.svg:
        Path(args.svg).write_text(polygon_svg(poly), encoding="utf-8")


def cmd_trim(args, out):
    sample = _load(args)
    if sample.dim == 1:
        lo = -lift.trimmed_region_support(sample, args.alpha, (-1,))
        hi = lift.trimmed_region_support(sample, args.alpha, (1,))
        out.write(f"{fmt(lo)},{fmt(hi)}\n")
    else:
        dirs = _grid(sample.dim, args.dirs, args.seed)
        _support_table(out, sample, dirs, lambda u: lift.trimmed_region_support(sample, args.alpha, u))


def cmd_outliers(args, out):
    sample = _load(args)
    dirs = _grid(sample.dim, args.dirs, args.seed)
    out.write("index,outlier\n")
    for i, body in enumerate(sample.bodies):
        flag = lift.is_outlier(sample, args.alpha, body, dirs, args.tol)
        out.write(f"{i},{str(flag).lower()}\n")


def cmd_order(args, out):
    a, b = _load(args, args.first), _load(args, args.second)
    dirs = _grid(a.dim, args.dirs, args.seed)
    witness = order.inclusion_witness(a, b, dirs, args.tol)
    if witness is None:
        out.write("included\n")
        means = [(lift.expectation_support(a, u), lift.expectation_support(b, u)) for u in dirs]
        if all(abs(x - y) <= args.tol for x, y in means):
            out.write("# equal expectations on the grid\n")
        return
    u, t = witness
    out.write("not included\n")
    out.write(f"{_header(a.dim)},t\n")
    out.write(_row(u, "inf" if math.isinf(t) else fmt(t)) + "\n")


def cmd_gini(args, out):
    g = lift.gini_area(_load(args))
    out.write("area,gmd_upper\n")
    out.write(f"{fmt(g.area)},{fmt(g.gmd_upper)}\n")


def cmd_avar(args, out):
    lo, hi = lift.avar_interval(_load(args), args.alpha)
    out.write(f"{fmt(lo)},{fmt(hi)}\n")


def cmd_hoeffding(args, out):
    sample = _load(args)
    dirs = _grid(sample.dim, args.dirs, args.seed)
    out.write(f"n,{_header(sample.dim)},value\n")
    for k in range(1, args.n + 1):
        for u in dirs:
            out.write(f"{k}," + _row(u, lift.hoeffding_support(sample, k, u)) + "\n")


def _oracle(args):
    if args.oracle:
        return read_oracle_csv(args.input, dim=args.dim)
    sample = _load(args)
    if sample.dim == 1:
        path = [(1,), (-1,)]
    else:
        path = _grid(sample.dim, args.dirs, args.seed)
    return identify.marginal_oracle(sample, path, args.tol)


def cmd_oracle(args, out):
    write_oracle_csv(_oracle(args), out)


def cmd_reconstruct(args, out):
    result = identify.reconstruct(_oracle(args), args.mode)
    write_reconstruction_csv(result, out)
    out.write(diagnostics_block(result))


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse number list {text!r}") from exc


def cmd_tuple_eval(args, out):
    sample = read_tuples(args.input)
    u0s = _floats(args.u0)
    dims = sample.slot_dims
    out.write("u0," + ",".join(f"s{j + 1}u{i + 1}" for j, d in enumerate(dims) for i in range(d)) + ",value\n")
    for text in args.us:
        slots = [_floats(part) for part in text.split(";")]
        flat = [c for s in slots for c in s]
        curve = tuples.tuple_curve(sample, slots)
        for t in u0s:
            out.write(",".join(fmt(x) for x in (t, *flat, curve(t))) + "\n")


def cmd_codes(args, out):
    report = ingest_codes(args.input, _scheme(args))
    if report.rejected:
        print(f"rejected {report.n_rejected} rows", file=sys.stderr)
    write_intervals(report.sample, out)


def cmd_synth_codes(args, out):
    write_codes(synthesize_codes(args.n, args.seed, _scheme(args)), out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="liftexp", description="Lift expectations of random convex bodies.")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dirs", type=int, default=360, help="number of grid directions (d >= 2)")
    common.add_argument("--seed", type=int, default=0, help="seed of the direction grid for d >= 3")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--width", type=float, default=2499, help="code bin width")
    common.add_argument("--origin", type=float, default=0, help="left end of code 1")
    common.add_argument("--max-code", type=int, default=40)

    def add(name, func, help, inputs=("input",), tol=1e-12):
        sp = sub.add_parser(name, parents=[common], help=help)
        for i in inputs:
            sp.add_argument(i)
        sp.set_defaults(func=func, default_tol=tol)
        return sp

    add("mean", cmd_mean, "selection expectation E X")
    sp = add("polygon", cmd_polygon, "lift expectation polygon of interval data")
    sp.add_argument("--csv", help="write vertices here instead of stdout")
    sp.add_argument("--svg", help="also write an SVG drawing")
    sp = add("trim", cmd_trim, "trimmed region at level alpha")
    sp.add_argument("--alpha", type=float, required=True)
    sp = add("outliers", cmd_outliers, "flag bodies outside the trimmed region")
    sp.add_argument("--alpha", type=float, required=True)
    add("order", cmd_order, "lift-expectation inclusion of A in B", inputs=("first", "second"))
    add("gini", cmd_gini, "area of the lift polygon and the mean-difference bound")
    sp = add("avar", cmd_avar, "rescaled vertical section [lower AVaR, upper AVaR]")
    sp.add_argument("--alpha", type=float, required=True)
    sp = add("hoeffding", cmd_hoeffding, "E max of n copies of h_X(u), n = 1..N")
    sp.add_argument("--n", type=int, required=True)
    sp = add("oracle", cmd_oracle, "per-direction distributions of h_X(u)", tol=identify.MERGE_TOL)
    sp.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    sp.add_argument("--dim", type=int, default=2, help=argparse.SUPPRESS)
    sp = add("reconstruct", cmd_reconstruct, "recover realizations from the marginals", tol=identify.MERGE_TOL)
    sp.add_argument("--mode", choices=("distinct", "continuation", "comonotonic"), default="distinct")
    sp.add_argument("--oracle", action="store_true", help="input is an oracle CSV")
    sp.add_argument("--dim", type=int, default=2, help="dimension of an oracle CSV input")
    sp = add("tuple-eval", cmd_tuple_eval, "support of a tuple lift expectation")
    sp.add_argument("--u0", required=True, help="comma separated u0 values")
    sp.add_argument("--us", action="append", required=True, help="slot directions 'a,b;c,d' (repeatable)")
    add("codes", cmd_codes, "convert a code CSV into interval CSV")
    sp = add("synth-codes", cmd_synth_codes, "write a synthetic code CSV", inputs=())
    sp.add_argument("--n", type=int, default=1000)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.tol is None:
        args.tol = args.default_tol
    try:
        args.func(args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AlgorithmError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_ALGORITHM
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
