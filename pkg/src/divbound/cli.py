"""Command-line front end: ``divbound {tables,bound,search,code,pep}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import algebra, discbounds, lattice, numfields, primesearch
from .kernels import DEFAULT_QUAD, KernelError, QuadratureConfig, QuadratureError

SIG_DIGITS = 12


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, float):
        return float(f"{v:.{SIG_DIGITS}g}") if math.isfinite(v) else str(v)
    if isinstance(v, int) and abs(v) >= 2**53:
        return str(v)
    if isinstance(v, dict):
        return {k: _fmt(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    return v


def _csv_cell(v):
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else v


def _emit(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(_fmt(rows), indent=1) + "\n")
        return
    if not rows:
        return
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_cell(v) for k, v in r.items()})
    out.write(buf.getvalue())


def _quad_config(args) -> QuadratureConfig:
    return QuadratureConfig(args.rel_tol, args.upper_cut, args.series_tol)


def _require_witnesses() -> None:
    failed = [w.name for w in primesearch.witness_inequalities() if not w.holds]
    if failed:
        raise primesearch.SearchError(f"witness inequalities failed: {failed}")


def _y0(text: str) -> float:
    v = float(text)
    if v not in primesearch.Y0_VALUES:
        raise argparse.ArgumentTypeError(f"y0 must be 0.1 or 2, got {text}")
    return v


def cmd_tables(args, out) -> None:
    _require_witnesses()
    rows = primesearch.table(args.case, args.y0)
    if args.format == "csv":
        out.write(primesearch.table_csv(rows, group=args.group))
        return
    _emit([{"case": r.case.value, "y0": r.y0, "n": r.n, "p1": r.pair.p1, "p2": r.pair.p2,
            "objective_log": r.pair.value_log, "region": r.region.describe()} for r in rows],
          "json", out)


def cmd_bound(args, out) -> None:
    cfg = _quad_config(args)
    if args.naive:
        if args.d is None or args.n is None:
            raise discbounds.BoundError("--naive needs --d and --n")
        _emit([discbounds.naive_bound(args.d, args.n, cfg).to_row()], args.format, out)
        return
    _require_witnesses()
    for name in ("case", "r1", "r2", "n", "y0"):
        if getattr(args, name) is None:
            raise discbounds.BoundError(f"bound needs --{name.replace('_', '-')} (or --naive)")
    omega = args.omega if args.omega is not None else (0 if args.case == 1 else args.r1)
    sig = discbounds.AlgebraSignature(omega, args.r1, args.r2, args.n)
    found = discbounds.theorem_case(sig)
    if found.value != args.case:
        raise discbounds.BoundError(
            f"signature (omega={omega}, r1={args.r1}, r2={args.r2}, n={args.n}) belongs to case {found.value}")
    rows = [discbounds.theorem_bound(sig, args.y0, args.y, cfg).to_row()]
    try:
        rows.append(discbounds.corollary_bound(sig, args.y0, cfg).to_row())
    except discbounds.BoundError as exc:
        print(f"note: {exc}", file=sys.stderr)
    if args.r1 == 0 and args.n >= 2:
        rows.append(discbounds.naive_bound(sig.d, args.n, cfg).to_row())
    _emit(rows, args.format, out)


def cmd_search(args, out) -> None:
    path = args.fields or numfields.fixture_path("deg4_totally_complex.json")
    table = numfields.load_field_table(path)
    res = numfields.optimal_center_search(table, args.n)
    top = res.ranking[:args.top] if args.top else res.ranking
    rows = [{"rank": i, "label": rc.field.label, "disc_K": rc.field.disc, "p1": rc.norms[0],
             "p2": rc.norms[1], "n": args.n, "disc_order": str(rc.disc.value),
             "disc_order_log": rc.disc.log} for i, rc in enumerate(top, 1)]
    print(f"cutoff |d_K| < {res.cutoff:.6g}; fixture complete up to {res.complete_upto}; "
          f"{'optimal' if res.complete else 'NOT certified optimal'}", file=sys.stderr)
    _emit(rows, args.format, out)


def _code_lattice(args):
    spec = algebra.load_algebra_spec(args.algebra)
    order = algebra.natural_order(spec)
    build = algebra.build_lattice_reg2 if args.construction == "reg2" else algebra.build_lattice_reg1
    return spec, build(spec, order)


def cmd_code(args, out) -> None:
    spec, lat = _code_lattice(args)
    rep = lattice.lattice_report(lat, args.radius, args.construction, spec.d, spec.n)
    rep["construction"] = args.construction
    rep["division_asserted"] = spec.division_asserted
    if args.export:
        with open(args.export, "w") as fh:
            fh.write(lattice.dumps_generators(lat) + "\n")
    _emit([rep], args.format, out)


def _rho_grid(text: str) -> list[float]:
    try:
        a, b, s = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("rho grid is start:stop:step in dB") from None
    if s <= 0 or b < a:
        raise argparse.ArgumentTypeError("rho grid needs step > 0 and stop >= start")
    count = int(math.floor((b - a) / s + 1e-9)) + 1
    return [a + i * s for i in range(count)]


def cmd_pep(args, out) -> None:
    spec, lat = _code_lattice(args)
    if args.construction == "reg2" and lat.blocks == 1:
        sq = lat
    else:
        sq = algebra.multiblock_diag(lat)
    code = lattice.shape_and_theta(sq, args.radius, args.T or sq.T)
    c = lattice.min_det(sq, args.radius, lattice.DetMode.ONE_SHOT).value
    rows = lattice.pep_table(code, args.nr, c, [10 ** (db / 10) for db in args.rho_grid])
    for r, db in zip(rows, args.rho_grid):
        r["rho_db"] = db
    _emit([{"rho_db": r.pop("rho_db"), **r} for r in rows], args.format, out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")
    common.add_argument("--rel-tol", type=float, default=DEFAULT_QUAD.rel_tol)
    common.add_argument("--upper-cut", type=float, default=DEFAULT_QUAD.upper_cut)
    common.add_argument("--series-tol", type=float, default=DEFAULT_QUAD.series_tol)
    p = argparse.ArgumentParser(prog="divbound", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", parents=[common], help="prime-power minimizers per (case, y0)")
    t.add_argument("--case", type=int, choices=(1, 2, 3), required=True)
    t.add_argument("--y0", type=_y0, required=True)
    t.add_argument("--group", action="store_true", help="collapse runs of n with the same pair")
    t.set_defaults(func=cmd_tables)

    b = sub.add_parser("bound", parents=[common], help="discriminant lower bounds")
    b.add_argument("--case", type=int, choices=(1, 2, 3))
    b.add_argument("--omega", type=int)
    b.add_argument("--r1", type=int)
    b.add_argument("--r2", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--y0", type=_y0)
    b.add_argument("--y", type=float)
    b.add_argument("--naive", action="store_true")
    b.add_argument("--d", type=int)
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("search", parents=[common], help="rank centers by minimal algebra discriminant")
    s.add_argument("--fields", help="field JSON (default: shipped degree-4 fixture)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--top", type=int, default=10)
    s.set_defaults(func=cmd_search)

    for name, fn, helptext in (("code", cmd_code, "lattice code report for an algebra"),
                               ("pep", cmd_pep, "pairwise-error union bounds over an SNR grid")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("--algebra", "--code", dest="algebra", required=True, help="algebra spec JSON")
        c.add_argument("--radius", type=float, default=3.0)
        c.add_argument("--construction", choices=("reg1", "reg2"), default="reg2")
        c.set_defaults(func=fn)
    sub.choices["code"].add_argument("--export", help="write generator matrices as JSON")
    pp = sub.choices["pep"]
    pp.add_argument("--rho-grid", type=_rho_grid, default=_rho_grid("10:40:5"))
    pp.add_argument("--nr", type=int, default=1)
    pp.add_argument("--T", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.output:
            with open(args.output, "w") as fh:
                args.func(args, fh)
        else:
            args.func(args, sys.stdout)
    except (primesearch.SearchError, discbounds.BoundError, numfields.FieldSchemaError,
            numfields.PrimeNormError, algebra.AlgebraError, lattice.LatticeError,
            KernelError, QuadratureError, OSError, ValueError) as exc:
        print(f"divbound {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
