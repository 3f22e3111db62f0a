"""Command-line front end.

Exit status: 0 success, 1 invalid input, 2 internal verification failure
(a reproduction bundle is written to the cache directory).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import shutil
import sys
import traceback
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from . import abel, averages, constant, counting, permgrp
from . import quadfield as qf

FORMATS = ("table", "json", "csv")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    threads: int
    precision: int
    cache_dir: Path
    format: str

    def __post_init__(self):
        if self.precision < 64:
            raise UsageError("--precision must be at least 64 bits")
        if self.threads < 1:
            raise UsageError("--threads must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def int_arg(text: str) -> int:
    """Exact integers, also in scientific notation such as 1e6."""
    try:
        val = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if val != val.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(val)


def _digits(bits: int) -> int:
    return min(17, math.ceil(bits * math.log10(2)))


def _num(x, cfg: RunConfig):
    """Floats rounded to the significant digits --precision allows (at most a double's 17)."""
    if isinstance(x, float):
        return float(f"{x:.{_digits(cfg.precision)}g}")
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {k: _num(v, cfg) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v, cfg) for v in x]
    return x


# --- commands ------------------------------------------------------------------


def cmd_classify(args, cfg):
    gens = permgrp.parse_generators(";".join(args.generators), args.degree)
    H = permgrp.generate(gens, args.degree)
    a, w = permgrp.a_invariant(H)
    rep = {"degree": H.degree, "order": H.order, "transitive": H.is_transitive(),
           "nilpotent": permgrp.is_nilpotent(H), "a": a, "a_witness": str(w)}
    if rep["transitive"] and rep["nilpotent"]:
        rep["classification"] = permgrp.classify_nilpotent(H).to_dict()
    if rep["transitive"]:
        rep["verdict"] = permgrp.coverage_verdict(H).to_dict()
    return rep


def cmd_verify(args, cfg):
    if not 2 <= args.max_degree <= permgrp.MAX_ENUM_DEGREE:
        raise UsageError(f"--max-degree must be in 2..{permgrp.MAX_ENUM_DEGREE}")
    rep = permgrp.verify_classification(args.max_degree)
    rep["groups_per_degree"] = {str(k): v for k, v in rep["groups_per_degree"].items()}
    rep["violation_count"] = len(rep["violations"])
    if rep["violations"]:
        raise permgrp.VerificationError(f"{len(rep['violations'])} violations: {rep['violations'][:3]}")
    return rep


def cmd_quad(args, cfg):
    cache = qf.FieldCache(cfg.cache_dir / "quadfields.csv") if args.use_cache else None
    rec = cache.get(args.disc, cfg.precision) if cache else qf.field_data(args.disc, cfg.precision)
    rep = {"D": rec.D, "h": rec.h, "h_narrow": rec.h_narrow, "invariant_factors": list(rec.invariant_factors),
           "h2": rec.h2, "h3": rec.h3, "h6": rec.h6, "w": rec.w, "r1": rec.r1, "r2": rec.r2,
           "regulator": rec.regulator, "residue": rec.residue, "zeta2": rec.zeta2}
    if rec.D > 0:
        u = qf.fundamental_unit(rec.D, cfg.precision)
        rep["unit"] = {"x": str(u.x), "y": str(u.y), "norm": u.norm,
                       "regulator": mpmath.nstr(u.regulator, math.floor(cfg.precision * math.log10(2)) - 2)}
    return rep


def cmd_dh_average(args, cfg):
    cps = counting.geometric_checkpoints(args.limit, count=args.checkpoints)
    tab = qf.torsion_table(args.limit, cfg.threads)
    sign = {"imag": "imaginary", "real": "real", "both": "both", "imaginary": "imaginary"}[args.sign]
    series = averages.dh_average(sign, args.limit, cps, table=tab)
    gaps = averages.compare_to_constant(series, averages.LIMITS[sign])
    rows = [{"X": p.X, "field_count": p.field_count, "sum_h3": p.sum_h3, "mean_h3": str(p.mean_h3),
             "mean_h3_float": float(p.mean_h3), "gap": float(g)}
            for p, (_, _, g) in zip(series.checkpoints, gaps.rows)]
    return {"sign": sign, "limit": args.limit, "target": str(gaps.c), "gap_shrinking": gaps.shrinking, "rows": rows}


def cmd_count(args, cfg):
    cps = counting.geometric_checkpoints(args.limit, count=args.checkpoints) if args.checkpoints else None
    fam = args.family.upper()
    if fam == "C2":
        s = counting.count_quadratic(args.limit, cps, threads=cfg.threads)
    elif fam in ("C3", "C5", "C7"):
        s = counting.count_cyclic(int(fam[1]), args.limit, cps)
    else:
        raise UsageError("--family must be C2, C3, C5 or C7")
    rep = {"family": s.family, "limit": args.limit, "rows": s.to_rows()}
    if len(s.checkpoints) >= 5 and args.fit:
        try:
            rep["fit"] = counting.fit_exponent(s).to_dict()
        except ValueError as exc:
            rep["fit"] = {"error": str(exc)}
    return rep


def cmd_moments(args, cfg):
    cps = counting.geometric_checkpoints(args.limit, count=args.checkpoints) if args.checkpoints else None
    s = counting.moment_series(args.kind, args.limit, cps, threads=cfg.threads)
    rep = {"kind": args.kind, "family": s.family, "limit": args.limit, "rows": s.to_rows()}
    if args.fit:
        rep["fit"] = counting.fit_exponent(s).to_dict()
    return rep


def cmd_constant(args, cfg):
    if args.from_table:
        tc = constant.c_from_table(args.from_table)
        return {"source": str(args.from_table), **tc.to_dict()}
    if args.h == "trivial":
        c = constant.c_trivial_H()
        num, den = constant.c_trivial_H_sums()
        return {"H": "trivial", "value": str(c), "numerator": num, "denominator": den}
    cache = qf.FieldCache(cfg.cache_dir / "quadfields.csv") if args.use_cache else None
    tc = constant.c_truncated_C2(args.trunc, threads=cfg.threads, cache=cache, prec=cfg.precision)
    return {"H": "C2", **tc.to_dict()}


def cmd_abel(args, cfg):
    grid = abel.default_grid(2 if args.grid == "fine" else 1)
    rep = abel.tail_bound_experiment(args.delta, args.eps, grid)
    out = rep.to_dict()
    if args.check_final_shape:
        out["final_shape"] = abel.final_shape_check(args.delta, grid)
    return out


def cmd_export_cache(args, cfg):
    cache = qf.FieldCache(cfg.cache_dir / "quadfields.csv")
    recs = constant.quadratic_records(args.limit, cfg.threads, cache, cfg.precision)
    bound = constant.quadratic_term_bound(args.limit)
    constant.export_table(recs, args.out, complete_up_to=args.limit, term_bound=bound)
    return {"out": str(args.out), "rows": len(recs), "complete_up_to": args.limit,
            "term_bound": list(bound), "cache": str(cache.path)}


def cmd_import_fields(args, cfg):
    tc = constant.c_from_table(args.path, args.label)
    dest = cfg.cache_dir / "tables" / f"{args.label}.csv"
    dest.parent.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(args.path, dest)
    return {"label": args.label, "stored": str(dest), **tc.to_dict()}


COMMANDS = {
    "classify": cmd_classify, "verify-classification": cmd_verify, "quad": cmd_quad,
    "dh-average": cmd_dh_average, "count": cmd_count, "moments": cmd_moments,
    "constant": cmd_constant, "abel-check": cmd_abel, "export-cache": cmd_export_cache,
    "import-fields": cmd_import_fields,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table")
    common.add_argument("--json", dest="format", action="store_const", const="json", help="same as --format json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--precision", type=int, default=qf.DEFAULT_PREC, help="bits, at least 64")
    common.add_argument("--cache-dir", type=Path, default=None, help="default: $TORSION3_CACHE or ~/.cache/torsion3")

    p = _Parser(prog="torsion3", description="3-torsion statistics toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", parents=[common], help="invariants and coverage verdict of a permutation group")
    s.add_argument("generators", nargs="+", help='cycle notation "(1 2 3)(4 5)" or image list "2,3,1"; ";" separates')
    s.add_argument("--degree", type=int)

    s = sub.add_parser("verify-classification", parents=[common])
    s.add_argument("--max-degree", type=int, default=permgrp.MAX_ENUM_DEGREE)

    s = sub.add_parser("quad", parents=[common], help="arithmetic data of one quadratic field")
    s.add_argument("--disc", type=int_arg, required=True)
    s.add_argument("--use-cache", action="store_true")

    s = sub.add_parser("dh-average", parents=[common])
    s.add_argument("--sign", choices=("imaginary", "imag", "real", "both"), default="both")
    s.add_argument("--limit", type=int_arg, default=10**6)
    s.add_argument("--checkpoints", type=int, default=12)

    s = sub.add_parser("count", parents=[common])
    s.add_argument("--family", default="C2")
    s.add_argument("--limit", type=int_arg, required=True)
    s.add_argument("--checkpoints", type=int, default=0, help="number of geometric checkpoints (default 10 per decade)")
    s.add_argument("--fit", action="store_true", help="add a log-log fit without the smallest decade")

    s = sub.add_parser("moments", parents=[common])
    s.add_argument("--kind", choices=counting.MOMENT_KINDS, default="h2_23_h3")
    s.add_argument("--limit", type=int_arg, required=True)
    s.add_argument("--checkpoints", type=int, default=0)
    s.add_argument("--fit", action="store_true")

    s = sub.add_parser("constant", parents=[common])
    s.add_argument("--h", choices=("trivial", "C2"), default="trivial")
    s.add_argument("--trunc", type=int_arg, default=10**4)
    s.add_argument("--from-table", type=Path)
    s.add_argument("--use-cache", action="store_true")

    s = sub.add_parser("abel-check", parents=[common])
    s.add_argument("--delta", type=float, default=0.2)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--grid", choices=("default", "fine"), default="default")
    s.add_argument("--check-final-shape", action="store_true")

    s = sub.add_parser("export-cache", parents=[common], help="write the quadratic-field table for --from-table")
    s.add_argument("--limit", type=int_arg, required=True)
    s.add_argument("--out", type=Path, required=True)

    s = sub.add_parser("import-fields", parents=[common], help="validate and store an external field table")
    s.add_argument("path", type=Path)
    s.add_argument("--label", required=True)
    return p


# --- rendering -------------------------------------------------------------------


def _table_rows(rep: dict) -> list[dict] | None:
    rows = rep.get("rows")
    if isinstance(rows, list) and rows and isinstance(rows[0], dict):
        return rows
    return None


def render(rep: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rep, indent=2) + "\n"
    rows = _table_rows(rep)
    if fmt == "csv":
        if rows is None:
            rows = [{k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in rep.items()}]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    lines = []
    for k, v in rep.items():
        if k == "rows" and rows is not None:
            continue
        lines.append(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    if rows is not None:
        cols = list(rows[0])
        cells = [[str(r[c]) for c in cols] for r in rows]
        width = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.rjust(wd) for c, wd in zip(cols, width)))
        lines.extend("  ".join(x.rjust(wd) for x, wd in zip(r, width)) for r in cells)
    return "\n".join(lines) + "\n"


def _bundle(cfg: RunConfig, argv: list[str]) -> Path:
    key = hashlib.sha256("\0".join(argv).encode()).hexdigest()[:12]
    path = cfg.cache_dir / "repro" / f"{cfg.command}-{key}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"argv": argv, "version": __version__, "traceback": traceback.format_exc()}, indent=2))
    return path


VALIDATION_ERRORS = (UsageError, ValueError, ZeroDivisionError, FileNotFoundError, KeyError)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        cache_dir = args.cache_dir or qf.default_cache_dir()
        cfg = RunConfig(args.command, args.threads, args.precision, Path(cache_dir), args.format)
        rep = _num(COMMANDS[args.command](args, cfg), cfg)
    except (permgrp.VerificationError, RuntimeError, AssertionError) as exc:
        where = _bundle(cfg, argv) if "cfg" in locals() else None
        print(f"internal verification failure: {exc}", file=sys.stderr)
        if where:
            print(f"reproduction bundle: {where}", file=sys.stderr)
        return 2
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render(rep, cfg.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
