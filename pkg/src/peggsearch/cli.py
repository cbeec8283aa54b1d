"""Command-line driver.

Machine-readable results go to stdout as one JSON object per line; human
summaries go to stderr.

Exit codes: 0 success, 1 nothing found / equation false, 2 usage error,
3 data or cache error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import List, Optional

from .equations import (
    NoSolution,
    ParseError,
    ResultantEquation,
    convert_to_resultant,
    generate_identity,
    parse_equation,
    pegg_report,
    reassociate_min,
    validate_original,
)
from .residue_tables import (
    GIB,
    BudgetExceeded,
    TableFileError,
    build_elimination_table,
    build_skipahead_table,
    default_spec,
    load_table,
    measure_rates,
    save_table,
    table_path,
)
from .search import EmptyRange, Exhausted, SearchConfig, ladder, search_all, search_once
from .validation import (
    check_coefficients,
    check_exponents,
    check_permutations,
    size_bound,
)

EXIT_OK, EXIT_NOT_FOUND, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3
TABLES_ENV = "PEGG_TABLES_DIR"

log = logging.getLogger("peggsearch")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    sys.stdout.flush()


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _resultant_dict(res: ResultantEquation) -> dict:
    if not res.holds():
        raise DataError(f"resultant equation does not hold: {res}")
    out = res.to_dict()
    out["equation"] = str(res)
    out.update(pegg_report(res).to_dict())
    return out


def _tables_dir(args) -> Optional[str]:
    return args.tables_dir or os.environ.get(TABLES_ENV) or None


def _bounds(args):
    s_max = size_bound(args.smax_log2, args.smax_exact, "s_max")
    s_min = size_bound(args.smin_log2, None, "s_min") or 1
    if s_max is None:
        raise UsageError("give --smax-log2 or --smax-exact")
    return s_min, s_max


def cmd_convert(args) -> int:
    try:
        eq = parse_equation(args.equation)
    except ParseError as exc:
        raise UsageError(str(exc))
    check = validate_original(eq)
    if not check.ok:
        raise DataError("; ".join(check.violations))
    try:
        res = convert_to_resultant(eq)
    except NoSolution as exc:
        raise DataError(str(exc))
    if args.reassociate:
        s_max = size_bound(args.smax_log2, args.smax_exact, "s_max") or res.size
        res = reassociate_min(res, s_max)
    out = {"original": str(eq), "valid": True}
    out.update(_resultant_dict(res))
    _emit(out)
    rep = pegg_report(res)
    _say(f"{eq}  ->  {res}")
    _say(f"Pegg Value {rep.pegg_value}, Pegg Power {rep.pegg_power:.4f}, "
         f"log2 size {rep.log2_size:.2f}{', stolen' if rep.stolen else ''}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        eq = parse_equation(args.equation)
    except ParseError as exc:
        raise UsageError(str(exc))
    holds = eq.holds()
    out = {"equation": str(eq), "holds": holds}
    if holds and max(eq.coefficients) == 1:
        res = ResultantEquation(eq.exps, eq.a, eq.b, eq.c, 1, 1, 1, 1, eq.permutation)
        rep = pegg_report(res).to_dict()
        # coefficients are unknown for a bare equation, so "stolen" is meaningless
        rep.pop("stolen")
        out.update(rep)
    _emit(out)
    _say(f"{eq}: {'holds' if holds else 'does NOT hold'}")
    return EXIT_OK if holds else EXIT_NOT_FOUND


def _search_config(args, s_min, s_max) -> SearchConfig:
    kw = dict(
        exps=check_exponents(args.exps),
        s_min=s_min,
        s_max=s_max,
        min_pegg=args.min_pegg,
        workers=args.workers,
        coefficients=check_coefficients(args.coeffs),
        tables_dir=_tables_dir(args),
        single_coefficients=not args.no_single_coeff,
    )
    perms = check_permutations(args.permutations)
    if perms:
        kw["permutations"] = perms
    return SearchConfig(**kw)


def _maybe_build_tables(config: SearchConfig, args) -> None:
    if not args.build_tables:
        return
    directory = config.tables_dir
    if directory is None:
        raise UsageError(f"--build-tables needs --tables-dir or {TABLES_ENV}")
    Path(directory).mkdir(parents=True, exist_ok=True)
    for perm in config.permutations:
        spec = config.spec_for(perm)
        for kind, build in (("elim", build_elimination_table), ("skip", build_skipahead_table)):
            path = table_path(directory, spec, kind)
            if not path.exists():
                n = save_table(build(spec), path)
                _say(f"wrote {path} ({n / GIB:.3f} GiB)")


def cmd_search(args) -> int:
    s_min, s_max = _bounds(args)
    config = _search_config(args, s_min, s_max)
    _maybe_build_tables(config, args)
    t0 = time.time()
    if args.all:
        stats: dict = {}
        records = search_all(config, stats)
        for rec in records:
            _emit(rec.to_dict())
        _say(f"{len(records)} record(s) in {time.time() - t0:.1f}s; stats {stats}")
        return EXIT_OK if records else EXIT_NOT_FOUND
    result = search_once(config)
    if isinstance(result, Exhausted):
        _emit({"exhausted": True, "stats": result.stats})
        _say(f"exhausted: no equation with Pegg Value >= {config.min_pegg} "
             f"in sizes [{s_min}, {s_max}] ({time.time() - t0:.1f}s)")
        return EXIT_NOT_FOUND
    _emit(result.to_dict())
    _say(f"found {result.original} -> {result.resultant}, Pegg Value "
         f"{result.report.pegg_value} ({time.time() - t0:.1f}s)")
    return EXIT_OK


def cmd_ladder(args) -> int:
    s_min, s_max = _bounds(args)
    config = _search_config(args, s_min, s_max)
    _maybe_build_tables(config, args)
    _say(f"{'log2':>8} {'Pegg':>8} {'Power':>7}  original equation")

    def show(row):
        _emit(row.to_dict())
        _say(f"{row.log2_size:8.2f} {row.pegg_value:8d} {row.pegg_power:7.4f}  "
             f"{row.record.original}")

    rows = ladder(config, progress=show)
    return EXIT_OK if rows else EXIT_NOT_FOUND


def _table_spec(args):
    exps = check_exponents(args.exps)
    spec = default_spec(exps, args.perm, args.single_coeff or 0,
                        int(args.budget_gib * GIB))
    return spec


def cmd_tables(args) -> int:
    spec = _table_spec(args)
    skip = build_skipahead_table(spec, check_budget=False)
    projected = skip.projected_bytes()
    elim = build_elimination_table(spec)
    info = {
        "exponents": list(spec.exps),
        "permutation": spec.permutation.value,
        "coefficient": spec.coefficient,
        "elimination_moduli": elim.moduli,
        "skipahead_modulus": spec.skip_modulus,
        "skipahead_bytes": projected,
        "skipahead_gib": round(projected / GIB, 3),
        "budget_gib": round(spec.budget_bytes / GIB, 3),
    }
    if args.action == "info":
        directory = _tables_dir(args)
        if directory:
            for kind in ("elim", "skip"):
                path = table_path(directory, spec, kind)
                if path.exists():
                    load_table(path, expect=spec)
                info[f"{kind}_cached"] = path.exists()
        _emit(info)
        _say(f"skipahead M={spec.skip_modulus}: {projected / GIB:.2f} GiB projected")
        return EXIT_OK
    if projected > spec.budget_bytes:
        raise BudgetExceeded(projected, spec.budget_bytes)
    _say(f"skipahead M={spec.skip_modulus}: {projected / GIB:.2f} GiB projected")
    if not args.dry_run:
        directory = _tables_dir(args)
        if directory is None:
            raise UsageError(f"tables build needs --tables-dir or {TABLES_ENV} (or --dry-run)")
        Path(directory).mkdir(parents=True, exist_ok=True)
        for kind, table in (("elim", elim), ("skip", skip)):
            path = table_path(directory, spec, kind)
            info[f"{kind}_path"] = str(path)
            info[f"{kind}_written"] = save_table(table, path)
            _say(f"wrote {path}")
    _emit(info)
    return EXIT_OK


def cmd_rates(args) -> int:
    exps = check_exponents(args.exps)
    perms = [args.perm] if args.perm else ["ax_minus_cz", "cz_minus_ax"]
    for perm in perms:
        spec = default_spec(exps, perm)
        elim, skip, comb = measure_rates(spec, f_limit=args.f_limit)
        _emit({"exponents": list(exps), "permutation": perm, "f_limit": args.f_limit,
               "elimination": round(elim, 3), "skipahead": round(skip, 3),
               "combined": round(comb, 3)})
        _say(f"{tuple(exps)} {perm}: {elim:.3f} / {skip:.3f} / {comb:.3f}")
    return EXIT_OK


def cmd_identity(args) -> int:
    if args.pegg < 2:
        raise UsageError("--pegg must be >= 2")
    if args.x < 3:
        raise UsageError("--x must be >= 3")
    res = generate_identity(args.pegg, args.x)
    out = _resultant_dict(res)
    if pegg_report(res).pegg_value != args.pegg:
        raise DataError("identity did not reproduce the requested Pegg Value")
    _emit(out)
    _say(f"{res}  (Pegg Value {args.pegg}, log2 size {out['log2_size']:.2f})")
    return EXIT_OK


def _add_search_flags(p) -> None:
    p.add_argument("--exps", required=True, help="exponents x,y,z with the coefficient on z")
    p.add_argument("--smin-log2", type=float, default=None)
    p.add_argument("--smax-log2", type=float, default=None)
    p.add_argument("--smax-exact", type=int, default=None, help="exact size bound (overrides --smax-log2)")
    p.add_argument("--min-pegg", type=int, default=2)
    p.add_argument("--tables-dir", default=None, help=f"table cache directory (default ${TABLES_ENV})")
    p.add_argument("--build-tables", action="store_true", help="write missing standard tables first")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--coeffs", default=None, help="comma-separated coefficient list")
    p.add_argument("--permutations", default=None, help="ax_minus_cz,cz_minus_ax")
    p.add_argument("--no-single-coeff", action="store_true",
                   help="use the standard skipahead table for every coefficient")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="peggsearch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convert", help="convert an original equation to a resultant one")
    p.add_argument("equation")
    p.add_argument("--reassociate", action="store_true")
    p.add_argument("--smax-log2", type=float, default=None)
    p.add_argument("--smax-exact", type=int, default=None)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("verify", help="check that an equation holds")
    p.add_argument("equation")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="find the first equation at or above --min-pegg")
    _add_search_flags(p)
    p.add_argument("--all", action="store_true", help="report every qualifying equation")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("ladder", help="smallest equations with increasing Pegg Values")
    _add_search_flags(p)
    p.set_defaults(func=cmd_ladder)

    p = sub.add_parser("tables", help="build or inspect residue table caches")
    p.add_argument("action", choices=["build", "info"])
    p.add_argument("--exps", required=True)
    p.add_argument("--perm", default="cz_minus_ax", choices=["ax_minus_cz", "cz_minus_ax"])
    p.add_argument("--single-coeff", type=int, default=0)
    p.add_argument("--budget-gib", type=float, default=4.0)
    p.add_argument("--tables-dir", default=None)
    p.add_argument("--dry-run", action="store_true", help="report sizes without writing")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("rates", help="measure elimination and skipahead rates")
    p.add_argument("--exps", required=True)
    p.add_argument("--perm", default=None, choices=["ax_minus_cz", "cz_minus_ax"])
    p.add_argument("--f-limit", type=int, default=100000)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("identity", help="identity equation with a chosen Pegg Value")
    p.add_argument("--pegg", type=int, required=True)
    p.add_argument("--x", type=int, default=3)
    p.set_defaults(func=cmd_identity)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _say(f"usage error: {exc}")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, EmptyRange) as exc:
        _say(f"usage error: {exc}")
        return EXIT_USAGE
    except ValueError as exc:
        if isinstance(exc, TableFileError):
            _say(f"table cache error: {exc}")
            return EXIT_DATA
        _say(f"usage error: {exc}")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        _say(f"budget exceeded: projected {exc.projected / GIB:.2f} GiB > "
             f"{exc.budget / GIB:.2f} GiB")
        _emit({"error": "budget_exceeded", "projected_bytes": exc.projected,
               "budget_bytes": exc.budget})
        return EXIT_DATA
    except (DataError, NoSolution, OSError) as exc:
        _say(f"data error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
