"""Command line interface: ``pcgroups <command> ...`` or ``python -m pcgroups``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import harness as hs
from . import subgroups as sg
from . import towers as tw
from .catalog import BUNDLED, CatalogError, compute_invariants, find_group, load_catalog
from .lattice import CpLatticeAction, DecompositionError, decompose
from .limits import DEFAULT_ENUM_CAP, BudgetExceeded, EnumerationCapExceeded, enumeration_cap
from .modpk import ModPkMatrix
from .pcp import PcpSyntaxError

DEFAULT_PRECISION = {3: 4, 5: 3}


class UsageError(Exception):
    pass


def _emit(payload: dict) -> None:
    sys.stdout.write(hs.dumps(payload))


def cmd_info(args) -> int:
    G = find_group(args.group)
    inv = compute_invariants(G)
    _emit({"schema": "pcgroups.info/1", "group": G.name, "p": G.p, "n": G.n,
           "order": G.order, **inv.as_dict()})
    return 0


def cmd_series(args) -> int:
    G = find_group(args.group)
    P = sg.lower_central_p_series(G)
    L = sg.lower_central_series(G)
    _emit({"schema": "pcgroups.series/1", "group": G.name,
           "p_series": {"indices": list(P.indices), "orders": list(P.orders)},
           "gamma_series": {"indices": list(L.indices), "orders": list(L.orders)}})
    return 0


def cmd_predicates(args) -> int:
    G = find_group(args.group)
    om = sg.omega1(G)
    hered = sg.is_hereditarily_powerful(G) if G.n <= sg.SUBGROUP_ORDER_LIMIT_EXP else None
    _emit({"schema": "pcgroups.predicates/1", "group": G.name,
           "abelian": sg.is_abelian(G),
           "elementary_abelian": sg.is_elementary_abelian(sg.whole_group(G)),
           "powerful": sg.is_powerful(G),
           "potent": sg.is_potent(G),
           "p_central": sg.is_p_central(G),
           "omega1_elementary_abelian": sg.is_elementary_abelian(om),
           "uniform_segment": sg.uniform_segment(G),
           "hereditarily_powerful": hered})
    return 0


def cmd_subgroups(args) -> int:
    G = find_group(args.group)
    j = None
    if args.max_index is not None:
        j = round(math.log(args.max_index, G.p)) if args.max_index > 1 else 0
        if G.p**j != args.max_index:
            raise UsageError(f"--max-index must be a power of {G.p}")
    subs = []
    for H in sg.all_subgroups(G, max_index_exp=j):
        subs.append({"order": H.order, "index": G.order // H.order,
                     "igs": [list(x) for x in H.igs], "normal": H.is_normal,
                     "powerful": sg.is_powerful(H), "d": sg.min_generators(H)})
    subs.sort(key=lambda s: (-s["order"], s["igs"]))
    _emit({"schema": "pcgroups.subgroups/1", "group": G.name, "count": len(subs), "subgroups": subs})
    return 0


def cmd_decompose(args) -> int:
    k = args.k or args.precision or DEFAULT_PRECISION.get(args.p, 3)
    try:
        M = ModPkMatrix.from_text(Path(args.matrix).read_text(encoding="utf-8"), args.p, k)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read matrix: {exc}") from None
    res = decompose(CpLatticeAction(M))
    out = {"m1": res.m1, "m2": res.m2, "m3": res.m3}
    if args.certificate:
        out = res.as_dict()
        out["schema"] = "pcgroups.decompose/1"
        sys.stdout.write(hs.dumps(out))
    else:
        sys.stdout.write(json.dumps(out, separators=(",", ":")) + "\n")
    return 0


def cmd_tower(args) -> int:
    spec = tw.TowerSpec.parse(args.spec)
    checks = tuple(c.strip() for c in args.checks.split(",")) if args.checks else tw.CHECKS
    unknown = [c for c in checks if c not in tw.CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; choose from {list(tw.CHECKS)}")
    rows = [
        {"group": r.tower, "check": r.check, "status": r.status, "detail": r.detail}
        for r in tw.run_checks(spec, checks)
    ]
    res = hs.SuiteResult(rows, {})
    payload = res.to_json()
    payload["tower"] = spec.format()
    _emit(payload)
    return res.exit_code


def cmd_harness(args) -> int:
    entries = load_catalog(args.catalog)
    res = hs.run_question_harness(entries, jobs=args.jobs)
    if args.csv:
        sys.stdout.write(hs.verdicts_to_csv(res))
    else:
        _emit(res.to_json())
    if res.critical:
        groups = {e.name: e.group for e in entries}
        for v in res.critical:
            path = hs.write_reproducer(groups[v.group], v, Path(args.reproducer_dir))
            sys.stderr.write(hs.render_critical(v) + f"\n  reproducer: {path}\n")
    return res.exit_code


def cmd_suite(args) -> int:
    entries = load_catalog(args.catalog)
    towers = hs.load_tower_file(args.towers) if args.towers else []
    res = hs.run_invariant_suite(entries, towers, jobs=args.jobs)
    if args.csv:
        sys.stdout.write(hs.rows_to_csv(res.rows))
    else:
        _emit(res.to_json())
    return res.exit_code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcgroups", description="Finite p-group engine and evidence harness.")
    ap.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP,
                    help="largest element set enumerated (default %(default)s)")
    ap.add_argument("--precision", type=int, default=None, help="working p-adic precision k")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, helptext in [
        ("info", cmd_info, "invariants as JSON"),
        ("series", cmd_series, "P-series and gamma-series profiles"),
        ("predicates", cmd_predicates, "structural predicates"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("group", help="bundled group name or a .pcp file")
        p.set_defaults(func=fn)

    p = sub.add_parser("subgroups", help="list subgroups")
    p.add_argument("group")
    p.add_argument("--max-index", type=int, default=None, help="only subgroups of index at most this")
    p.set_defaults(func=cmd_subgroups)

    p = sub.add_parser("decompose", help="I/J/K multiplicities of a C_p-lattice")
    p.add_argument("--matrix", required=True, help="file of whitespace-separated integer rows")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--certificate", action="store_true", help="include SNF divisors")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("tower", help="run checks on a tower quotient")
    p.add_argument("spec", help="family:p:d:s:sign:n")
    p.add_argument("--checks", default=None, help=f"comma list from {','.join(tw.CHECKS)}")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("harness", help="question harness over a catalog")
    p.add_argument("--catalog", default=BUNDLED)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--csv", action="store_true")
    p.add_argument("--reproducer-dir", default=".", help="where counterexample files go")
    p.set_defaults(func=cmd_harness)

    p = sub.add_parser("suite", help="invariant suite over a catalog and towers")
    p.add_argument("--catalog", default=BUNDLED)
    p.add_argument("--towers", default=None, help="file with one 'tower ...' line each")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_suite)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.enum_cap < 1 or args.jobs < 1:
        sys.stderr.write("pcgroups: --enum-cap and --jobs must be positive\n")
        return hs.EXIT_USAGE
    try:
        with enumeration_cap(args.enum_cap):
            return args.func(args)
    except (UsageError, CatalogError, PcpSyntaxError, tw.TowerSpecError, FileNotFoundError) as exc:
        sys.stderr.write(f"pcgroups: {exc}\n")
        return hs.EXIT_USAGE
    except (DecompositionError, EnumerationCapExceeded, BudgetExceeded) as exc:
        sys.stderr.write(f"pcgroups: {exc}\n")
        return hs.EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
