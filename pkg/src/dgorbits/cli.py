"""Command-line front end.

Commands: classes, orbits, verify, graph.  Exit codes: 0 success,
1 verification failure, 2 usage error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time

from dgorbits import analysis, mcg, tuples
from dgorbits.errors import GroupError, ResourceLimitError, VerificationError
from dgorbits.groups import FiniteGroup, from_generator_file, group_from_spec

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _norm_name(name: str) -> str:
    return re.sub(r"[^0-9a-zA-Z]", "", name).lower()


def resolve_group(args) -> FiniteGroup:
    if args.group_file:
        return from_generator_file(args.group_file, cap=args.group_cap)
    if not args.group:
        raise GroupError("one of --group or --group-file is required")
    return group_from_spec(args.group)


def resolve_fiber(group: FiniteGroup, fiber: str):
    want = _norm_name(fiber)
    for cls in group.conjugacy_classes:
        if _norm_name(group.names[cls.representative]) == want:
            return cls
    raise GroupError(
        f"no conjugacy class named {fiber!r}; choices: "
        + ", ".join(_norm_name(group.names[c.representative]) for c in group.conjugacy_classes)
    )


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--group", help="builtin spec like S3, D4, Q8, A5, Z6, dihedral:7, Z2xZ2")
    p.add_argument("--group-file", help="file with one permutation generator per line")
    p.add_argument("--genus", type=int, default=1)
    p.add_argument("--fiber", help="restrict to the fiber of this conjugacy class (by element name)")
    p.add_argument("--budget", type=int, default=tuples.DEFAULT_CODE_BUDGET, help="tuple-code budget")
    p.add_argument("--group-cap", type=int, default=1024, help="cap on group order for closures")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("DGORBITS_THREADS", "1")),
        help="accepted for compatibility; computations are vectorized and outputs do not depend on it",
    )


def _open_out(args):
    return open(args.out, "w") if args.out else sys.stdout


def cmd_classes(args) -> int:
    group = resolve_group(args)
    fiber = resolve_fiber(group, args.fiber) if args.fiber else None
    table = tuples.enumerate_classes(group, args.genus, fiber=fiber, budget=args.budget)
    burnside = tuples.count_classes_burnside(group, args.genus)
    summary = {
        "schema": analysis.SCHEMA_VERSION,
        "group": group.name,
        "genus": args.genus,
        "classes": int(table.n_classes),
        "fibers": {
            group.names[group.conjugacy_classes[int(k)].representative]: int(len(v))
            for k, v in table.fiber_index.items()
        },
        "burnside_total": str(burnside),
        "burnside_matches": fiber is not None or burnside == table.n_classes,
    }
    out = _open_out(args)
    out.write(json.dumps(summary) + "\n")
    table.export_jsonl(out)
    if out is not sys.stdout:
        out.close()
    return EXIT_OK if summary["burnside_matches"] else EXIT_VERIFY


def cmd_orbits(args) -> int:
    group = resolve_group(args)
    fiber = resolve_fiber(group, args.fiber) if args.fiber else None
    table = tuples.enumerate_classes(group, args.genus, fiber=fiber, budget=args.budget)
    levels = [int(k) for k in args.congruence.split(",")] if args.congruence else None
    res = analysis.analyze_table(
        table,
        quotient_max_degree=args.quotient_max_degree,
        derived_index_max_degree=args.derived_index_max_degree,
        congruence_levels=levels,
        classify=not args.no_classify,
        cycle_types=args.cycle_types,
        seed=args.seed,
    )
    out = _open_out(args)
    analysis.write_report(res, out)
    if out is not sys.stdout:
        out.close()
    bw = mcg.check_boundary_trivial(table, res.cache)
    return EXIT_OK if (bw["as_written"] or bw["inverted"]) else EXIT_VERIFY


def cmd_graph(args) -> int:
    group = resolve_group(args)
    if args.genus != 1:
        raise GroupError("graphs are supported at genus 1 only")
    fiber = resolve_fiber(group, args.fiber) if args.fiber else None
    table = tuples.enumerate_classes(group, 1, budget=args.budget)
    out = _open_out(args)
    out.write(analysis.dot_graph(table, fiber=None if fiber is None else fiber.id))
    if out is not sys.stdout:
        out.close()
    return EXIT_OK


VERIFY_SUITES = ("hopf", "coend", "modular", "counting", "boundary-word", "torelli-theorem")


def cmd_verify(args) -> int:
    from dgorbits import double as dbl
    from dgorbits import modular as mod

    group = resolve_group(args)
    suites = args.suite.split(",") if args.suite else list(VERIFY_SUITES)
    results: dict[str, dict] = {}
    for suite in suites:
        if suite == "hopf":
            if group.order > args.hopf_cap:
                results[suite] = {"skipped": f"group order above the cap {args.hopf_cap}"}
                continue
            results[suite] = {k: bool(v) for k, v in dbl.verify_double_axioms(group).items()}
        elif suite == "coend":
            if group.order > args.coend_cap:
                results[suite] = {"skipped": f"group order above the cap {args.coend_cap}"}
                continue
            results[suite] = {k: bool(v) for k, v in dbl.verify_coend_axioms(group).items()}
        elif suite == "modular":
            md = mod.ModularData(group)
            table1 = tuples.enumerate_classes(group, 1, budget=args.budget)
            r = {k: bool(v) for k, v in mod.verify_modular_relations(md).items()}
            r["character_bridge"] = bool(mod.verify_character_bridge(md, table1))
            r["pairing_on_characters"] = bool(mod.hopf_pairing_on_characters(md, table1))
            results[suite] = r
        elif suite == "counting":
            burn = tuples.count_classes_burnside(group, args.genus)
            table = tuples.enumerate_classes(group, args.genus, budget=args.budget)
            r = {"burnside_matches_enumeration": burn == table.n_classes}
            if args.genus == 1:
                r["identity_fiber_formula"] = tuples.count_fiber_identity(group) == len(
                    table.fiber_classes(int(group.class_of[0]))
                )
                r["fiber_formula"] = all(
                    tuples.count_fiber(group, c.id) == len(table.fiber_classes(c.id))
                    for c in group.conjugacy_classes
                )
            results[suite] = r
        elif suite == "boundary-word":
            table = tuples.enumerate_classes(group, args.genus, budget=args.budget)
            bw = mcg.check_boundary_trivial(table)
            results[suite] = {**bw, "passes": bw["as_written"] or bw["inverted"]}
        elif suite == "torelli-theorem":
            r = {}
            for n in (2, 3):
                if group.order ** (2 * n) > args.budget:
                    r[f"genus{n}"] = "skipped (budget)"
                    continue
                table = tuples.enumerate_classes(group, n, budget=args.budget)
                r[f"genus{n}"] = bool(
                    mcg.torelli_trivial_predicted(group, n) == mcg.torelli_trivial_observed(table)
                )
            results[suite] = r
        else:
            raise GroupError(f"unknown verify suite {suite!r}; choices: {', '.join(VERIFY_SUITES)}")
    out = _open_out(args)
    json.dump({"schema": analysis.SCHEMA_VERSION, "group": group.name, "results": results}, out, indent=2)
    out.write("\n")
    if out is not sys.stdout:
        out.close()
    flat_ok = all(
        v is True or isinstance(v, str)
        for suite in results.values()
        for v in suite.values()
    )
    return EXIT_OK if flat_ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgorbits",
        description="Mapping class group orbits on 2N-conjugacy classes of a finite group",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classes", help="enumerate 2N-conjugacy classes")
    _add_common(p)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("orbits", help="orbit decomposition and per-orbit analysis")
    _add_common(p)
    p.add_argument("--quotient-max-degree", type=int, default=512)
    p.add_argument("--derived-index-max-degree", type=int, default=0)
    p.add_argument("--congruence", help="comma-separated levels to test (genus 1)")
    p.add_argument("--no-classify", action="store_true")
    p.add_argument("--cycle-types", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("graph", help="genus-1 action graph in DOT format")
    _add_common(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("verify", help="structural verification suites")
    _add_common(p)
    p.add_argument("--suite", help=f"comma list from {', '.join(VERIFY_SUITES)} (default all)")
    p.add_argument("--hopf-cap", type=int, default=24)
    p.add_argument("--coend-cap", type=int, default=12)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GroupError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
