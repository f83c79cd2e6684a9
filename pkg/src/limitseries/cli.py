"""Command-line interface.

Exit codes: 0 = ok / member, 1 = checked and negative, 2 = invalid input,
3 = method disagreement (equivalence violation; must never occur).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .corpus import (run_all_suites, suite_bridge, suite_choice_independence,
                     suite_classical, suite_concentration, suite_equiv_exhaustive,
                     suite_equiv_random, suite_linked_exhaustive,
                     suite_section_dimensions, suite_twist_calculus,
                     suite_window_stability)
from .curves import section_space
from .errors import LimitSeriesError
from .fields import field_from_spec
from .graphs import validate as validate_graph
from .instances import (REPORT_SCHEMA, dump_report, instance_from_json,
                        load_instance, multidegree_from_json, multidegree_to_json)
from .linked import (FlagPair, LinkedChain, complete_flags, curve_to_chain,
                     gen_random_chain, linked_det_membership, validate_linked_flags,
                     validate_s_linked)
from .multidegree import TwistMultiset, apply_multiset, concentrate
from .series import (is_lls_eh, is_lls_kernel, multidegree_key,
                     pairwise_kernel_check)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2
EXIT_DISAGREE = 3


def _report(args, payload, exit_code):
    payload = dict(payload)
    payload["schema"] = REPORT_SCHEMA
    payload["command"] = args.command
    if getattr(args, "seed", None) is not None:
        payload["seed"] = args.seed
    if getattr(args, "timings", False):
        payload["elapsed_s"] = round(time.time() - args._t0, 3)
    if args.format == "json":
        sys.stdout.write(dump_report(payload))
    else:
        _print_text(payload)
    return exit_code


def _print_text(payload, indent=0):
    pad = "  " * indent
    for k in sorted(payload):
        v = payload[k]
        if isinstance(v, dict):
            print(f"{pad}{k}:")
            _print_text(v, indent + 1)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            print(f"{pad}{k}: [{len(v)} entries]")
        else:
            print(f"{pad}{k}: {v}")


def _load(args):
    try:
        return load_instance(args.instance)
    except (LimitSeriesError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None


def cmd_validate(args):
    try:
        with open(args.instance, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        inst, cands = instance_from_json(data)
    except LimitSeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    graph_problems = validate_graph(inst.graph)
    tuple_problems = inst.validate_tuple()
    problems = graph_problems + tuple_problems
    payload = {"valid": not problems, "problems": problems,
               "candidates": len(cands), "multitree": inst.multitree,
               "genus": inst.genus(), "degree": inst.degree()}
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        return _report(args, payload, EXIT_INVALID)
    return _report(args, payload, EXIT_OK)


def cmd_twist(args):
    inst = _load(args)
    if inst is None:
        return EXIT_INVALID
    inst, _ = inst
    counts = {}
    for item in args.at:
        if "=" in item:
            v, c = item.split("=", 1)
            counts[v] = int(c)
        else:
            counts[item] = counts.get(item, 0) + 1
    try:
        m = TwistMultiset.make(inst.graph, counts)
    except KeyError:
        print("error: unknown vertex in twist multiset", file=sys.stderr)
        return EXIT_INVALID
    result = apply_multiset(inst.w0, m)
    return _report(args, {"result": multidegree_to_json(result),
                          "total_degree": result.total_degree()}, EXIT_OK)


def cmd_concentrate(args):
    inst = _load(args)
    if inst is None:
        return EXIT_INVALID
    inst, _ = inst
    if args.vertex not in inst.graph.vertices:
        print(f"error: unknown vertex {args.vertex!r}", file=sys.stderr)
        return EXIT_INVALID
    conc, used = concentrate(inst.w0, args.vertex)
    return _report(args, {
        "result": multidegree_to_json(conc),
        "twists": {v: c for v, c in zip(inst.graph.vertices, used.counts) if c},
    }, EXIT_OK)


def cmd_bar_g(args):
    inst = _load(args)
    if inst is None:
        return EXIT_INVALID
    inst, _ = inst
    if not inst.multitree:
        print("error: bar-G enumeration requires a multitree", file=sys.stderr)
        return EXIT_INVALID
    bar = inst.bar_g()
    payload = {
        "count": len(bar.nodes),
        "nodes": [multidegree_to_json(w) for w in bar.nodes],
        "edges": [{"from": i, "to": j, "class": cls, "origin": v}
                  for (i, j, cls, v) in bar.edges],
    }
    return _report(args, payload, EXIT_OK)


def cmd_sections(args):
    inst = _load(args)
    if inst is None:
        return EXIT_INVALID
    inst, _ = inst
    if args.w is not None:
        try:
            w = multidegree_from_json(inst.graph, inst.chains, json.loads(args.w))
        except (json.JSONDecodeError, KeyError) as exc:
            print(f"error: bad multidegree: {exc}", file=sys.stderr)
            return EXIT_INVALID
    else:
        w = inst.w0
    sp = section_space(inst, w)
    f = inst.field
    payload = {
        "multidegree": multidegree_to_json(w),
        "dimension": sp.dim,
        "euler_lower_bound": inst.degree() + 1 - inst.genus(),
        "basis": [[f.format(x) for x in vec] for vec in sp.basis],
        "block_sizes": list(sp.sizes),
        "vanishing_orders": {f"{e}:{v}": m for (e, v), m in sorted(
            sp.offsets.items(), key=lambda kv: (kv[0][0], str(kv[0][1])))},
    }
    return _report(args, payload, EXIT_OK)


def cmd_lls_check(args):
    loaded = _load(args)
    if loaded is None:
        return EXIT_INVALID
    inst, cands = loaded
    if not cands:
        print("error: instance file carries no candidates", file=sys.stderr)
        return EXIT_INVALID
    payload = {"results": []}
    worst = EXIT_OK
    disagreement = False
    for idx, cand in enumerate(cands):
        entry = {"candidate": idx, "r": cand.r}
        try:
            if args.method in ("kernel", "both"):
                vk = is_lls_kernel(inst, cand,
                                   window=args.window if not inst.multitree else None,
                                   extend=args.window or 0 if inst.multitree else 0)
                entry["kernel"] = vk.to_json()
            if args.method in ("eh", "both"):
                ve = is_lls_eh(inst, cand)
                entry["eh"] = ve.to_json()
        except LimitSeriesError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        members = [entry[m]["member"] for m in ("kernel", "eh") if m in entry]
        if len(members) == 2 and members[0] != members[1]:
            disagreement = True
        entry["member"] = all(members)
        if not entry["member"]:
            worst = max(worst, EXIT_NEGATIVE)
        payload["results"].append(entry)
    if disagreement:
        payload["bug_report"] = "method disagreement: equivalence violation"
        print(dump_report(payload), file=sys.stderr)
        return _report(args, payload, EXIT_DISAGREE)
    return _report(args, payload, worst)


def _chain_from_json(data):
    field = field_from_spec(data["field"])
    f = data["f"]
    fb = data["fback"]
    parse = field.parse
    return LinkedChain(field, int(data["d"]), int(data["n"]), parse(data["s"]),
                       [[[parse(x) for x in row] for row in m] for m in f],
                       [[[parse(x) for x in row] for row in m] for m in fb])


def cmd_linked_det(args):
    if args.action == "gen":
        field = field_from_spec({"p": args.p})
        ranks = [int(x) for x in args.ranks.split(",")] if args.ranks else None
        try:
            chain = gen_random_chain(args.seed, field, args.d, args.n,
                                     field.from_int(args.s), ranks)
        except LimitSeriesError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        data = chain.to_json()
        data["field"] = {"p": args.p}
        return _report(args, {"chain": data}, EXIT_OK)
    try:
        with open(args.chain, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        chain = _chain_from_json(data)
    except (OSError, json.JSONDecodeError, KeyError, LimitSeriesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.action == "validate":
        problems = validate_s_linked(chain)
        payload = {"valid": not problems, "problems": problems}
        return _report(args, payload, EXIT_OK if not problems else EXIT_NEGATIVE)
    field = chain.field
    flags_data = data.get("flags")
    if not flags_data:
        print("error: chain file carries no flags", file=sys.stderr)
        return EXIT_INVALID
    pair = FlagPair(int(flags_data["r"]),
                    [[field.parse(x) for x in row] for row in flags_data["first"]],
                    [[field.parse(x) for x in row] for row in flags_data["last"]])
    member, ranks = linked_det_membership(chain, pair)
    if args.action == "check":
        payload = {"member": member, "ranks": ranks}
        return _report(args, payload, EXIT_OK if member else EXIT_NEGATIVE)
    if args.action == "complete":
        middles = complete_flags(chain, pair)
        if middles is None:
            return _report(args, {"member": False, "completed": False}, EXIT_NEGATIVE)
        okc = validate_linked_flags(chain, pair, middles)
        payload = {"member": True, "completed": True, "containments_valid": okc,
                   "middles": [[[field.format(x) for x in row] for row in m]
                               for m in middles]}
        return _report(args, payload, EXIT_OK if okc else EXIT_NEGATIVE)
    print(f"error: unknown linked-det action {args.action!r}", file=sys.stderr)
    return EXIT_INVALID


def cmd_bridge(args):
    loaded = _load(args)
    if loaded is None:
        return EXIT_INVALID
    inst, cands = loaded
    if not cands:
        print("error: instance file carries no candidates", file=sys.stderr)
        return EXIT_INVALID
    cand = cands[args.candidate]
    extra = {v: args.extra for v in inst.graph.vertices}
    try:
        bridge = curve_to_chain(inst, cand, args.edge_class, extra)
    except LimitSeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    member, ranks = linked_det_membership(bridge.chain, bridge.flags)
    pair = pairwise_kernel_check(inst, cand, args.edge_class)
    lls = all(x >= cand.r + 1 for x in pair)
    payload = {
        "chain_dimension": bridge.chain.d,
        "chain_length": bridge.chain.n,
        "linked_det_member": member,
        "linked_det_ranks": ranks,
        "pairwise_kernel_dims": pair,
        "pairwise_ok": lls,
        "cross_check_agree": member == lls,
        "exactness_reports": bridge.s_linked_problems,
        "notes": bridge.notes,
    }
    if member != lls:
        print(dump_report(payload), file=sys.stderr)
        return _report(args, payload, EXIT_DISAGREE)
    return _report(args, payload, EXIT_OK if lls else EXIT_NEGATIVE)


_SUITES = {
    "equiv-exhaustive": lambda a: suite_equiv_exhaustive(),
    "equiv-random": lambda a: suite_equiv_random(seed=a.seed, count=a.count or 500),
    "window": lambda a: suite_window_stability(seed=a.seed, count=a.count or 200),
    "indep": lambda a: suite_choice_independence(seed=a.seed, count=a.count or 100),
    "concentrate": lambda a: suite_concentration(seed=a.seed, count=a.count or 500),
    "twists": lambda a: suite_twist_calculus(seed=a.seed, count=a.count or 1000),
    "sections": lambda a: suite_section_dimensions(seed=a.seed, count=a.count or 60),
    "linked": lambda a: suite_linked_exhaustive(),
    "bridge": lambda a: suite_bridge(seed=a.seed, count=a.count or 100),
    "classical": lambda a: suite_classical(seed=a.seed, count=a.count or 100),
}


def cmd_corpus(args):
    if args.suite == "all":
        results = run_all_suites(seed=args.seed, quick=args.quick)
    else:
        results = [_SUITES[args.suite](args)]
    ok = all(r.get("ok") for r in results)
    payload = {"results": results, "ok": ok}
    return _report(args, payload, EXIT_OK if ok else EXIT_NEGATIVE)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="limitseries",
        description="Exact computations with limit linear series on nodal curves")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--timings", action="store_true",
                        help="include elapsed time in reports (breaks byte-stability)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an instance file")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("twist", help="apply a twist multiset to w0")
    p.add_argument("instance")
    p.add_argument("--at", nargs="+", required=True,
                   help="vertices, or vertex=count entries")
    p.set_defaults(func=cmd_twist)

    p = sub.add_parser("concentrate", help="concentrate w0 at a vertex")
    p.add_argument("instance")
    p.add_argument("--vertex", required=True)
    p.set_defaults(func=cmd_concentrate)

    p = sub.add_parser("bar-g", help="enumerate the core multidegree window")
    p.add_argument("instance")
    p.set_defaults(func=cmd_bar_g)

    p = sub.add_parser("sections", help="section space at a multidegree")
    p.add_argument("instance")
    p.add_argument("--w", help="multidegree JSON; defaults to w0")
    p.set_defaults(func=cmd_sections)

    p = sub.add_parser("lls-check", help="limit-linear-series membership")
    p.add_argument("instance")
    p.add_argument("--method", choices=("kernel", "eh", "both"), default="both")
    p.add_argument("--window", type=int, default=None,
                   help="twist radius (required for non-multitree graphs)")
    p.set_defaults(func=cmd_lls_check)

    p = sub.add_parser("linked-det", help="linked determinantal operations")
    p.add_argument("action", choices=("validate", "check", "complete", "gen"))
    p.add_argument("--chain", help="chain JSON file (validate/check/complete)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--ranks", help="comma-separated link ranks for s=0")
    p.set_defaults(func=cmd_linked_det)

    p = sub.add_parser("bridge", help="curve-to-chain bridge and cross-check")
    p.add_argument("instance")
    p.add_argument("--candidate", type=int, default=0)
    p.add_argument("--edge-class", type=int, default=0)
    p.add_argument("--extra", type=int, default=2,
                   help="extra degree per component")
    p.set_defaults(func=cmd_bridge)

    p = sub.add_parser("corpus", help="run cross-validation suites")
    p.add_argument("suite", choices=sorted(_SUITES) + ["all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_corpus)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.time()
    workers = os.environ.get("LIMITSERIES_WORKERS")
    if workers is not None:
        # reserved for the corpus fan-out; aggregation stays deterministic
        os.environ.setdefault("LIMITSERIES_WORKERS", workers)
    try:
        return args.func(args)
    except LimitSeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
