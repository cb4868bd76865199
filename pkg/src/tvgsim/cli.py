"""Command-line entry point.

Exit codes: 0 success, 1 usage/parse error, 2 domain error, 3 simulation did
not converge within the horizon.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import graphs, io, metrics, scenarios
from .engine import run
from .errors import (
    DomainError,
    GenerationError,
    NotConvergedError,
    ParseError,
    TvgsimError,
)
from .graphs import vertex_key
from .protocols import get_protocol
from .tvg import earliest_arrival, eventual_underlying_graph, underlying_graph

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_NOT_CONVERGED = 3


def _fmt_set(vs) -> str:
    return "{" + ", ".join(sorted(vs, key=vertex_key)) + "}"


def _fmt_edges(es) -> str:
    return "{" + ", ".join(f"{u}-{v}" for (u, v) in sorted(es, key=graphs.edge_key)) + "}"


def cmd_analyze(args) -> int:
    g = io.load_graph_file(args.graph)
    connected = graphs.is_connected(g)
    print(f"vertices: {len(g.vertices)}")
    print(f"edges: {len(g.edges)}")
    print(f"connected: {'yes' if connected else 'no'}")
    if not connected:
        print("graph is disconnected; diameter and dominating-set analysis skipped")
        return EXIT_OK
    print(f"diameter: {graphs.diameter(g)}")
    if args.all_mds:
        sets = graphs.enumerate_minimal_dominating_sets(g)
        print(f"minimal dominating sets ({len(sets)}):")
        for m in sets:
            print(f"  {_fmt_set(m)}")
    if args.smds:
        result = graphs.find_smds(g)
        if result is not None:
            print(f"strong minimal dominating set: {_fmt_set(result)}")
        else:
            print("no strong minimal dominating set")
            for m in graphs.enumerate_minimal_dominating_sets(g):
                witness = graphs.smds_witness(g, m)
                dominators = {
                    graphs.make_edge(witness, q) for q in g.neighbors(witness) & m
                }
                print(
                    f"  candidate {_fmt_set(m)}: witness {witness}, "
                    f"dominator edges {_fmt_edges(dominators)} are not a cut-set"
                )
    return EXIT_OK


def _converged(protocol_name: str, tvg, trace) -> bool:
    finals = trace.final_outputs
    if protocol_name == "ug":
        target = underlying_graph(tvg)
        return all(out == target for out in finals.values())
    if protocol_name == "flood":
        return all(finals.values())
    # dominating-set layer: the final true-set must dominate minimally on the
    # eventual underlying graph
    true_set = frozenset(v for v, out in finals.items() if out)
    eug = eventual_underlying_graph(tvg)
    return graphs.is_minimal_dominating(eug, true_set)


def cmd_simulate(args) -> int:
    tvg = io.load_scenario(args.scenario)
    protocol = get_protocol(args.protocol, origin=args.origin)
    trace = run(tvg, protocol, args.horizon)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace.serialize())
    for v in sorted(trace.formatted_finals, key=vertex_key):
        print(f"{v} {trace.formatted_finals[v]}")
    if not _converged(args.protocol, tvg, trace):
        print("not converged within horizon", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    if args.metrics:
        ug = underlying_graph(tvg)
        if args.protocol == "flood":
            nps = metrics.nps_broadcast(ug, args.origin)
            predicate = lambda outs: all(outs.values())
        elif args.protocol == "ug":
            nps = metrics.nps_ug(ug)
            predicate = lambda outs: all(out == ug for out in outs.values())
        else:
            nps = metrics.nps_ug(ug)
            final_true = frozenset(v for v, out in trace.final_outputs.items() if out)
            predicate = lambda outs: frozenset(v for v, o in outs.items() if o) == final_true
        report = metrics.convergence_steps(trace, nps, predicate)
        print(json.dumps(report.to_json_dict(), sort_keys=True))
    return EXIT_OK


def cmd_journey(args) -> int:
    tvg = io.load_scenario(args.scenario)
    result = earliest_arrival(
        tvg, args.source, args.target, after=args.after, deliverable=args.deliverable
    )
    print("none" if result is None else result)
    return EXIT_OK


def cmd_generate_gk(args) -> int:
    tvg = scenarios.generate_gk(args.k)
    io.save_scenario(tvg, args.output)
    return EXIT_OK


def cmd_generate_random(args) -> int:
    tvg = scenarios.generate_random_cot(
        n=args.nodes,
        extra_edge_probability=args.extra,
        missing_fraction=args.missing,
        horizon=args.span,
        seed=args.seed,
    )
    io.save_scenario(tvg, args.output)
    return EXIT_OK


def cmd_adversary(args) -> int:
    g = io.load_graph_file(args.graph)
    _, report = scenarios.adversary_destabilize(g, args.rounds)
    for r in report.rounds:
        print(
            f"round {r.index}: stable {_fmt_set(r.stable_set)} at {r.stabilized_at}; "
            f"witness {r.witness}; suppressed {_fmt_edges(r.suppressed_edges)}; "
            f"restabilized to {_fmt_set(r.new_set)} at {r.restabilized_at}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvgsim",
        description="Simulate and analyze distributed algorithms on time-varying graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a static graph file")
    p.add_argument("graph")
    p.add_argument("--all-mds", action="store_true", help="list all minimal dominating sets")
    p.add_argument("--smds", action="store_true", help="search for a strong minimal dominating set")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run a protocol over a scenario")
    p.add_argument("scenario")
    p.add_argument("--protocol", choices=["ug", "mdst", "flood"], required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--trace", help="write the serialized trace to this file")
    p.add_argument("--metrics", action="store_true", help="print the complexity report as JSON")
    p.add_argument("--origin", help="origin vertex for the flood protocol")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("journey", help="earliest arrival query")
    p.add_argument("scenario")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--after", type=int, default=0)
    p.add_argument("--deliverable", action="store_true")
    p.set_defaults(func=cmd_journey)

    p = sub.add_parser("generate", help="generate a scenario file")
    gen = p.add_subparsers(dest="family", required=True)

    gk = gen.add_parser("gk", help="the lower-bound chain family")
    gk.add_argument("--k", type=int, required=True)
    gk.add_argument("-o", "--output", required=True)
    gk.set_defaults(func=cmd_generate_gk)

    rnd = gen.add_parser("random", help="random connected-over-time scenario")
    rnd.add_argument("--nodes", type=int, required=True)
    rnd.add_argument("--extra", type=float, default=0.2)
    rnd.add_argument("--missing", type=float, default=0.0)
    rnd.add_argument("--span", type=int, default=64, help="ticks within which all edges first appear")
    rnd.add_argument("--seed", type=int, required=True)
    rnd.add_argument("-o", "--output", required=True)
    rnd.set_defaults(func=cmd_generate_random)

    p = sub.add_parser("adversary", help="destabilize the dominating-set protocol")
    p.add_argument("--graph", required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.set_defaults(func=cmd_adversary)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.command == "simulate" and args.protocol == "flood" and not args.origin:
        print("error: --origin is required with --protocol flood", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (DomainError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TvgsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
