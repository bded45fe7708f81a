"""
Command-line entry point.

Every subcommand reads graphs in the ``p n m`` edge-list format. Library errors exit
with status 2 and a one-line message; a verification that fails exits with status 1.
"""

import argparse
import logging
import sys
from fractions import Fraction
from typing import Sequence

from minorsep import io
from minorsep.bench import bench
from minorsep.config import resolve_profile
from minorsep.dense_reduction import minor_in_dense
from minorsep.generators import generate
from minorsep.graph_core import WeightFn
from minorsep.helpers import (
    GraphFamily,
    MinorSepError,
    ParameterError,
    SearchEngine,
    SepKind,
)
from minorsep.kpr import kpr
from minorsep.minor_model import find_minor
from minorsep.models import MinorModel
from minorsep.separator import (
    bounded_degree_pipeline,
    find_balanced_separator,
    find_separator_once,
    replay_trace,
    trace_host,
)
from minorsep.verify import check_invariants, verify_minor_model, verify_separator
from minorsep.wbfs import weighted_bfs

logger = logging.getLogger("minorsep")


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from exc
    return value


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_gen(args) -> int:
    params = {
        key: getattr(args, key)
        for key in ("a", "b", "n", "m", "d", "seed")
        if getattr(args, key) is not None
    }
    family = GraphFamily(args.family)
    if family not in (GraphFamily.RANDOM_GNM, GraphFamily.RANDOM_REGULAR):
        params.pop("seed", None)
    io.write_graph(generate(family, **params), args.out)
    return 0


def cmd_wbfs(args) -> int:
    graph = io.read_graph(args.graph)
    weights = WeightFn.constant(graph.n, args.weight)
    tree = weighted_bfs(graph, weights, args.source, args.radius, engine=args.engine)
    lines = [
        f"{v} {int(tree.parent[v])} {int(tree.dist[v])} {int(tree.subtree_size[v])}\n"
        for v in tree.members
    ]
    _emit("".join(lines) or "\n")
    return 0


def cmd_kpr(args) -> int:
    graph = io.read_graph(args.graph)
    weights = WeightFn.constant(graph.n, args.weight)
    outcome = kpr(graph, weights, args.delta, args.h, engine=args.engine)
    _emit(
        f"{outcome.kind.value} |S|={len(outcome.separator)} |C*|={len(outcome.component)} "
        f"rounds={outcome.round_sizes}"
    )
    if outcome.model is not None and args.emit_minor:
        io.write_minor(outcome.model, args.emit_minor)
    return 0


def _loop_options(args) -> dict:
    return {
        "dense_guard": not args.no_dense_guard,
        "bfs_on_component": args.bfs_on_component,
        "find_minor_on_failure": not args.no_find_minor,
        "simplified": args.simplified,
        "engine": args.engine,
        "max_attempts": args.attempts,
    }


def cmd_sep(args) -> int:
    graph = io.read_graph(args.graph)
    profile = resolve_profile(args.profile)
    options = _loop_options(args)
    if args.once:
        result = find_separator_once(graph, args.h, profile, args.seed, **options)
    elif args.pipeline is not None:
        result = bounded_degree_pipeline(
            graph, args.h, args.pipeline, profile, args.seed, args.alpha, **options
        )
    else:
        result = find_balanced_separator(
            graph, args.h, args.alpha, profile, args.seed, **options
        )
    if args.trace:
        if not result.traces:
            logger.warning("no separator loop ran; writing an empty trace to %s", args.trace)
        io.write_traces(result.traces, args.trace)
    if result.kind == SepKind.MINOR:
        io.write_minor(result.model, args.out)
    elif result.separator is not None:
        io.write_separator(result.separator, args.out)
    if args.out != "-" or result.kind == SepKind.INDETERMINATE:
        sys.stderr.write(f"{result}\n")
    return 0


def cmd_minor(args) -> int:
    graph = io.read_graph(args.graph)
    id_map = None
    if args.trace:
        runs = [run for run in io.read_traces(args.trace) if not run.contracted]
        if not runs:
            raise ParameterError("the trace holds no run on an induced subgraph")
        trace = replay_trace(graph, runs[0], engine=args.engine)
        graph, id_map = trace_host(graph, trace)
    else:
        result = find_separator_once(
            graph,
            args.h,
            resolve_profile(args.profile),
            args.seed,
            dense_guard=False,
            find_minor_on_failure=False,
            engine=args.engine,
        )
        if result.kind == SepKind.MINOR:
            io.write_minor(result.model, args.out)
            return 0
        trace = result.trace
    trees = trace.trees
    if not trees:
        raise ParameterError("the run ended before any tree was grown")
    model = find_minor(graph, trees, args.t, seed=args.seed, max_attempts=args.attempts)
    if not model:
        sys.stderr.write(f"no K_{args.t} found after {args.attempts} attempt(s)\n")
        return 1
    if id_map is not None:
        model = MinorModel(tuple(s.map_through(id_map) for s in model.branch_sets), model.pattern)
    io.write_minor(model, args.out)
    return 0


def cmd_dense_minor(args) -> int:
    d = args.d if args.d is not None else 100 * args.h * args.h
    graph = io.read_graph(args.graph, edges_per_vertex=d)
    io.write_minor(minor_in_dense(graph, args.h, d=d), args.out)
    return 0


def cmd_verify_sep(args) -> int:
    graph = io.read_graph(args.graph)
    report = verify_separator(graph, io.read_separator(args.separator), args.alpha)
    if args.json:
        io.write_json(report.to_dict(), args.json)
    _emit(
        f"{'valid' if report.valid else 'invalid'}: |S|={report.separator_size} "
        f"max component {report.max_component_fraction}"
    )
    return 0 if report.valid else 1


def cmd_verify_minor(args) -> int:
    graph = io.read_graph(args.graph)
    report = verify_minor_model(graph, io.read_minor(args.minor))
    if args.json:
        io.write_json(report.to_dict(), args.json)
    _emit("valid" if report else f"invalid: {report.violation} {report.detail}")
    return 0 if report else 1


def cmd_check_invariants(args) -> int:
    graph = io.read_graph(args.graph)
    reports = []
    for run in io.read_traces(args.trace):
        if run.contracted:
            logger.info("run on a contracted quotient is checked without replay")
        else:
            run = replay_trace(graph, run, engine=args.engine)
        reports.append(check_invariants(run))
    failures = [(i, f) for i, report in enumerate(reports) for f in report.failures()]
    if args.json:
        io.write_json(
            {"passed": not failures, "runs": [r.to_dict() for r in reports]}, args.json
        )
    for i, failure in failures:
        _emit(f"run {i} t={failure.t} invariant {failure.invariant}: {failure.detail}")
    _emit("passed" if not failures else f"{len(failures)} failure(s)")
    return 0 if not failures else 1


def cmd_bench(args) -> int:
    records, summary = bench(
        args.family,
        args.sizes,
        args.h,
        resolve_profile(args.profile),
        args.seed,
        args.trials,
        alpha=args.alpha,
        workers=args.workers,
    )
    if args.json:
        io.write_jsonl(records, args.json)
    io.write_json(summary, "-")
    return 0


def _add_common(parser: argparse.ArgumentParser, *, profile=False, seed=False) -> None:
    parser.add_argument(
        "--engine",
        choices=[e.value for e in SearchEngine],
        default=SearchEngine.BUCKET.value,
        help="weighted BFS implementation",
    )
    if profile:
        parser.add_argument(
            "--profile",
            default=None,
            help="paper, desk or a key=value file (default: $MINORSEP_PROFILE or paper)",
        )
    if seed:
        parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minorsep",
        description="Balanced separators or clique minors in minor-free graphs.",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph")
    p.add_argument("family", choices=[f.value for f in GraphFamily])
    for name in ("a", "b", "n", "m", "d"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="-")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("wbfs", help="vertex-weighted BFS tree")
    p.add_argument("graph")
    p.add_argument("--source", type=int, nargs="+", default=[0])
    p.add_argument("--radius", type=int)
    p.add_argument("--weight", type=int, default=1, help="uniform vertex weight")
    _add_common(p)
    p.set_defaults(handler=cmd_wbfs)

    p = sub.add_parser("kpr", help="one KPR decomposition")
    p.add_argument("graph")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--weight", type=int, default=1, help="uniform vertex weight")
    p.add_argument("--emit-minor")
    _add_common(p)
    p.set_defaults(handler=cmd_kpr)

    p = sub.add_parser("sep", help="balanced separator or clique minor")
    p.add_argument("graph")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--alpha", type=_fraction, default=Fraction(2, 3))
    p.add_argument("--no-dense-guard", action="store_true")
    p.add_argument("--bfs-on-component", action="store_true")
    p.add_argument("--no-find-minor", action="store_true")
    p.add_argument("--simplified", action="store_true")
    p.add_argument("--once", action="store_true", help="a single loop run, no amplification")
    p.add_argument("--pipeline", type=int, metavar="P", help="contract parts of size >= P first")
    p.add_argument("--attempts", type=int, default=2)
    p.add_argument("--trace")
    p.add_argument("--out", default="-")
    _add_common(p, profile=True, seed=True)
    p.set_defaults(handler=cmd_sep)

    p = sub.add_parser("minor", help="sample a clique minor from the loop's trees")
    p.add_argument("graph")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--attempts", type=int, default=2)
    p.add_argument("--trace", help="replay this trace instead of rerunning")
    p.add_argument("--out", default="-")
    _add_common(p, profile=True, seed=True)
    p.set_defaults(handler=cmd_minor)

    p = sub.add_parser("dense-minor", help="K_h minor of a dense graph")
    p.add_argument("graph")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--out", default="-")
    p.set_defaults(handler=cmd_dense_minor)

    p = sub.add_parser("verify-sep", help="check a separator")
    p.add_argument("graph")
    p.add_argument("separator")
    p.add_argument("--alpha", type=_fraction, default=Fraction(2, 3))
    p.add_argument("--json")
    p.set_defaults(handler=cmd_verify_sep)

    p = sub.add_parser("verify-minor", help="check a minor model")
    p.add_argument("graph")
    p.add_argument("minor")
    p.add_argument("--json")
    p.set_defaults(handler=cmd_verify_minor)

    p = sub.add_parser("check-invariants", help="replay a trace and check the loop invariants")
    p.add_argument("graph")
    p.add_argument("trace")
    p.add_argument("--json")
    _add_common(p)
    p.set_defaults(handler=cmd_check_invariants)

    p = sub.add_parser("bench", help="time the separator on growing graphs")
    p.add_argument("--family", choices=[f.value for f in GraphFamily], default="grid")
    p.add_argument("--sizes", type=int, nargs="+", required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--alpha", type=_fraction, default=Fraction(2, 3))
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", help="JSON-lines file of per-size records")
    _add_common(p, profile=True, seed=True)
    p.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "minor" and not args.trace and args.h is None:
        args.h = args.t
    try:
        return args.handler(args)
    except MinorSepError as exc:
        sys.stderr.write(f"minorsep: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
