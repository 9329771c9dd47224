"""Command line entry point: ``mgpf solve | bench | landmarks | verify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .bench import FIXTURES, BenchConfig, fixture_spec, load_fixture, run_suite
from .graph import Instance, MapParseError
from .heuristic import KINDS, cache_dir, cached_landmarks, graph_digest, make_provider
from .maps import SYNTHETIC, generate_instance, load_map_spec
from .pipeline import format_solution, parse_solution, tree_to_walk, validate_solution
from .solvers import SOLVERS, Unsolvable, steiner_tree

log = logging.getLogger("sstar")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("map", nargs="?", help="path to a .map / edge-list file, or synthetic:<name> "
                   f"({', '.join(SYNTHETIC)})")
    p.add_argument("--fixture", choices=FIXTURES, help="use a shipped fixture instead of a map")
    p.add_argument("--origin", type=int)
    p.add_argument("--destination", type=int)
    p.add_argument("--goals", type=_int_list, default=[], help="comma-separated node ids")
    p.add_argument("-n", "--terminals", type=int,
                   help="sample this many terminals instead of giving them explicitly")
    p.add_argument("--seed", type=int, default=0)


def _instance_from_args(args) -> tuple[str, Instance]:
    if args.fixture:
        return args.fixture, load_fixture(args.fixture)
    if not args.map:
        raise SystemExit("either a map or --fixture is required")
    name, graph = load_map_spec(args.map)
    if args.terminals is not None:
        return name, generate_instance(graph, args.terminals, args.seed)
    if args.origin is None or args.destination is None:
        raise SystemExit("give --origin and --destination, or -n to sample terminals")
    inst = Instance(graph, args.origin, args.destination, tuple(args.goals))
    inst.validate()
    return name, inst


def cmd_solve(args) -> int:
    name, inst = _instance_from_args(args)
    kind = args.heuristic
    if kind is None:
        kind = str(fixture_spec(args.fixture)["heuristic"]) if args.fixture else "auto"
    provider = make_provider(inst.graph, kind, args.w, landmark_count=args.landmarks,
                             landmark_seed=args.seed)
    result = steiner_tree(inst, provider, args.solver, args.reprioritize,
                          bs_nominate_by_g=args.bs_nominate_by_g)
    sol = tree_to_walk(result.forest, inst)
    record = {
        "map": name, "solver": args.solver, "heuristic": provider.kind,
        "w": str(provider.weight), "reprioritize": args.reprioritize, "seed": args.seed,
        "terminals": list(inst.terminals), "expanded": result.stats.expanded,
        "iterations": result.stats.iterations, "time_ms": round(result.stats.time_ms, 3),
        "tree_path_total": result.forest.total, "tree_edge_cost": sol.tree_edge_cost,
        "path_cost": sol.cost, "ratio": str(sol.ratio),
    }
    if args.verify:
        ok, problems = validate_solution(sol, inst)
        record["valid"] = ok
        record["problems"] = problems
    text = format_solution(sol)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return 0 if record.get("valid", True) else 1


def cmd_bench(args) -> int:
    if args.reprioritize == "both":
        reprio = [False, True]
    else:
        reprio = [args.reprioritize == "on"]
    cfg = BenchConfig(
        maps=args.maps, n_values=args.n, weights=args.w, solvers=args.solvers,
        reprioritize=reprio, instances=args.instances, seed=args.seed,
        landmarks=args.landmarks, heuristic=args.heuristic,
        bs_nominate_by_g=args.bs_nominate_by_g, timing=not args.no_timing,
        verify=args.verify, jobs=args.jobs, output=Path(args.out))
    rows = run_suite(cfg)
    failed = sum(1 for r in rows if r.error)
    print(Path(args.out).with_suffix(".summary.txt").read_text(), end="")
    print(f"{len(rows)} runs, {failed} failed; CSV written to {args.out}")
    return 1 if failed else 0


def cmd_landmarks(args) -> int:
    name, graph = load_map_spec(args.map)
    table = cached_landmarks(graph, args.count, args.seed, rebuild=args.rebuild)
    path = cache_dir() / f"{graph_digest(graph)}-s{args.seed}-n{args.count}.npz"
    print(f"{name}: {len(table.landmarks)} landmarks -> {path}")
    if table.shortfall:
        print(f"warning: only {len(table.landmarks)} eligible border nodes", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    _, inst = _instance_from_args(args)
    sol = parse_solution(Path(args.solution).read_text())
    ok, problems = validate_solution(sol, inst)
    for p in problems:
        print(p)
    print("valid" if ok else "INVALID")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mgpf", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance and print the solution record")
    _add_instance_args(p)
    p.add_argument("--solver", choices=SOLVERS, default="mm")
    p.add_argument("--heuristic", choices=("auto", *KINDS), default=None)
    p.add_argument("--w", type=_fraction, default=Fraction(1))
    p.add_argument("--reprioritize", action="store_true")
    p.add_argument("--bs-nominate-by-g", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--landmarks", type=int, default=100)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out", help="write the solution record here instead of stdout")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a benchmark suite and write a CSV")
    p.add_argument("maps", nargs="+")
    p.add_argument("--n", type=_int_list, default=[10, 20, 30, 40, 50])
    p.add_argument("--w", type=lambda s: [_fraction(x) for x in s.split(",")],
                   default=[Fraction(k, 4) for k in range(5)])
    p.add_argument("--solvers", type=lambda s: s.split(","), default=list(SOLVERS))
    p.add_argument("--reprioritize", choices=("off", "on", "both"), default="off")
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--landmarks", type=int, default=100)
    p.add_argument("--heuristic", choices=("auto", *KINDS), default="auto")
    p.add_argument("--bs-nominate-by-g", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--no-timing", action="store_true", help="zero time_ms for byte-stable CSVs")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="results/bench.csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("landmarks", help="precompute and cache ALT landmark tables")
    p.add_argument("map")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rebuild", action="store_true")
    p.set_defaults(func=cmd_landmarks)

    p = sub.add_parser("verify", help="re-validate a solution record against its instance")
    p.add_argument("solution", help="solution record written by 'solve'")
    _add_instance_args(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MapParseError, Unsolvable, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
