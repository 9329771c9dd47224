"""Expanded nodes of S*-unmerged and S*-HS with and without reprioritization, per N."""

import argparse
from statistics import mean

from sstar.heuristic import make_provider
from sstar.maps import generate_instance, load_map_spec
from sstar.solvers import steiner_tree


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("map", nargs="?", default="synthetic:random-64")
    ap.add_argument("--n", type=int, nargs="+", default=[10, 20, 30, 40, 50])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--heuristic", default="auto")
    args = ap.parse_args()
    name, graph = load_map_spec(args.map)
    prov = make_provider(graph, args.heuristic)
    print(f"{name} ({prov.kind} heuristic)")
    print(f"{'N':>4} {'solver':>9} {'off':>10} {'on':>10} {'change':>8}")
    for n in args.n:
        insts = [generate_instance(graph, n, seed) for seed in range(args.instances)]
        for solver in ("unmerged", "hs"):
            off = mean(steiner_tree(i, prov, solver, False).stats.expanded for i in insts)
            on = mean(steiner_tree(i, prov, solver, True).stats.expanded for i in insts)
            print(f"{n:>4} {solver:>9} {off:>10.1f} {on:>10.1f} {(on - off) / off:>+8.1%}")


if __name__ == "__main__":
    main()
