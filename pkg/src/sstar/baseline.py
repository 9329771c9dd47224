"""Naive Kruskal: metric completion by repeated Dijkstra, then an MST over it."""

from __future__ import annotations

import heapq
import math
import time

from .graph import Instance
from .solvers import ConfirmedPath, SolveResult, SolveStats, SteinerForest, Unsolvable

INF = math.inf


def metric_completion(instance: Instance) -> tuple[dict[tuple[int, int], ConfirmedPath], int]:
    """Pairwise least-cost paths between terminals, plus total expanded nodes.

    Each source search stops once every other terminal is settled.
    """
    graph = instance.graph
    terminals = instance.terminals
    tset = set(terminals)
    pairs: dict[tuple[int, int], ConfirmedPath] = {}
    expanded = 0
    for s in terminals:
        dist = {s: 0}
        parent = {s: None}
        done = set()
        remaining = len(tset) - 1
        heap = [(0, s)]
        while heap and remaining:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            expanded += 1
            if u in tset and u != s:
                remaining -= 1
                if not remaining:
                    break
            for v, c in graph.adj[u]:
                nd = d + c
                if nd < dist.get(v, INF):
                    dist[v] = nd
                    parent[v] = u
                    heapq.heappush(heap, (nd, v))
        if remaining:
            raise Unsolvable(f"terminal {s} cannot reach every other terminal")
        for t in terminals:
            key = (min(s, t), max(s, t))
            if t == s or key in pairs:
                continue
            nodes = [t]
            while parent[nodes[-1]] is not None:
                nodes.append(parent[nodes[-1]])
            nodes.reverse()
            pairs[key] = ConfirmedPath((s, t), dist[t], tuple(nodes))
    return pairs, expanded


def kruskal_mst(terminals, pairs: dict[tuple[int, int], ConfirmedPath]) -> SteinerForest:
    """Kruskal over the completion; ties go to the lexicographically smaller pair."""
    forest = SteinerForest(terminals)
    for key in sorted(pairs, key=lambda k: (pairs[k].cost, k)):
        if forest.spanning:
            break
        p = pairs[key]
        if forest.connects(p):
            forest.accept(p)
    return forest


def solve_kruskal(instance: Instance) -> SolveResult:
    start = time.perf_counter()
    pairs, expanded = metric_completion(instance)
    forest = kruskal_mst(instance.terminals, pairs)
    stats = SolveStats(expanded=expanded, iterations=len(instance.terminals),
                       confirmed=len(pairs))
    stats.time_ms = (time.perf_counter() - start) * 1000
    return SolveResult(forest, stats, list(pairs.values()))
