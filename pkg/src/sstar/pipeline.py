"""Steiner tree -> origin/destination walk covering every goal.

The tree is doubled, one copy of the tree path from origin to destination is
removed, an Euler walk from origin to destination is extracted, and loops in
the walk after the last new goal is reached are cut out.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, Instance
from .solvers import SteinerForest, UnionFind


@dataclass(frozen=True)
class MgpfSolution:
    walk: tuple[int, ...]
    cost: int
    tree_edge_cost: int
    tree_path_total: int
    sd_path_cost: int = 0

    @property
    def ratio(self) -> Fraction:
        return aposteriori(self)


def aposteriori(solution: MgpfSolution) -> Fraction:
    if solution.tree_edge_cost == 0:
        return Fraction(1)
    return Fraction(solution.cost, solution.tree_edge_cost)


def prune_to_tree(graph: Graph, edges, terminals) -> list[tuple[int, int]]:
    """Cheapest spanning tree of the edge subgraph, minus non-terminal leaves."""
    uf = UnionFind()
    tree = []
    for a, b in sorted(edges, key=lambda e: (graph.edge_cost(*e), e)):
        uf.add(a)
        uf.add(b)
        if uf.union(a, b):
            tree.append((a, b))
    adj = defaultdict(set)
    for a, b in tree:
        adj[a].add(b)
        adj[b].add(a)
    keep = set(terminals)
    leaves = deque(sorted(u for u in adj if len(adj[u]) == 1 and u not in keep))
    while leaves:
        u = leaves.popleft()
        if len(adj[u]) != 1:
            continue
        (v,) = adj.pop(u)
        adj[v].discard(u)
        if len(adj[v]) == 1 and v not in keep:
            leaves.append(v)
    return sorted({(min(a, b), max(a, b)) for a in adj for b in adj[a]})


def _tree_path(tree_adj, s: int, d: int) -> list[int]:
    parent = {s: None}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == d:
            break
        for v in sorted(tree_adj[u]):
            if v not in parent:
                parent[v] = u
                queue.append(v)
    if d not in parent:
        raise ValueError("origin and destination are not connected by the tree")
    path = [d]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def euler_walk(multi_adj: dict[int, list[int]], start: int) -> list[int]:
    """Hierholzer on an undirected multigraph given as neighbour multisets."""
    remaining = {u: sorted(vs, reverse=True) for u, vs in multi_adj.items()}
    stack, out = [start], []
    while stack:
        u = stack[-1]
        nbrs = remaining.get(u)
        if nbrs:
            v = nbrs.pop()
            remaining[v].remove(u)
            stack.append(v)
        else:
            out.append(stack.pop())
    return out[::-1]


def trim_walk(walk: list[int], goals) -> list[int]:
    """Cut loops from the part of the walk after every goal has been seen."""
    pending = set(goals) - {walk[0]}
    k = len(walk) - 1 if pending else 0
    for i, u in enumerate(walk):
        pending.discard(u)
        if not pending:
            k = i
            break
    suffix: list[int] = []
    where: dict[int, int] = {}
    for u in walk[k:]:
        if u in where:
            cut = where[u]
            for v in suffix[cut + 1:]:
                del where[v]
            del suffix[cut + 1:]
        else:
            where[u] = len(suffix)
            suffix.append(u)
    return walk[:k] + suffix


def walk_cost(graph: Graph, walk) -> int:
    return sum(graph.edge_cost(a, b) for a, b in zip(walk, walk[1:]))


def tree_to_walk(forest: SteinerForest, instance: Instance) -> MgpfSolution:
    if not forest.spanning:
        raise ValueError("forest does not span all terminals")
    graph = instance.graph
    s, d = instance.origin, instance.destination
    tree = prune_to_tree(graph, forest.edge_set, instance.terminals)
    tree_cost = sum(graph.edge_cost(a, b) for a, b in tree)
    tree_adj = defaultdict(set)
    for a, b in tree:
        tree_adj[a].add(b)
        tree_adj[b].add(a)
    sd = _tree_path(tree_adj, s, d)
    sd_edges = {(min(a, b), max(a, b)) for a, b in zip(sd, sd[1:])}
    multi = defaultdict(list)
    for a, b in tree:
        copies = 1 if (a, b) in sd_edges else 2
        multi[a] += [b] * copies
        multi[b] += [a] * copies
    walk = euler_walk(multi, s) if multi else [s]
    walk = trim_walk(walk, instance.goals)
    return MgpfSolution(tuple(walk), walk_cost(graph, walk), tree_cost, forest.total,
                        walk_cost(graph, sd))


def validate_solution(solution: MgpfSolution, instance: Instance) -> tuple[bool, list[str]]:
    graph = instance.graph
    walk = solution.walk
    problems = []
    if not walk:
        return False, ["empty walk"]
    if walk[0] != instance.origin:
        problems.append(f"walk starts at {walk[0]}, not origin {instance.origin}")
    if walk[-1] != instance.destination:
        problems.append(f"walk ends at {walk[-1]}, not destination {instance.destination}")
    seen = set(walk)
    for goal in instance.goals:
        if goal not in seen:
            problems.append(f"goal {goal} is never visited")
    total = 0
    for i, (a, b) in enumerate(zip(walk, walk[1:])):
        c = graph.edge_cost(a, b) if 0 <= a < graph.num_nodes and 0 <= b < graph.num_nodes else None
        if c is None:
            problems.append(f"hop {i} ({a} -> {b}) is not an edge")
        else:
            total += c
    if total != solution.cost and not any("not an edge" in p for p in problems):
        problems.append(f"walk costs {total}, record says {solution.cost}")
    if solution.cost > 2 * solution.tree_edge_cost - solution.sd_path_cost:
        problems.append("cost exceeds 2 * tree cost - tree origin/destination path")
    if not 1 <= solution.ratio <= 2:
        problems.append(f"ratio {solution.ratio} outside [1, 2]")
    return not problems, problems


def format_solution(solution: MgpfSolution) -> str:
    r = solution.ratio
    lines = [f"{solution.cost} {solution.tree_edge_cost} {r.numerator}/{r.denominator}"]
    lines += [str(u) for u in solution.walk]
    return "\n".join(lines) + "\n"


def parse_solution(text: str) -> MgpfSolution:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty solution record")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError("header must be 'cost tree_cost ratio'")
    cost, tree_cost = int(head[0]), int(head[1])
    walk = tuple(int(x) for x in lines[1:])
    sol = MgpfSolution(walk, cost, tree_cost, tree_cost)
    if Fraction(head[2]) != sol.ratio:
        raise ValueError(f"recorded ratio {head[2]} disagrees with cost/tree_cost")
    return sol
