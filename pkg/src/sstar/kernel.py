"""Per-component wavefront shared by the S* solvers.

A :class:`Component` owns one search: closed/open sets, a destination set of
terminals, g-values, parent pointers and the terminal each g-value is rooted
at.  The open list is a binary heap with lazy deletion; entries carry
``(f, g, node)`` so ties break on smaller g then smaller node id.

When the destination set shrinks, h can only grow, so stale heap keys are
lower bounds and get refreshed when they reach the top.  When it grows (an
essential destination reset, or a merge) the heaps are rebuilt.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable, NamedTuple

from .graph import Graph
from .heuristic import BoundHeuristic

INF = math.inf


class ContractViolation(RuntimeError):
    pass


class InvariantError(RuntimeError):
    pass


class Nomination(NamedTuple):
    """Orders by f, then g, then node id, then component id."""

    f: float
    g: int
    node: int
    component: int


class Component:
    def __init__(self, cid: int, graph: Graph, heuristic: BoundHeuristic,
                 terminals, dest, *, eager: bool = False):
        self.id = cid
        self.graph = graph
        self.heuristic = heuristic
        self.terminals = frozenset(terminals)
        self.dest = frozenset(dest) - self.terminals
        self.eager = eager
        self.epoch = 0
        self.g: dict[int, int] = {}
        self.parent: dict[int, int | None] = {}
        self.root: dict[int, int] = {}
        self.closed: set[int] = set()
        self.open: set[int] = set()
        self._hcache: dict[int, tuple[int, int]] = {}
        self._heap: list = []
        self._gheap: list = []
        self._prheap: list = []
        self._rheap: list = []
        # bumped on every mutation; summaries are cached against it
        self.version = 0
        self._cache: dict[str, tuple[int, object]] = {}
        self._nom_version = -1
        self._nom: Nomination | None = None
        self.repaired: list[int] = []

    def _cached(self, name, compute):
        hit = self._cache.get(name)
        if hit is not None and hit[0] == self.version:
            return hit[1]
        val = compute()
        self._cache[name] = (self.version, val)
        return val

    def __repr__(self):
        return f"Component({self.id}, terminals={sorted(self.terminals)})"

    # -- bounds -----------------------------------------------------------

    def h(self, u: int) -> int:
        if self.heuristic.zero or not self.dest:
            return 0
        hit = self._hcache.get(u)
        if hit is not None and hit[0] == self.epoch:
            return hit[1]
        val = self.heuristic.h_to_set(u, self.dest)
        self._hcache[u] = (self.epoch, val)
        return val

    def f(self, u: int) -> float:
        g = self.g.get(u, INF)
        return g + self.h(u) if g != INF else INF

    def priority(self, u: int) -> float:
        g = self.g[u]
        return max(g + self.h(u), 2 * g)

    # -- open list ----------------------------------------------------------

    def _push(self, u: int) -> None:
        g = self.g[u]
        f = g + self.h(u)
        heapq.heappush(self._heap, (f, g, u))
        heapq.heappush(self._gheap, (g, u))
        heapq.heappush(self._prheap, (max(f, 2 * g), g, u))

    def _rebuild(self) -> None:
        self.version += 1
        self._hcache.clear()
        heap, gheap, prheap = [], [], []
        for u in self.open:
            g = self.g[u]
            f = g + self.h(u)
            heap.append((f, g, u))
            gheap.append((g, u))
            prheap.append((max(f, 2 * g), g, u))
        heapq.heapify(heap)
        heapq.heapify(gheap)
        heapq.heapify(prheap)
        self._heap, self._gheap, self._prheap = heap, gheap, prheap
        self._rheap = [(self.g[c], c) for c in self.closed]
        heapq.heapify(self._rheap)

    def settle_root(self, t: int) -> None:
        """Place terminal ``t`` in the closed set at g = 0 (initialisation)."""
        self.g[t] = 0
        self.parent[t] = None
        self.root[t] = t
        self.closed.add(t)
        self.open.discard(t)
        heapq.heappush(self._rheap, (0, t))
        self.version += 1

    def nominate(self) -> Nomination | None:
        """Minimum-(f, g, node) live open entry, or None when the open set is empty."""
        if self._nom_version == self.version:
            return self._nom
        self._nom = self._nominate()
        self._nom_version = self.version
        return self._nom

    def _nominate(self) -> Nomination | None:
        heap = self._heap
        while heap:
            f, g, u = heap[0]
            if u not in self.open or g != self.g[u]:
                heapq.heappop(heap)
                continue
            true_f = g + self.h(u)
            if true_f != f:
                heapq.heapreplace(heap, (true_f, g, u))
                continue
            return Nomination(f, g, u, self.id)
        return None

    def relax_from(self, u: int, on_improve: Callable | None = None) -> None:
        gu = self.g[u]
        ru = self.root[u]
        closed, gmap = self.closed, self.g
        for v, c in self.graph.adj[u]:
            if v in closed:
                continue
            ng = gu + c
            if ng < gmap.get(v, INF):
                gmap[v] = ng
                self.parent[v] = u
                self.root[v] = ru
                self.open.add(v)
                self._push(v)
                if on_improve is not None:
                    on_improve(self, v, ng)

    def expand(self, on_improve: Callable | None = None) -> int:
        nom = self.nominate()
        if nom is None:
            raise ContractViolation(f"component {self.id} has nothing to expand")
        heapq.heappop(self._heap)
        self.version += 1
        u = nom.node
        self.open.discard(u)
        self.closed.add(u)
        heapq.heappush(self._rheap, (nom.g, u))
        self.relax_from(u, on_improve)
        return u

    # -- destination sets -------------------------------------------------

    def set_dest(self, dest) -> None:
        dest = frozenset(dest) - self.terminals
        if dest == self.dest:
            return
        # lazy keys may only be too small; a grown set, or one emptied out
        # (h drops to zero), can make them too large, so rebuild then
        stale = not dest <= self.dest or not dest
        self.dest = dest
        self.epoch += 1
        self.version += 1
        if stale or self.eager:
            self._rebuild()

    def reprioritize(self, removed) -> None:
        removed = frozenset(removed) & self.dest
        if removed:
            self.set_dest(self.dest - removed)

    # -- summaries ----------------------------------------------------------

    def gmin(self) -> float:
        return self._cached("gmin", self._gmin)

    def _gmin(self) -> float:
        heap = self._gheap
        while heap:
            g, u = heap[0]
            if u in self.open and g == self.g[u]:
                return g
            heapq.heappop(heap)
        return INF

    def prmin(self) -> float:
        return self._cached("prmin", self._prmin)

    def _prmin(self) -> float:
        heap = self._prheap
        while heap:
            pr, g, u = heap[0]
            if u not in self.open or g != self.g[u]:
                heapq.heappop(heap)
                continue
            true_pr = self.priority(u)
            if true_pr != pr:
                heapq.heapreplace(heap, (true_pr, g, u))
                continue
            return pr
        return INF

    def rmin(self) -> float:
        """Least g over closed nodes that still border the open set."""
        return self._cached("rmin", self._rmin)

    def _rmin(self) -> float:
        heap = self._rheap
        adj, open_ = self.graph.adj, self.open
        while heap:
            g, c = heap[0]
            if any(v in open_ for v, _ in adj[c]):
                return g
            heapq.heappop(heap)
        return INF

    def fmin(self) -> float:
        nom = self.nominate()
        return INF if nom is None else nom.f

    # brute-force versions, used by tests to check the incremental ones
    def scan_gmin(self) -> float:
        return min((self.g[u] for u in self.open), default=INF)

    def scan_prmin(self) -> float:
        return min((self.priority(u) for u in self.open), default=INF)

    def scan_rmin(self) -> float:
        adj = self.graph.adj
        return min((self.g[c] for c in self.closed
                    if any(v in self.open for v, _ in adj[c])), default=INF)

    def scan_fmin(self) -> float:
        return min((self.f(u) for u in self.open), default=INF)

    # -- paths --------------------------------------------------------------

    def reconstruct_path(self, u: int) -> tuple[list[int], int]:
        """Terminal-to-``u`` node sequence following parents, and its cost."""
        if u not in self.g:
            raise ContractViolation(f"node {u} has no g-value in component {self.id}")
        nodes = [u]
        cost = 0
        seen = {u}
        cur = u
        while self.parent[cur] is not None:
            p = self.parent[cur]
            c = self.graph.edge_cost(cur, p)
            if c is None or p in seen:
                raise InvariantError(f"broken parent chain at {cur} in component {self.id}")
            cost += c
            seen.add(p)
            nodes.append(p)
            cur = p
        if cur not in self.terminals or cur != self.root[u]:
            raise InvariantError(f"parent chain of {u} ends at non-root {cur}")
        if cost != self.g[u]:
            raise InvariantError(f"parent chain of {u} costs {cost}, g = {self.g[u]}")
        nodes.reverse()
        return nodes, cost

    def support(self) -> set[int]:
        return self.open | self.closed


def init_component(cid: int, graph: Graph, t: int, terminals, heuristic: BoundHeuristic,
                   *, on_improve: Callable | None = None, eager: bool = False) -> Component:
    """Singleton component: C = {t}, g(t) = 0, neighbours of t open, D = T - {t}."""
    comp = Component(cid, graph, heuristic, [t], set(terminals) - {t}, eager=eager)
    comp.settle_root(t)
    if on_improve is not None:
        on_improve(comp, t, 0)
    comp.relax_from(t, on_improve)
    return comp


def merge_components(a: Component, b: Component, cid: int, *, eager: bool = False) -> Component:
    """Fuse two components.

    g is the pointwise minimum over both supports, then tightened along parent
    chains (tightened nodes are listed in ``merged.repaired``).  A node closed on one side
    but open with strictly smaller g on the other is demoted to open.  Parent
    and root pointers follow the side supplying the winning g (``a`` on ties).
    """
    if a is b or a.id == b.id:
        raise ContractViolation("cannot merge a component with itself")
    terminals = a.terminals | b.terminals
    dest = (a.dest | b.dest) - terminals
    merged = Component(cid, a.graph, a.heuristic, terminals, dest, eager=eager)
    for u in sorted(a.support() | b.support()):
        ga, gb = a.g.get(u, INF), b.g.get(u, INF)
        src = a if ga <= gb else b
        merged.g[u] = src.g[u]
        merged.parent[u] = src.parent[u]
        merged.root[u] = src.root[u]
    # A node can keep one side's g while its parent's g (and root) came from
    # the other side, either cheaper or tied.  Re-derive g and root along
    # parent pointers, parents first, so every chain costs exactly g and ends
    # at the recorded root.  g only ever drops, to the cost of a real walk.
    repaired = []
    for u in sorted(merged.g, key=lambda x: (merged.g[x], x)):
        p = merged.parent[u]
        if p is None:
            continue
        via = merged.g[p] + a.graph.edge_cost(p, u)
        merged.root[u] = merged.root[p]
        if via < merged.g[u]:
            merged.g[u] = via
            repaired.append(u)
    merged.repaired = repaired
    demote = {u for u in a.open & b.closed if a.g[u] < b.g[u]}
    demote |= {u for u in b.open & a.closed if b.g[u] < a.g[u]}
    merged.closed = (a.closed | b.closed) - demote
    merged.open = (a.support() | b.support()) - merged.closed
    merged._rebuild()
    return merged
