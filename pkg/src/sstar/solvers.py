"""S*-unmerged and S*-merged (HS / BS / MM) Steiner tree search.

Both solvers grow one A*-style wavefront per component, push terminal-pair
paths into a pending pool ``Q`` once they are confirmed least-cost, and
accept pending paths Kruskal-style only once no cheaper connection can still
be undiscovered (``cost <= f*``).
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable

from .graph import Graph, Instance
from .heuristic import ZERO, BoundHeuristic, HeuristicProvider
from .kernel import Component, init_component, merge_components

INF = math.inf

TraceSink = Callable[[int, int, int, int, float], None]


class Unsolvable(RuntimeError):
    pass


class Criterion(str, enum.Enum):
    HS = "HS"
    BS = "BS"
    MM = "MM"


class UnionFind:
    def __init__(self, items=()):
        self._parent: dict[int, int] = {}
        self._members: dict[int, set[int]] = {}
        for x in items:
            self.add(x)

    def add(self, x: int) -> None:
        if x not in self._parent:
            self._parent[x] = x
            self._members[x] = {x}

    def find(self, x: int) -> int:
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if len(self._members[ra]) < len(self._members[rb]):
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._members[ra] |= self._members.pop(rb)
        return True

    def members(self, x: int) -> set[int]:
        return self._members[self.find(x)]

    @property
    def num_classes(self) -> int:
        return len(self._members)


@dataclass(frozen=True)
class ConfirmedPath:
    endpoints: tuple[int, int]
    cost: int
    nodes: tuple[int, ...]

    @property
    def key(self):
        return (self.cost, min(self.endpoints), max(self.endpoints))


class SteinerForest:
    def __init__(self, terminals):
        self.terminals = tuple(terminals)
        self.uf = UnionFind(self.terminals)
        self.accepted: list[ConfirmedPath] = []

    def connects(self, path: ConfirmedPath) -> bool:
        a, b = path.endpoints
        return self.uf.find(a) != self.uf.find(b)

    def accept(self, path: ConfirmedPath) -> None:
        a, b = path.endpoints
        if not self.uf.union(a, b):
            raise ValueError(f"path {path.endpoints} would close a cycle")
        self.accepted.append(path)

    @property
    def spanning(self) -> bool:
        return self.uf.num_classes == 1

    @property
    def total(self) -> int:
        return sum(p.cost for p in self.accepted)

    @property
    def edge_set(self) -> set[tuple[int, int]]:
        edges = set()
        for p in self.accepted:
            for a, b in zip(p.nodes, p.nodes[1:]):
                edges.add((a, b) if a < b else (b, a))
        return edges

    def edge_set_cost(self, graph: Graph) -> int:
        return sum(graph.edge_cost(a, b) for a, b in self.edge_set)


@dataclass
class SolveStats:
    expanded: int = 0
    iterations: int = 0
    time_ms: float = 0.0
    confirmed: int = 0
    # expanded-node count at the moment each path was confirmed
    confirmed_at: list[int] = field(default_factory=list)


@dataclass
class SolveResult:
    forest: SteinerForest
    stats: SolveStats
    confirmed: list[ConfirmedPath] = field(default_factory=list)


# -- path confirmation criteria ----------------------------------------------


@dataclass(frozen=True)
class PairState:
    """Everything a criterion reads for components A* (``a``) and A (``b``)."""

    best_meet: float
    f_a: float
    f_b: float
    gmin_a: float
    gmin_b: float
    prmin_a: float = INF
    prmin_b: float = INF
    c_min: int = 0


# An infinite meet means the pair has not met yet; it never confirms, even
# against exhausted (+inf) frontiers.

def confirm_hs(s: PairState) -> bool:
    return s.best_meet != INF and s.best_meet <= max(s.f_a, s.f_b)


def confirm_bs(s: PairState) -> bool:
    return s.best_meet != INF and s.best_meet <= s.gmin_a + s.gmin_b


def confirm_mm(s: PairState) -> bool:
    c = min(s.prmin_a, s.prmin_b)
    return s.best_meet != INF and s.best_meet <= max(c, s.f_a, s.f_b,
                                                     s.gmin_a + s.gmin_b + s.c_min)


CONFIRM = {Criterion.HS: confirm_hs, Criterion.BS: confirm_bs, Criterion.MM: confirm_mm}


# A component whose destination set is empty (only possible early through
# reprioritization) already has confirmed paths to every other terminal, so it
# is treated like an exhausted frontier: no nominations, +inf bounds.

def frontier(comp: Component):
    return comp.nominate() if comp.dest else None


def _fmin(comp: Component) -> float:
    return comp.fmin() if comp.dest else INF


def _gmin(comp: Component) -> float:
    return comp.gmin() if comp.dest else INF


def _prmin(comp: Component) -> float:
    return comp.prmin() if comp.dest else INF


def pair_state(a: Component, b: Component, best_meet: float, c_min: int = 0,
               criterion: Criterion | None = None) -> PairState:
    """Collect the summaries ``criterion`` reads (all of them when None)."""
    if criterion is Criterion.BS:
        return PairState(best_meet, INF, INF, _gmin(a), _gmin(b))
    if criterion is Criterion.HS:
        return PairState(best_meet, _fmin(a), _fmin(b), INF, INF)
    return PairState(best_meet, _fmin(a), _fmin(b), _gmin(a), _gmin(b),
                     _prmin(a), _prmin(b), c_min)


class PairMeetTable:
    """min_u g_A(u) + g_B(u) per live component pair, with the witness node."""

    def __init__(self):
        self.best: dict[tuple[int, int], tuple[float, int]] = {}
        self.partners: dict[int, set[int]] = {}

    @staticmethod
    def _key(a: int, b: int):
        return (a, b) if a < b else (b, a)

    def offer(self, a: int, b: int, cost: int, witness: int) -> None:
        key = self._key(a, b)
        old = self.best.get(key)
        if old is None:
            self.partners.setdefault(a, set()).add(b)
            self.partners.setdefault(b, set()).add(a)
            self.best[key] = (cost, witness)
        elif (cost, witness) < old:
            self.best[key] = (cost, witness)

    def get(self, a: int, b: int) -> tuple[float, int]:
        return self.best.get(self._key(a, b), (INF, -1))

    def merge(self, a: int, b: int, new: int, others) -> None:
        # min over the merged g of (g_new + g_x) splits into the two old rows
        for x in others:
            cand = min(self.get(a, x), self.get(b, x))
            if cand[0] != INF:
                self.offer(new, x, *cand)
        for old in (a, b):
            for x in self.partners.pop(old, ()):
                self.best.pop(self._key(old, x), None)
                if x not in (a, b):
                    self.partners[x].discard(old)


def scan_meet(a: Component, b: Component) -> tuple[float, int]:
    best = (INF, -1)
    small, large = (a, b) if len(a.g) <= len(b.g) else (b, a)
    for u, gu in small.g.items():
        gv = large.g.get(u)
        if gv is not None and (gu + gv, u) < best:
            best = (gu + gv, u)
    return best


def meet_path(a: Component, b: Component, u: int) -> ConfirmedPath:
    """Terminal of ``a`` nearest ``u`` -> ``u`` -> terminal of ``b`` nearest ``u``."""
    left, ca = a.reconstruct_path(u)
    right, cb = b.reconstruct_path(u)
    nodes = tuple(left + right[-2::-1])
    return ConfirmedPath((left[0], right[0]), ca + cb, nodes)


# -- Steiner tree updates ------------------------------------------------------


def update_steiner_tree(forest: SteinerForest, pending: list[ConfirmedPath],
                        comps: dict[int, Component], terminals,
                        fstar: float | None = None) -> list[ConfirmedPath]:
    """Accept pending paths with cost <= f*, cheapest first (unmerged variant).

    Returns the accepted paths.  ``pending`` is edited in place: cycle-forming
    paths are dropped, over-budget ones stay.
    """
    if not pending:
        return []
    if fstar is None:
        fstar = min((_fmin(c) for c in comps.values()), default=INF)
    accepted = []
    keep = []
    terminals = frozenset(terminals)
    for p in sorted(pending, key=lambda p: p.key):
        if not forest.connects(p):
            continue
        if p.cost <= fstar:
            forest.accept(p)
            accepted.append(p)
            joined = forest.uf.members(p.endpoints[0])
            for t in joined:
                comps[t].set_dest(terminals - joined)
        else:
            keep.append(p)
    pending[:] = keep
    return accepted


def merged_fstar(live: list[Component]) -> float:
    fmin = min((_fmin(c) for c in live), default=INF)
    rmins = sorted(c.rmin() for c in live)
    rsum = rmins[0] + rmins[1] if len(rmins) >= 2 else INF
    return max(fmin, rsum)


# -- solvers -------------------------------------------------------------------


def _bind(instance: Instance, provider: HeuristicProvider | None) -> BoundHeuristic:
    if provider is None:
        return ZERO
    if provider.graph is not instance.graph and provider.graph != instance.graph:
        raise ValueError("heuristic provider was built for a different graph")
    return provider.bind(instance.terminals)


def _check_terminals(instance: Instance) -> None:
    ts = instance.terminals
    if len(set(ts)) != len(ts):
        raise ValueError("terminals must be distinct")
    n = instance.graph.num_nodes
    for t in ts:
        if not 0 <= t < n:
            raise ValueError(f"terminal {t} is not a node")


def solve_unmerged(instance: Instance, provider: HeuristicProvider | None = None,
                   reprioritize: bool = False, *, trace: TraceSink | None = None,
                   eager: bool = False) -> SolveResult:
    _check_terminals(instance)
    start = time.perf_counter()
    graph = instance.graph
    terminals = instance.terminals
    heuristic = _bind(instance, provider)
    stats = SolveStats()
    forest = SteinerForest(terminals)
    comps: dict[int, Component] = {}
    for t in terminals:
        comps[t] = init_component(t, graph, t, terminals, heuristic, eager=eager)
        stats.expanded += 1
    order = sorted(terminals)
    pending: list[ConfirmedPath] = []
    confirmed: list[ConfirmedPath] = []

    while not forest.spanning:
        stats.iterations += 1
        best = None
        for t in order:
            nom = frontier(comps[t])
            if nom is not None and (best is None or nom < best):
                best = nom
        if best is None:
            if not pending:
                raise Unsolvable("terminals are not connected")
            # every frontier is exhausted, so nothing cheaper can appear
            before = len(forest.accepted)
            update_steiner_tree(forest, pending, comps, terminals, INF)
            if len(forest.accepted) == before and not forest.spanning:
                raise Unsolvable("terminals are not connected")
            continue
        tstar = best.component
        comp = comps[tstar]
        u = comp.expand()
        stats.expanded += 1
        if trace is not None:
            trace(stats.expanded, tstar, u, best.g, best.f)
        if u in comp.dest:
            nodes, cost = comp.reconstruct_path(u)
            path = ConfirmedPath((tstar, u), cost, tuple(nodes))
            pending.append(path)
            confirmed.append(path)
            stats.confirmed_at.append(stats.expanded)
            if reprioritize:
                comp.reprioritize({u})
                comps[u].reprioritize({tstar})
        update_steiner_tree(forest, pending, comps, terminals)

    stats.confirmed = len(confirmed)
    stats.time_ms = (time.perf_counter() - start) * 1000
    return SolveResult(forest, stats, confirmed)


class _MergedRun:
    def __init__(self, instance, heuristic, criterion, reprioritize, trace, eager):
        self.instance = instance
        self.graph = instance.graph
        self.terminals = instance.terminals
        self.heuristic = heuristic
        self.criterion = criterion
        self.confirm = CONFIRM[criterion]
        self.reprioritize = reprioritize
        self.trace = trace
        self.eager = eager
        self.c_min = self.graph.min_edge_cost
        self.stats = SolveStats()
        self.forest = SteinerForest(self.terminals)
        self.table = PairMeetTable()
        self.reach: dict[int, set[int]] = {}
        self.comps: dict[int, Component] = {}
        self.comp_of: dict[int, int] = {}
        self.emitted: dict[tuple[int, int], int] = {}
        self.pending: list[ConfirmedPath] = []
        self.confirmed: list[ConfirmedPath] = []
        self.next_id = 0

    def on_improve(self, comp: Component, v: int, g: int) -> None:
        ids = self.reach.get(v)
        if ids is None:
            self.reach[v] = {comp.id}
            return
        for other in ids:
            if other != comp.id:
                self.table.offer(comp.id, other, g + self.comps[other].g[v], v)
        ids.add(comp.id)

    def init(self) -> None:
        for t in self.terminals:
            cid = self.next_id
            self.next_id += 1
            self.comps[cid] = None  # reachable through on_improve during init
            comp = init_component(cid, self.graph, t, self.terminals, self.heuristic,
                                  on_improve=self._init_improve(cid), eager=self.eager)
            self.comps[cid] = comp
            self.comp_of[t] = cid
            self.stats.expanded += 1

    def _init_improve(self, cid):
        def hook(comp, v, g):
            self.comps[cid] = comp
            self.on_improve(comp, v, g)
        return hook

    def live(self) -> list[Component]:
        # ids only grow and dicts keep insertion order, so this is id order
        return list(self.comps.values())

    def check_pair(self, a: Component, b: Component) -> None:
        cost, witness = self.table.get(a.id, b.id)
        if cost == INF:
            return
        key = (a.id, b.id) if a.id < b.id else (b.id, a.id)
        if cost >= self.emitted.get(key, INF):
            return
        if not self.confirm(pair_state(a, b, cost, self.c_min, self.criterion)):
            return
        path = meet_path(a, b, witness)
        self.emitted[key] = cost
        self.pending.append(path)
        self.confirmed.append(path)
        self.stats.confirmed_at.append(self.stats.expanded)
        if self.reprioritize:
            a.reprioritize(b.terminals)
            b.reprioritize(a.terminals)

    def check_partners(self, comp: Component) -> None:
        """Check ``comp`` against every component it already meets (id order)."""
        for other in sorted(self.table.partners.get(comp.id, ())):
            if other in self.comps:
                self.check_pair(comp, self.comps[other])

    def check_all_pairs(self) -> None:
        live = self.live()
        for i, a in enumerate(live):
            for b in live[i + 1:]:
                self.check_pair(a, b)

    def merge(self, a: Component, b: Component) -> Component:
        cid = self.next_id
        self.next_id += 1
        merged = merge_components(a, b, cid, eager=self.eager)
        del self.comps[a.id], self.comps[b.id]
        others = sorted(self.comps)
        self.table.merge(a.id, b.id, cid, others)
        for key in [k for k in self.emitted if a.id in k or b.id in k]:
            x = key[0] if key[1] in (a.id, b.id) else key[1]
            if x in (a.id, b.id):
                del self.emitted[key]
                continue
            new_key = (min(cid, x), max(cid, x))
            self.emitted[new_key] = min(self.emitted.get(new_key, INF), self.emitted.pop(key))
        for u in merged.support():
            ids = self.reach[u]
            ids.discard(a.id)
            ids.discard(b.id)
            ids.add(cid)
        self.comps[cid] = merged
        for t in merged.terminals:
            self.comp_of[t] = cid
        for u in merged.repaired:
            for other in self.reach[u]:
                if other != cid:
                    self.table.offer(cid, other, merged.g[u] + self.comps[other].g[u], u)
        return merged

    def update(self, fstar: float | None = None) -> list[Component]:
        """Accept pending paths with cost <= f*, merging components as they join."""
        if not self.pending:
            return []
        if fstar is None:
            fstar = merged_fstar(self.live())
        keep, new = [], []
        for p in sorted(self.pending, key=lambda p: p.key):
            if not self.forest.connects(p):
                continue
            if p.cost > fstar:
                keep.append(p)
                continue
            self.forest.accept(p)
            a = self.comps[self.comp_of[p.endpoints[0]]]
            b = self.comps[self.comp_of[p.endpoints[1]]]
            merged = self.merge(a, b)
            new = [c for c in new if c.id in self.comps] + [merged]
        self.pending[:] = keep
        return new

    def run(self) -> SolveResult:
        start = time.perf_counter()
        self.init()
        self.check_all_pairs()
        self.after_update(self.update())
        stats = self.stats
        while len(self.comps) > 1:
            stats.iterations += 1
            best = None
            for comp in self.live():
                nom = frontier(comp)
                if nom is not None and (best is None or nom < best):
                    best = nom
            if best is None:
                self.check_all_pairs()
                n = len(self.comps)
                self.after_update(self.update(INF))
                if len(self.comps) == n:
                    raise Unsolvable("terminals are not connected")
                continue
            astar = self.comps[best.component]
            u = astar.expand(self.on_improve)
            stats.expanded += 1
            if self.trace is not None:
                self.trace(stats.expanded, astar.id, u, best.g, best.f)
            self.check_partners(astar)
            self.after_update(self.update())
        stats.confirmed = len(self.confirmed)
        stats.time_ms = (time.perf_counter() - start) * 1000
        return SolveResult(self.forest, stats, self.confirmed)

    def after_update(self, merged: list[Component]) -> None:
        # a merge changes the frontier summaries of the new component's pairs
        for comp in merged:
            if comp.id not in self.comps:
                continue
            self.check_partners(comp)


def solve_merged(instance: Instance, provider: HeuristicProvider | None = None,
                 criterion: Criterion | str = Criterion.MM, reprioritize: bool = False, *,
                 bs_nominate_by_g: bool = True, trace: TraceSink | None = None,
                 eager: bool = False) -> SolveResult:
    """S*-merged specialised by a path-confirmation criterion.

    With ``bs_nominate_by_g`` the BS variant ignores the heuristic entirely
    (nomination and f* both use g), i.e. the classic primal-dual search.
    """
    _check_terminals(instance)
    criterion = Criterion(criterion)
    if criterion is Criterion.BS and bs_nominate_by_g:
        heuristic = ZERO
    else:
        heuristic = _bind(instance, provider)
    return _MergedRun(instance, heuristic, criterion, reprioritize, trace, eager).run()


SOLVERS = ("kruskal", "unmerged", "hs", "bs", "mm")


def steiner_tree(instance: Instance, provider: HeuristicProvider | None, solver: str,
                 reprioritize: bool = False, **kw) -> SolveResult:
    """Dispatch by solver name: kruskal, unmerged, hs, bs or mm."""
    solver = solver.lower()
    if solver in ("kruskal", "unmerged"):
        kw.pop("bs_nominate_by_g", None)
    if solver == "kruskal":
        from .baseline import solve_kruskal

        return solve_kruskal(instance)
    if solver == "unmerged":
        return solve_unmerged(instance, provider, reprioritize, **kw)
    if solver in ("hs", "bs", "mm"):
        return solve_merged(instance, provider, solver.upper(), reprioritize, **kw)
    raise ValueError(f"unknown solver {solver!r}")
