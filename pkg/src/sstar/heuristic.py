"""Consistent lower bounds between nodes and terminals.

A :class:`HeuristicProvider` describes the estimate (zero, octile, exact or
ALT) and the weight ``w``.  Solvers call :meth:`HeuristicProvider.bind` once
per instance to get per-terminal lookup tables with the weight already
applied, so ``h(u, S)`` is a handful of list lookups.
"""

from __future__ import annotations

import hashlib
import logging
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .graph import CARDINAL, DIAGONAL, Graph, to_edge_list_text, to_map_text

log = logging.getLogger(__name__)

KINDS = ("zero", "octile", "exact", "alt")
EXACT_MAX_CELLS = 64 * 64
_UNREACHED = -1


class UnsupportedHeuristic(ValueError):
    pass


def octile_estimate(graph: Graph, a: int, b: int) -> int:
    if not graph.is_grid:
        raise UnsupportedHeuristic("octile distance needs grid coordinates")
    (ra, ca), (rb, cb) = graph.coords[a], graph.coords[b]
    dx, dy = abs(ca - cb), abs(ra - rb)
    return CARDINAL * max(dx, dy) + (DIAGONAL - CARDINAL) * min(dx, dy)


def _octile_row(graph: Graph, t: int) -> np.ndarray:
    rc = np.asarray(graph.coords, dtype=np.int64)
    rt, ct = graph.coords[t]
    dy = np.abs(rc[:, 0] - rt)
    dx = np.abs(rc[:, 1] - ct)
    return CARDINAL * np.maximum(dx, dy) + (DIAGONAL - CARDINAL) * np.minimum(dx, dy)


def _csr(graph: Graph) -> csr_matrix:
    # Graph is frozen, so stash the matrix next to its other cached properties
    hit = graph.__dict__.get("_csr_matrix")
    if hit is None:
        hit = graph.__dict__["_csr_matrix"] = _build_csr(graph)
    return hit


def _build_csr(graph: Graph) -> csr_matrix:
    rows, cols, data = [], [], []
    for u, nbrs in enumerate(graph.adj):
        for v, c in nbrs:
            rows.append(u)
            cols.append(v)
            data.append(c)
    n = graph.num_nodes
    return csr_matrix((np.asarray(data, dtype=np.float64), (rows, cols)), shape=(n, n))


def exact_rows(graph: Graph, sources) -> np.ndarray:
    """Least costs from each source to every node, ``-1`` where unreachable."""
    sources = list(sources)
    if not sources:
        return np.zeros((0, graph.num_nodes), dtype=np.int64)
    if graph.min_edge_cost == 0:
        # scipy drops explicit zero weights from sparse input
        from .graph import shortest_path_oracle

        out = np.full((len(sources), graph.num_nodes), _UNREACHED, dtype=np.int64)
        for i, s in enumerate(sources):
            dist, _ = shortest_path_oracle(graph, s)
            for v, d in enumerate(dist):
                if d != float("inf"):
                    out[i, v] = d
        return out
    d = dijkstra(_csr(graph), directed=False, indices=sources)
    d = np.atleast_2d(d)
    out = np.full(d.shape, _UNREACHED, dtype=np.int64)
    finite = np.isfinite(d)
    out[finite] = np.rint(d[finite]).astype(np.int64)
    return out


def graph_digest(graph: Graph) -> str:
    text = to_map_text(graph) if graph.is_grid else to_edge_list_text(graph)
    return hashlib.sha1(text.encode()).hexdigest()[:16]


@dataclass
class LandmarkTable:
    landmarks: list[int]
    dists: np.ndarray  # (len(landmarks), num_nodes), -1 = unreachable
    shortfall: int = 0

    def estimate(self, a: int, b: int) -> int:
        best = 0
        for row in self.dists:
            da, db = row[a], row[b]
            if da >= 0 and db >= 0:
                best = max(best, abs(int(da) - int(db)))
        return best

    def row_to(self, t: int) -> np.ndarray:
        """Landmark bound from every node to ``t``."""
        n = self.dists.shape[1]
        if not self.landmarks:
            return np.zeros(n, dtype=np.int64)
        dt = self.dists[:, t][:, None]
        ok = (self.dists >= 0) & (dt >= 0)
        diff = np.where(ok, np.abs(self.dists - dt), 0)
        return diff.max(axis=0)

    def save(self, path) -> None:
        np.savez(path, landmarks=np.asarray(self.landmarks, dtype=np.int64),
                 dists=self.dists, shortfall=np.asarray(self.shortfall))

    @classmethod
    def load(cls, path) -> "LandmarkTable":
        with np.load(path) as z:
            return cls([int(x) for x in z["landmarks"]], z["dists"], int(z["shortfall"]))


def border_nodes(graph: Graph) -> list[int]:
    if not graph.is_grid:
        return list(range(graph.num_nodes))
    return [u for u in range(graph.num_nodes) if graph.degree(u) < 8]


def select_landmarks(graph: Graph, count: int, seed: int) -> LandmarkTable:
    """Sample ``count`` distinct border nodes (degree < 8) and run Dijkstra from each."""
    if count < 0:
        raise ValueError("landmark count must be non-negative")
    eligible = border_nodes(graph)
    shortfall = max(0, count - len(eligible))
    if shortfall:
        log.warning("only %d eligible landmark nodes, %d requested", len(eligible), count)
    chosen = random.Random(seed).sample(eligible, min(count, len(eligible)))
    return LandmarkTable(chosen, exact_rows(graph, chosen), shortfall)


def cache_dir() -> Path:
    root = os.environ.get("MGPF_CACHE_DIR")
    if root:
        return Path(root)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "mgpf"


def cached_landmarks(graph: Graph, count: int, seed: int, rebuild: bool = False) -> LandmarkTable:
    """Landmark table persisted as ``<digest>-s<seed>-n<count>.npz`` in :func:`cache_dir`."""
    path = cache_dir() / f"{graph_digest(graph)}-s{seed}-n{count}.npz"
    if path.exists() and not rebuild:
        return LandmarkTable.load(path)
    table = select_landmarks(graph, count, seed)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.save(path)
    return table


def as_weight(w) -> Fraction:
    w = Fraction(w)
    if not 0 <= w <= 1:
        raise ValueError(f"weight must lie in [0, 1], got {w}")
    return w


@dataclass(frozen=True)
class HeuristicProvider:
    graph: Graph
    kind: str = "zero"
    weight: Fraction = Fraction(1)
    landmarks: LandmarkTable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedHeuristic(f"unknown heuristic kind {self.kind!r}")
        if self.kind == "octile" and not self.graph.is_grid:
            raise UnsupportedHeuristic("octile distance needs a grid graph")
        object.__setattr__(self, "weight", as_weight(self.weight))

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or self.weight == 0

    def with_weight(self, w) -> "HeuristicProvider":
        return HeuristicProvider(self.graph, self.kind, as_weight(w), self.landmarks)

    def raw_row(self, t: int) -> np.ndarray:
        """Unweighted estimate from every node to terminal ``t``."""
        g = self.graph
        if self.kind == "zero":
            return np.zeros(g.num_nodes, dtype=np.int64)
        if self.kind == "octile":
            return _octile_row(g, t)
        if self.kind == "exact":
            row = exact_rows(g, [t])[0]
            return np.where(row >= 0, row, 0)
        row = self.landmarks.row_to(t) if self.landmarks else np.zeros(g.num_nodes, dtype=np.int64)
        if g.is_grid:
            row = np.maximum(row, _octile_row(g, t))
        return row

    def estimate(self, a: int, b: int) -> int:
        """Unweighted lower bound on the least cost between ``a`` and ``b``."""
        if self.kind == "zero":
            return 0
        if self.kind == "octile":
            return octile_estimate(self.graph, a, b)
        if self.kind == "exact":
            return int(self.raw_row(b)[a])
        return alt_estimate(self.landmarks, self.graph, a, b)

    def scaled(self, value: int) -> int:
        w = self.weight
        return value * w.numerator // w.denominator

    def h(self, u: int, t: int) -> int:
        return self.scaled(self.estimate(u, t))

    def bind(self, terminals) -> "BoundHeuristic":
        terminals = list(terminals)
        if self.is_zero:
            return BoundHeuristic({}, zero=True)
        w = self.weight
        if self.kind == "exact":
            raw = exact_rows(self.graph, terminals)
            raw = np.where(raw >= 0, raw, 0)
            rows = dict(zip(terminals, raw))
        else:
            rows = {t: self.raw_row(t) for t in terminals}
        return BoundHeuristic(
            {t: ((row * w.numerator) // w.denominator).tolist() for t, row in rows.items()}
        )


def alt_estimate(table: LandmarkTable | None, graph: Graph, a: int, b: int) -> int:
    """Best landmark bound, maxed with octile on grids (zero fallback elsewhere)."""
    best = table.estimate(a, b) if table is not None else 0
    if graph.is_grid:
        best = max(best, octile_estimate(graph, a, b))
    return best


def h_to_set(provider: HeuristicProvider, u: int, targets) -> int:
    """Weighted ``min_{t in targets} h_t(u)``; 0 for an empty set."""
    return min((provider.h(u, t) for t in targets), default=0)


class BoundHeuristic:
    """Per-terminal weighted tables for one instance."""

    def __init__(self, tables: dict[int, list[int]], zero: bool = False):
        self.tables = tables
        self.zero = zero

    def h(self, u: int, t: int) -> int:
        return 0 if self.zero else self.tables[t][u]

    def h_to_set(self, u: int, targets) -> int:
        if self.zero or not targets:
            return 0
        return min(self.tables[t][u] for t in targets)


ZERO = BoundHeuristic({}, zero=True)


def make_provider(graph: Graph, kind: str = "auto", weight=1, *, landmark_count: int = 100,
                  landmark_seed: int = 0, use_cache: bool = True) -> HeuristicProvider:
    """``auto`` picks exact tables for maps up to 64x64 (and non-grids), ALT beyond."""
    if kind == "auto":
        small = not graph.is_grid or graph.width * graph.height <= EXACT_MAX_CELLS
        kind = "exact" if small else "alt"
    table = None
    if kind == "alt":
        if use_cache:
            table = cached_landmarks(graph, landmark_count, landmark_seed)
        else:
            table = select_landmarks(graph, landmark_count, landmark_seed)
    return HeuristicProvider(graph, kind, as_weight(weight), table)
