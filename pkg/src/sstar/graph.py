"""Graphs, MAPF ``.map`` ingestion and the exact Dijkstra oracle.

Edge costs are fixed-point integers: one grid unit is 1000, a diagonal step
is 1414.  Node ids are dense and assigned row-major over passable cells.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property

CARDINAL = 1000
DIAGONAL = 1414
INF = math.inf

PASSABLE = frozenset(".G")
BLOCKED = frozenset("@OTW")


class MapParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with integer costs.

    Grid graphs also carry ``width``/``height``/``passable`` (row-major cells)
    and ``coords`` (row, col) per node; plain edge-list graphs leave them None.
    """

    adj: tuple[tuple[tuple[int, int], ...], ...]
    width: int | None = None
    height: int | None = None
    passable: tuple[bool, ...] | None = None
    coords: tuple[tuple[int, int], ...] | None = None

    @property
    def num_nodes(self) -> int:
        return len(self.adj)

    @property
    def is_grid(self) -> bool:
        return self.coords is not None

    def edges(self):
        """Yield each undirected edge once as ``(u, v, cost)`` with ``u < v``."""
        for u, nbrs in enumerate(self.adj):
            for v, c in nbrs:
                if u < v:
                    yield u, v, c

    @property
    def num_edges(self) -> int:
        return sum(len(n) for n in self.adj) // 2

    @cached_property
    def _edge_costs(self) -> dict[tuple[int, int], int]:
        return {(u, v): c for u, v, c in self.edges()}

    def edge_cost(self, u: int, v: int) -> int | None:
        return self._edge_costs.get((u, v) if u < v else (v, u))

    @cached_property
    def min_edge_cost(self) -> int:
        return min((c for _, _, c in self.edges()), default=0)

    @cached_property
    def cell_to_node(self) -> dict[tuple[int, int], int]:
        if self.coords is None:
            return {}
        return {rc: i for i, rc in enumerate(self.coords)}

    def node_at(self, row: int, col: int) -> int:
        try:
            return self.cell_to_node[(row, col)]
        except KeyError:
            raise ValueError(f"cell ({row}, {col}) is not a passable node") from None

    def degree(self, u: int) -> int:
        return len(self.adj[u])


def grid_graph(passable: list[list[bool]]) -> Graph:
    """Build the 8-connected graph of a boolean grid, no corner cutting."""
    height = len(passable)
    width = len(passable[0]) if height else 0
    ids: dict[tuple[int, int], int] = {}
    coords = []
    for r in range(height):
        for c in range(width):
            if passable[r][c]:
                ids[(r, c)] = len(coords)
                coords.append((r, c))

    def free(r, c):
        return 0 <= r < height and 0 <= c < width and passable[r][c]

    adj = []
    for r, c in coords:
        nbrs = []
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == dc == 0 or not free(r + dr, c + dc):
                    continue
                if dr and dc:
                    if not (free(r + dr, c) and free(r, c + dc)):
                        continue
                    nbrs.append((ids[(r + dr, c + dc)], DIAGONAL))
                else:
                    nbrs.append((ids[(r + dr, c + dc)], CARDINAL))
        nbrs.sort()
        adj.append(tuple(nbrs))
    flat = tuple(passable[r][c] for r in range(height) for c in range(width))
    return Graph(tuple(adj), width, height, flat, tuple(coords))


def parse_map(text: str) -> Graph:
    """Parse MAPF/MovingAI ``.map`` text into a grid graph."""
    lines = text.splitlines()
    header = {}
    expected = ("type", "height", "width", "map")
    for i, key in enumerate(expected):
        if i >= len(lines):
            raise MapParseError(i + 1, f"missing '{key}' header")
        parts = lines[i].split()
        if not parts or parts[0] != key:
            raise MapParseError(i + 1, f"expected '{key}' header, got {lines[i]!r}")
        if key == "map":
            if len(parts) != 1:
                raise MapParseError(i + 1, "malformed 'map' line")
            continue
        if len(parts) != 2:
            raise MapParseError(i + 1, f"malformed '{key}' header")
        header[key] = parts[1]
    if header["type"] != "octile":
        raise MapParseError(1, f"unsupported map type {header['type']!r}")
    try:
        height, width = int(header["height"]), int(header["width"])
    except ValueError:
        raise MapParseError(2, "height/width must be integers") from None
    if height <= 0 or width <= 0:
        raise MapParseError(2, "height/width must be positive")

    rows = lines[4:]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != height:
        raise MapParseError(5 + min(len(rows), height), f"expected {height} rows, found {len(rows)}")
    grid = []
    for r, row in enumerate(rows):
        lineno = r + 5
        row = row.rstrip("\r")
        if len(row) != width:
            raise MapParseError(lineno, f"row has {len(row)} cells, expected {width}")
        cells = []
        for ch in row:
            if ch in PASSABLE:
                cells.append(True)
            elif ch in BLOCKED:
                cells.append(False)
            else:
                raise MapParseError(lineno, f"unknown map character {ch!r}")
        grid.append(cells)
    return grid_graph(grid)


def to_map_text(graph: Graph) -> str:
    if not graph.is_grid:
        raise ValueError("only grid graphs serialize to .map text")
    out = ["type octile", f"height {graph.height}", f"width {graph.width}", "map"]
    for r in range(graph.height):
        row = graph.passable[r * graph.width:(r + 1) * graph.width]
        out.append("".join("." if p else "@" for p in row))
    return "\n".join(out) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Parse ``nodes N`` followed by ``u v cost`` lines (``#`` comments allowed)."""
    n = None
    edges: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "nodes":
                raise MapParseError(lineno, "expected 'nodes N' header")
            try:
                n = int(parts[1])
            except ValueError:
                raise MapParseError(lineno, "node count must be an integer") from None
            if n <= 0:
                raise MapParseError(lineno, "node count must be positive")
            continue
        if len(parts) != 3:
            raise MapParseError(lineno, "expected 'u v cost'")
        try:
            u, v, c = (int(p) for p in parts)
        except ValueError:
            raise MapParseError(lineno, "edge fields must be integers") from None
        if not (0 <= u < n and 0 <= v < n) or u == v or c < 0:
            raise MapParseError(lineno, f"invalid edge {u} {v} {c}")
        key = (min(u, v), max(u, v))
        if key in edges:
            raise MapParseError(lineno, f"duplicate edge {u} {v}")
        edges[key] = c
    if n is None:
        raise MapParseError(1, "missing 'nodes N' header")
    return from_edges(n, [(u, v, c) for (u, v), c in edges.items()])


def from_edges(n: int, edges) -> Graph:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v, c in edges:
        adj[u].append((v, c))
        adj[v].append((u, c))
    return Graph(tuple(tuple(sorted(a)) for a in adj))


def to_edge_list_text(graph: Graph) -> str:
    lines = [f"nodes {graph.num_nodes}"]
    lines += [f"{u} {v} {c}" for u, v, c in graph.edges()]
    return "\n".join(lines) + "\n"


def load_graph(path) -> Graph:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("nodes"):
        return parse_edge_list(text)
    return parse_map(text)


def shortest_path_oracle(graph: Graph, source: int) -> tuple[list[float], list[int | None]]:
    """Plain uniform-cost search; unreachable nodes get ``INF``."""
    dist: list[float] = [INF] * graph.num_nodes
    parent: list[int | None] = [None] * graph.num_nodes
    dist[source] = 0
    heap = [(0, source)]
    done = [False] * graph.num_nodes
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, c in graph.adj[u]:
            nd = d + c
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def connected_components(graph: Graph) -> list[list[int]]:
    seen = [False] * graph.num_nodes
    comps = []
    for start in range(graph.num_nodes):
        if seen[start]:
            continue
        seen[start] = True
        stack, comp = [start], []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v, _ in graph.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def path_cost(graph: Graph, nodes) -> int:
    """Sum of edge costs along ``nodes``; raises if a hop is not an edge."""
    total = 0
    for a, b in zip(nodes, nodes[1:]):
        c = graph.edge_cost(a, b)
        if c is None:
            raise ValueError(f"({a}, {b}) is not an edge")
        total += c
    return total


@dataclass(frozen=True)
class Instance:
    graph: Graph
    origin: int
    destination: int
    goals: tuple[int, ...] = ()

    @property
    def terminals(self) -> tuple[int, ...]:
        return (self.origin, self.destination, *self.goals)

    def validate(self) -> None:
        ts = self.terminals
        if len(set(ts)) != len(ts):
            raise ValueError("terminals must be distinct")
        for t in ts:
            if not 0 <= t < self.graph.num_nodes:
                raise ValueError(f"terminal {t} is not a node")
        dist, _ = shortest_path_oracle(self.graph, self.origin)
        unreachable = [t for t in ts if dist[t] == INF]
        if unreachable:
            raise ValueError(f"terminals {unreachable} are disconnected from the origin")
