"""Deterministic synthetic benchmark maps and instance sampling."""

from __future__ import annotations

import random

from .graph import Graph, Instance, connected_components, grid_graph, to_map_text

SYNTHETIC = {
    "open-32": ("open", 32, 0),
    "maze-32": ("maze", 32, 0),
    "random-32": ("random", 32, 0),
    "random-64": ("random", 64, 0),
}


def open_grid(size: int) -> list[list[bool]]:
    return [[True] * size for _ in range(size)]


def random_grid(size: int, density: float = 0.2, seed: int = 0) -> list[list[bool]]:
    rng = random.Random(seed)
    return [[rng.random() >= density for _ in range(size)] for _ in range(size)]


def maze_grid(size: int, corridor: int = 2, seed: int = 0) -> list[list[bool]]:
    """Depth-first maze with ``corridor``-wide passages and one-cell walls."""
    rng = random.Random(seed)
    step = corridor + 1
    cells = (size - 1) // step
    grid = [[False] * size for _ in range(size)]

    def carve(r0, c0, h, w):
        for r in range(r0, min(r0 + h, size)):
            for c in range(c0, min(c0 + w, size)):
                grid[r][c] = True

    seen = {(0, 0)}
    stack = [(0, 0)]
    carve(1, 1, corridor, corridor)
    while stack:
        r, c = stack[-1]
        nbrs = [(r + dr, c + dc) for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0))
                if 0 <= r + dr < cells and 0 <= c + dc < cells and (r + dr, c + dc) not in seen]
        if not nbrs:
            stack.pop()
            continue
        nr, nc = rng.choice(nbrs)
        seen.add((nr, nc))
        carve(1 + nr * step, 1 + nc * step, corridor, corridor)
        # knock out the wall between the two cells
        top, left = 1 + min(r, nr) * step, 1 + min(c, nc) * step
        if nr != r:
            carve(top + corridor, left, 1, corridor)
        else:
            carve(top, left + corridor, corridor, 1)
        stack.append((nr, nc))
    return grid


def synthetic_grid(name: str) -> list[list[bool]]:
    try:
        kind, size, seed = SYNTHETIC[name]
    except KeyError:
        raise ValueError(f"unknown synthetic map {name!r}; choose from {sorted(SYNTHETIC)}") from None
    if kind == "open":
        return open_grid(size)
    if kind == "maze":
        return maze_grid(size, seed=seed)
    return random_grid(size, 0.2, seed=seed)


def synthetic_map(name: str) -> Graph:
    return grid_graph(synthetic_grid(name))


def synthetic_map_text(name: str) -> str:
    return to_map_text(synthetic_map(name))


def load_map_spec(spec: str) -> tuple[str, Graph]:
    """``synthetic:<name>`` or a path to a ``.map`` / edge-list file."""
    from pathlib import Path

    from .graph import load_graph

    if spec.startswith("synthetic:"):
        name = spec.split(":", 1)[1]
        return name, synthetic_map(name)
    return Path(spec).stem, load_graph(spec)


def largest_component(graph: Graph) -> list[int]:
    comps = connected_components(graph)
    return max(comps, key=lambda c: (len(c), -c[0])) if comps else []


def generate_instance(graph: Graph, n: int, seed: int) -> Instance:
    """Sample ``n`` distinct terminals from the largest connected component.

    The first sample is the origin, the second the destination, the rest goals.
    """
    if n < 2:
        raise ValueError("an instance needs at least origin and destination")
    pool = largest_component(graph)
    if len(pool) < n:
        raise ValueError(f"largest component has {len(pool)} nodes, need {n}")
    picks = random.Random(seed).sample(pool, n)
    return Instance(graph, picks[0], picks[1], tuple(picks[2:]))

