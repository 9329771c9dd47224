"""Graph builders and hypothesis strategies shared by the test modules."""

from hypothesis import assume
from hypothesis import strategies as st

from sstar.graph import Instance, connected_components, from_edges, grid_graph


# Expanded-node counts measured on the shipped fixtures, frozen as regression
# anchors.  Only the inequalities between them are claims about the method.
FIXTURE_GOLDENS = {
    ("appendix-weak-h", "hs"): 66,
    ("appendix-weak-h", "bs"): 53,
    ("appendix-strong-h", "unmerged"): 33,
    ("appendix-strong-h", "bs"): 53,
}


@st.composite
def grids(draw, min_side=2, max_side=7, density=0.25):
    h = draw(st.integers(min_side, max_side))
    w = draw(st.integers(min_side, max_side))
    cells = draw(st.lists(st.floats(0, 1), min_size=h * w, max_size=h * w))
    return [[cells[r * w + c] >= density for c in range(w)] for r in range(h)]


@st.composite
def grid_graphs(draw, min_nodes=1, **kw):
    g = grid_graph(draw(grids(**kw)))
    assume(g.num_nodes >= min_nodes)
    return g


@st.composite
def weighted_graphs(draw, min_nodes=2, max_nodes=12):
    """Connected graphs with positive integer costs: a random tree plus extra edges."""
    n = draw(st.integers(min_nodes, max_nodes))
    edges = {}
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges[(u, v)] = draw(st.integers(1, 9)) * 500
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n))
    for u, v in extra:
        if u != v:
            edges.setdefault((min(u, v), max(u, v)), draw(st.integers(1, 9)) * 500)
    return from_edges(n, [(u, v, c) for (u, v), c in edges.items()])


@st.composite
def instances(draw, graphs, max_terms=5):
    """Distinct terminals drawn from the largest connected component of ``graphs``."""
    g = draw(graphs)
    pool = max(connected_components(g), key=len)
    assume(len(pool) >= 2)
    k = draw(st.integers(2, min(max_terms, len(pool))))
    terms = draw(st.lists(st.sampled_from(pool), min_size=k, max_size=k, unique=True))
    return Instance(g, terms[0], terms[1], tuple(terms[2:]))


grid_instances = instances(grid_graphs(max_side=7, min_nodes=2))
edge_instances = instances(weighted_graphs(min_nodes=2, max_nodes=12))


def line_graph(n: int, cost: int = 1000):
    return from_edges(n, [(i, i + 1, cost) for i in range(n - 1)])


def star_graph(leaves: int, cost: int = 1000):
    """Centre 0 with leaves 1..leaves."""
    return from_edges(leaves + 1, [(0, i, cost) for i in range(1, leaves + 1)])
