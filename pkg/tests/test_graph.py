import math

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import grid_graphs, grids, line_graph, weighted_graphs
from oracles import distances_from, to_nx
from sstar.graph import (
    CARDINAL,
    DIAGONAL,
    Instance,
    MapParseError,
    connected_components,
    from_edges,
    grid_graph,
    load_graph,
    parse_edge_list,
    parse_map,
    path_cost,
    shortest_path_oracle,
    to_edge_list_text,
    to_map_text,
)


def map_text(*rows):
    return "\n".join(["type octile", f"height {len(rows)}", f"width {len(rows[0])}", "map",
                      *rows]) + "\n"


def edge_census(graph):
    costs = [c for _, _, c in graph.edges()]
    return costs.count(CARDINAL), costs.count(DIAGONAL)


def test_single_cell_map():
    g = parse_map(map_text("."))
    assert g.num_nodes == 1
    assert g.num_edges == 0


def test_open_2x2_has_four_cardinal_and_two_diagonal_edges():
    g = parse_map(map_text("..", ".."))
    assert g.num_nodes == 4
    assert edge_census(g) == (4, 2)


def test_blocked_corner_removes_both_diagonals():
    g = parse_map(map_text(".@", ".."))
    assert g.num_nodes == 3
    assert edge_census(g) == (2, 0)


def test_passable_and_blocked_characters():
    g = parse_map(map_text(".G@", "OTW"))
    assert g.num_nodes == 2
    assert g.coords == ((0, 0), (0, 1))


def test_node_ids_are_row_major_over_passable_cells():
    g = parse_map(map_text(".@.", "..."))
    assert g.coords == ((0, 0), (0, 2), (1, 0), (1, 1), (1, 2))
    assert g.node_at(1, 1) == 3
    with pytest.raises(ValueError):
        g.node_at(0, 1)


@pytest.mark.parametrize("text, line", [
    ("type grid\nheight 1\nwidth 1\nmap\n.\n", 1),
    ("type octile\nheight x\nwidth 1\nmap\n.\n", 2),
    ("type octile\nwidth 1\nheight 1\nmap\n.\n", 2),
    ("type octile\nheight 2\nwidth 2\nmap\n..\n.\n", 6),
    ("type octile\nheight 2\nwidth 2\nmap\n..\n", 6),
    ("type octile\nheight 1\nwidth 2\nmap\n.x\n", 5),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(MapParseError) as err:
        parse_map(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_edge_list_parsing():
    g = parse_edge_list("# comment\nnodes 3\n0 1 1000\n1 2 1414  # diagonal\n")
    assert g.num_nodes == 3
    assert g.edge_cost(2, 1) == 1414
    assert g.edge_cost(0, 2) is None
    assert not g.is_grid


@pytest.mark.parametrize("text", [
    "0 1 1000\n", "nodes 2\n0 1\n", "nodes 2\n0 2 5\n", "nodes 2\n0 1 5\n1 0 5\n",
    "nodes 2\n0 0 5\n", "nodes 2\n0 1 -1\n", "",
])
def test_edge_list_errors(text):
    with pytest.raises(MapParseError):
        parse_edge_list(text)


def test_line_oracle():
    dist, parent = shortest_path_oracle(line_graph(3), 0)
    assert dist == [0, 1000, 2000]
    assert parent == [None, 0, 1]


def test_isolated_source():
    g = from_edges(3, [(1, 2, 1000)])
    dist, _ = shortest_path_oracle(g, 0)
    assert dist[0] == 0
    assert dist[1] == dist[2] == math.inf


def test_diagonal_beats_two_cardinal_steps():
    g = parse_map(map_text("..", ".."))
    dist, _ = shortest_path_oracle(g, g.node_at(0, 0))
    assert dist[g.node_at(1, 1)] == 1414


def test_load_graph_detects_format(tmp_path):
    (tmp_path / "a.map").write_text(map_text("..", ".."))
    (tmp_path / "b.edges").write_text("nodes 2\n0 1 7\n")
    assert load_graph(tmp_path / "a.map").is_grid
    assert load_graph(tmp_path / "b.edges").edge_cost(0, 1) == 7


def test_path_cost_rejects_non_edges():
    g = line_graph(4)
    assert path_cost(g, [0, 1, 2]) == 2000
    with pytest.raises(ValueError):
        path_cost(g, [0, 2])


def test_instance_validation():
    g = from_edges(4, [(0, 1, 1000), (2, 3, 1000)])
    Instance(g, 0, 1).validate()
    with pytest.raises(ValueError):
        Instance(g, 0, 0).validate()
    with pytest.raises(ValueError):
        Instance(g, 0, 1, (2,)).validate()
    with pytest.raises(ValueError):
        Instance(g, 0, 9).validate()


@given(grid_graphs())
def test_map_round_trip(g):
    again = parse_map(to_map_text(g))
    assert again == g


@given(weighted_graphs())
def test_edge_list_round_trip(g):
    assert parse_edge_list(to_edge_list_text(g)) == g


@given(grids())
def test_grid_invariants(cells):
    g = grid_graph(cells)
    assert len(set(g.coords)) == g.num_nodes
    for r, c in g.coords:
        assert cells[r][c]
    for u, nbrs in enumerate(g.adj):
        for v, c in nbrs:
            assert g.edge_cost(v, u) == c
            (ru, cu), (rv, cv) = g.coords[u], g.coords[v]
            assert max(abs(ru - rv), abs(cu - cv)) == 1
            if ru != rv and cu != cv:
                assert c == DIAGONAL
                assert cells[ru][cv] and cells[rv][cu]
            else:
                assert c == CARDINAL


@given(weighted_graphs(), st.data())
def test_oracle_matches_networkx(g, data):
    src = data.draw(st.integers(0, g.num_nodes - 1))
    dist, parent = shortest_path_oracle(g, src)
    ref = distances_from(to_nx(g), src)
    for v in range(g.num_nodes):
        assert dist[v] == ref.get(v, math.inf)
        if v != src and dist[v] != math.inf:
            assert dist[v] == dist[parent[v]] + g.edge_cost(v, parent[v])


@given(grid_graphs(max_side=6), st.data())
def test_symmetry_and_triangle_inequality(g, data):
    if g.num_nodes < 3:
        return
    a, b, c = (data.draw(st.integers(0, g.num_nodes - 1)) for _ in range(3))
    da, db = shortest_path_oracle(g, a)[0], shortest_path_oracle(g, b)[0]
    assert da[b] == db[a]
    assert da[c] <= da[b] + db[c]


@given(grid_graphs())
def test_components_partition_the_nodes(g):
    comps = connected_components(g)
    assert sorted(u for comp in comps for u in comp) == list(range(g.num_nodes))
    ref = {frozenset(c) for c in nx.connected_components(to_nx(g))}
    assert {frozenset(c) for c in comps} == ref
