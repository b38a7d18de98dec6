import random
from collections import deque
from fractions import Fraction

import pytest

from conftest import k2
from tunnelmeet.graph_model import (
    DanglingEdge,
    Disconnected,
    DuplicatePort,
    InvalidPort,
    UnknownNode,
    build_finite_graph,
    dump_graph_json,
    generator,
    generator_origin,
    load_graph_json,
    random_connected_graph,
)


def test_k2_ports():
    g = k2()
    assert g.is_port("A", 1)
    assert not g.is_port("A", 2)
    step = g.traverse("A", 1)
    assert (step.v, step.in_port) == ("B", 1)
    assert step.length == 1


def test_unknown_node_and_invalid_port():
    g = k2()
    with pytest.raises(UnknownNode):
        g.is_port("Z", 1)
    with pytest.raises(InvalidPort):
        g.traverse("A", 2)


def test_is_port_agrees_with_adjacency_table():
    rng = random.Random(3)
    for seed in range(20):
        g = random_connected_graph(5, seed)
        table = {v: set(g.ports(v)) for v in g.nodes}
        for v in g.nodes:
            for p in range(1, 8):
                assert g.is_port(v, p) == (p in table[v])


def test_traverse_symmetry_sweep():
    rng = random.Random(5)
    for seed in range(10):
        g = random_connected_graph(5, seed)
        for _ in range(100):
            v = rng.choice(g.nodes)
            p = rng.choice(g.ports(v))
            step = g.traverse(v, p)
            back = g.traverse(step.v, step.in_port)
            assert (back.v, back.in_port) == (v, p)
            assert back.edge_id == step.edge_id
            assert back.length == step.length


def test_builder_rejections():
    with pytest.raises(DuplicatePort):
        build_finite_graph(
            {
                "nodes": ["A", "B", "C"],
                "edges": [
                    {"u": "A", "pu": 1, "v": "B", "pv": 1},
                    {"u": "A", "pu": 1, "v": "C", "pv": 1},
                ],
            }
        )
    with pytest.raises(Disconnected):
        build_finite_graph(
            {
                "nodes": ["A", "B", "C", "D"],
                "edges": [
                    {"u": "A", "pu": 1, "v": "B", "pv": 1},
                    {"u": "C", "pu": 1, "v": "D", "pv": 1},
                ],
            }
        )
    with pytest.raises(DanglingEdge):
        build_finite_graph(
            {"nodes": ["A"], "edges": [{"u": "A", "pu": 1, "v": "X", "pv": 1}]}
        )


def test_graph_json_round_trip():
    g = random_connected_graph(5, 1)
    doc = dump_graph_json(g)
    g2 = load_graph_json(doc)
    assert dump_graph_json(g2) == doc


def test_infinite_line_convention():
    line = generator("infinite_line")
    origin = generator_origin("infinite_line")
    assert origin == 0
    for p in (1, 2):
        assert line.is_port(origin, p)
    assert not line.is_port(origin, 3)
    assert line.traverse(0, 1).v == 1
    assert line.traverse(0, 2).v == -1
    # repeated port 1 visits pairwise distinct handles
    seen = set()
    node = 0
    for _ in range(100):
        node = line.traverse(node, 1).v
        assert node not in seen
        seen.add(node)


def test_infinite_grid_convention():
    grid = generator("infinite_grid", Fraction(1, 3))
    x = generator_origin("infinite_grid")
    targets = {1: (1, 0), 2: (0, 1), 3: (-1, 0), 4: (0, -1)}
    for p, w in targets.items():
        step = grid.traverse(x, p)
        assert step.v == w
        assert step.length == Fraction(1, 3)
        back = grid.traverse(step.v, step.in_port)
        assert back.v == x
    assert not grid.is_port(x, 5)


def test_binary_tree_radius_three():
    tree = generator("infinite_binary_tree")
    root = generator_origin("infinite_binary_tree")
    seen = {root}
    frontier = deque([(root, 0)])
    while frontier:
        node, d = frontier.popleft()
        if d == 3:
            continue
        for p in (1, 2, 3):
            if not tree.is_port(node, p):
                continue
            other = tree.traverse(node, p).v
            if other not in seen:
                seen.add(other)
                frontier.append((other, d + 1))
    # 1 + 2 + 4 + 8 nodes within three hops of the root
    assert len(seen) == 15
    # parent links go back where they came from
    leaf = tree.traverse(tree.traverse(root, 1).v, 2).v
    parent = tree.traverse(leaf, 3)
    assert parent.v == tree.traverse(root, 1).v
    assert parent.in_port == 2


def test_generator_determinism():
    a = generator("infinite_grid")
    b = generator("infinite_grid")
    for p in (1, 2, 3, 4):
        assert a.traverse((3, -2), p) == b.traverse((3, -2), p)
