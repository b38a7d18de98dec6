import random

import pytest

from conftest import k2
from tunnelmeet.graph_model import random_connected_graph
from tunnelmeet.routes import (
    dump_route,
    empty_route,
    parse_route_dump,
    reverse_route,
    route_from_steps,
)


def random_walk_route(g, start, length, rng):
    steps = []
    node = start
    for _ in range(length):
        port = rng.choice(g.ports(node))
        step = g.traverse(node, port)
        steps.append(step)
        node = step.v
    return route_from_steps(start, steps)


def test_reverse_empty():
    r = empty_route("A")
    rr = reverse_route(r)
    assert len(rr) == 0
    assert rr.start == "A"


def test_reverse_single_edge():
    g = k2()
    r = route_from_steps("A", [g.traverse("A", 1)])
    rr = reverse_route(r)
    steps = list(rr.steps())
    assert [(s.u, s.out_port, s.v, s.in_port) for s in steps] == [("B", 1, "A", 1)]


def test_double_reverse_is_identity_on_random_routes():
    rng = random.Random(13)
    for seed in range(40):
        g = random_connected_graph(5, seed % 8)
        start = rng.choice(g.nodes)
        r = random_walk_route(g, start, rng.randint(0, 25), rng)
        rr = reverse_route(reverse_route(r))
        assert rr.start == r.start
        assert list(rr.steps()) == list(r.steps())


def test_route_followed_by_reverse_is_closed():
    rng = random.Random(17)
    g = random_connected_graph(5, 2)
    r = random_walk_route(g, g.nodes[0], 9, rng)
    rr = reverse_route(r)
    assert rr.end == r.start


def test_chaining_validated():
    g = k2()
    step = g.traverse("A", 1)
    with pytest.raises(ValueError):
        route_from_steps("B", [step])


def test_node_after_and_step_at():
    rng = random.Random(19)
    g = random_connected_graph(5, 4)
    r = random_walk_route(g, g.nodes[1], 12, rng)
    steps = list(r.steps())
    assert r.node_after(0) == r.start
    for i, step in enumerate(steps):
        assert r.step_at(i) == step
        assert r.node_after(i + 1) == step.v
    assert r.end == steps[-1].v


def test_dump_and_parse_round_trip():
    rng = random.Random(23)
    g = random_connected_graph(4, 5)
    r = random_walk_route(g, g.nodes[0], 6, rng)
    r.phase_marks = [(1, 0), (2, 2), (3, 6)]
    text = dump_route(r)
    back = parse_route_dump(text)
    assert [(s.u, s.out_port, s.v, s.in_port) for s in back.steps()] == [
        (s.u, s.out_port, s.v, s.in_port) for s in r.steps()
    ]
    assert back.phase_marks == r.phase_marks
    assert dump_route(back) == text


def test_empty_dump_keeps_start():
    r = empty_route("A")
    text = dump_route(r)
    assert text.startswith("# start A")
    back = parse_route_dump(text)
    assert back.start == "A"
    assert len(back) == 0


def test_prefix():
    rng = random.Random(29)
    g = random_connected_graph(5, 6)
    r = random_walk_route(g, g.nodes[0], 10, rng)
    r.phase_marks = [(1, 0), (2, 4)]
    p = r.prefix(4)
    assert len(p) == 4
    assert list(p.steps()) == list(r.steps())[:4]
    assert p.phase_marks == [(1, 0), (2, 4)]
