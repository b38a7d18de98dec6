"""Anonymous port-labeled graphs.

A graph is exposed through a two-method oracle: ``is_port`` and
``traverse``.  Agents never see node names, only local port numbers, so
everything downstream (route construction, tunnel checking) works
against this interface.  Finite graphs are validated adjacency tables;
the lazy generators realize infinite graphs with canonical coordinate
handles.  Nodes of infinite degree are representable (``is_port`` is the
only total query), though no built-in generator has one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Hashable

NodeHandle = Hashable
EdgeId = Hashable

GRAPH_SCHEMA = "graph-v1"


class GraphError(Exception):
    """Base class for graph construction and query failures."""


class UnknownNode(GraphError):
    pass


class InvalidPort(GraphError):
    pass


class DuplicatePort(GraphError):
    pass


class DanglingEdge(GraphError):
    pass


class Disconnected(GraphError):
    """The model requires connected graphs; disconnected input is rejected."""


@dataclass(frozen=True)
class EdgeTraversal:
    """One directed edge traversal: leave ``u`` by ``out_port``, enter
    ``v`` by ``in_port``.  ``edge_id`` names the undirected edge."""

    u: NodeHandle
    out_port: int
    v: NodeHandle
    in_port: int
    edge_id: EdgeId
    length: Fraction

    def reversed(self) -> "EdgeTraversal":
        return EdgeTraversal(
            self.v, self.in_port, self.u, self.out_port, self.edge_id, self.length
        )


class PortLabeledGraph:
    """Oracle interface: port validity and traversal."""

    def is_port(self, v: NodeHandle, p: int) -> bool:
        raise NotImplementedError

    def traverse(self, v: NodeHandle, p: int) -> EdgeTraversal:
        raise NotImplementedError


class FiniteGraph(PortLabeledGraph):
    """Validated finite port-labeled graph with an adjacency table."""

    def __init__(self, nodes: list, adjacency: dict):
        # adjacency: node -> {port: (other, other_port, edge_id, length)}
        self._nodes = list(nodes)
        self._adj = adjacency

    @property
    def nodes(self) -> list:
        return list(self._nodes)

    def ports(self, v: NodeHandle) -> list[int]:
        self._check_node(v)
        return sorted(self._adj[v])

    def degree(self, v: NodeHandle) -> int:
        self._check_node(v)
        return len(self._adj[v])

    def is_port(self, v: NodeHandle, p: int) -> bool:
        self._check_node(v)
        return p in self._adj[v]

    def traverse(self, v: NodeHandle, p: int) -> EdgeTraversal:
        self._check_node(v)
        entry = self._adj[v].get(p)
        if entry is None:
            raise InvalidPort(f"{p} is not a port at {v!r}")
        other, other_port, edge_id, length = entry
        return EdgeTraversal(v, p, other, other_port, edge_id, length)

    def _check_node(self, v: NodeHandle) -> None:
        if v not in self._adj:
            raise UnknownNode(repr(v))


def build_finite_graph(spec: dict) -> FiniteGraph:
    """Build and validate a finite graph from an adjacency description.

    ``spec`` is ``{"nodes": [...], "edges": [{"u", "pu", "v", "pv",
    "len"}]}`` with lengths as positive rationals (``"num/den"`` strings,
    integers, or Fractions; default 1).  Rejects duplicate ports,
    dangling edges, and disconnected graphs.
    """
    nodes = list(spec["nodes"])
    if len(set(nodes)) != len(nodes):
        raise GraphError("duplicate node names")
    node_set = set(nodes)
    adj: dict = {v: {} for v in nodes}
    for pos, edge in enumerate(spec.get("edges", [])):
        u, pu, v, pv = edge["u"], edge["pu"], edge["v"], edge["pv"]
        length = parse_rational(edge.get("len", 1))
        if length <= 0:
            raise GraphError(f"edge {pos}: non-positive length")
        if u not in node_set or v not in node_set:
            raise DanglingEdge(f"edge {pos}: endpoint not among nodes")
        if pu < 1 or pv < 1:
            raise GraphError(f"edge {pos}: ports must be positive")
        if u == v:
            raise GraphError(f"edge {pos}: self-loops are not supported")
        if pu in adj[u]:
            raise DuplicatePort(f"port {pu} reused at node {u!r}")
        if pv in adj[v]:
            raise DuplicatePort(f"port {pv} reused at node {v!r}")
        adj[u][pu] = (v, pv, pos, length)
        adj[v][pv] = (u, pu, pos, length)
    if nodes:
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            x = stack.pop()
            for other, _, _, _ in adj[x].values():
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        if len(seen) != len(nodes):
            raise Disconnected(
                f"{len(nodes) - len(seen)} of {len(nodes)} nodes unreachable"
            )
    return FiniteGraph(nodes, adj)


def parse_rational(value) -> Fraction:
    """Parse ``"num/den"`` strings (and ints/Fractions) to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise GraphError(f"not an exact rational: {value!r}")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def load_graph_json(doc: dict) -> FiniteGraph:
    if doc.get("schema") != GRAPH_SCHEMA:
        raise GraphError(f"expected schema {GRAPH_SCHEMA!r}")
    return build_finite_graph(doc)


def dump_graph_json(g: FiniteGraph) -> dict:
    edges = []
    seen = set()
    for v in g.nodes:
        for p in g.ports(v):
            step = g.traverse(v, p)
            if step.edge_id in seen:
                continue
            seen.add(step.edge_id)
            edges.append(
                {
                    "u": step.u,
                    "pu": step.out_port,
                    "v": step.v,
                    "pv": step.in_port,
                    "len": format_rational(step.length),
                }
            )
    return {"schema": GRAPH_SCHEMA, "nodes": g.nodes, "edges": edges}


# ---------------------------------------------------------------------------
# Lazy infinite generators
# ---------------------------------------------------------------------------

class _LazyGraph(PortLabeledGraph):
    def __init__(self, unit_length: Fraction):
        self.unit_length = Fraction(unit_length)
        if self.unit_length <= 0:
            raise GraphError("unit_length must be positive")


class InfiniteLine(_LazyGraph):
    """Integers with port 1 = successor, port 2 = predecessor."""

    def is_port(self, v: int, p: int) -> bool:
        return p in (1, 2)

    def traverse(self, v: int, p: int) -> EdgeTraversal:
        if p == 1:
            return EdgeTraversal(v, 1, v + 1, 2, (v, v + 1), self.unit_length)
        if p == 2:
            return EdgeTraversal(v, 2, v - 1, 1, (v - 1, v), self.unit_length)
        raise InvalidPort(f"{p} is not a port on the line")


class InfiniteGrid(_LazyGraph):
    """Z^2 with ports 1..4 = East, North, West, South."""

    _STEPS = {1: (1, 0), 2: (0, 1), 3: (-1, 0), 4: (0, -1)}

    def is_port(self, v: tuple[int, int], p: int) -> bool:
        return p in self._STEPS

    def traverse(self, v: tuple[int, int], p: int) -> EdgeTraversal:
        step = self._STEPS.get(p)
        if step is None:
            raise InvalidPort(f"{p} is not a port on the grid")
        w = (v[0] + step[0], v[1] + step[1])
        back = {1: 3, 2: 4, 3: 1, 4: 2}[p]
        return EdgeTraversal(v, p, w, back, (min(v, w), max(v, w)), self.unit_length)


class InfiniteBinaryTree(_LazyGraph):
    """Rooted infinite binary tree.

    Handles are tuples over {0, 1}; the root is ().  Ports 1 and 2 lead
    to the left and right child; port 3 (absent at the root) leads to the
    parent.
    """

    def is_port(self, v: tuple, p: int) -> bool:
        if p in (1, 2):
            return True
        return p == 3 and len(v) > 0

    def traverse(self, v: tuple, p: int) -> EdgeTraversal:
        if p in (1, 2):
            w = v + (p - 1,)
            return EdgeTraversal(v, p, w, 3, (v, w), self.unit_length)
        if p == 3 and v:
            w = v[:-1]
            return EdgeTraversal(v, 3, w, v[-1] + 1, (w, v), self.unit_length)
        raise InvalidPort(f"{p} is not a port at {v!r}")


_GENERATORS = {
    "infinite_line": InfiniteLine,
    "infinite_grid": InfiniteGrid,
    "infinite_binary_tree": InfiniteBinaryTree,
}


def generator(kind: str, unit_length=Fraction(1)) -> PortLabeledGraph:
    """Lazy infinite graph of the given kind; all edges have unit_length."""
    try:
        cls = _GENERATORS[kind]
    except KeyError:
        raise GraphError(f"unknown generator kind {kind!r}") from None
    return cls(parse_rational(unit_length))


def generator_origin(kind: str) -> NodeHandle:
    return {"infinite_line": 0, "infinite_grid": (0, 0), "infinite_binary_tree": ()}[
        kind
    ]


# ---------------------------------------------------------------------------
# Seeded random finite graphs (desk-scale test worlds)
# ---------------------------------------------------------------------------

def random_connected_graph(num_nodes: int, seed: int, extra_edges: int = 1) -> FiniteGraph:
    """Random connected graph: a random attachment tree plus up to
    ``extra_edges`` random chords, ports randomly permuted per node.
    """
    rng = Random(seed)
    names = [f"n{i}" for i in range(num_nodes)]
    pairs = set()
    for i in range(1, num_nodes):
        j = rng.randrange(i)
        pairs.add((min(i, j), max(i, j)))
    candidates = [
        (i, j)
        for i in range(num_nodes)
        for j in range(i + 1, num_nodes)
        if (i, j) not in pairs
    ]
    rng.shuffle(candidates)
    for pair in candidates[:extra_edges]:
        if rng.random() < 0.5:
            pairs.add(pair)
    ordered = sorted(pairs)
    degree = {i: 0 for i in range(num_nodes)}
    for i, j in ordered:
        degree[i] += 1
        degree[j] += 1
    port_pool = {i: rng.sample(range(1, degree[i] + 1), degree[i]) for i in range(num_nodes)}
    edges = []
    for i, j in ordered:
        edges.append(
            {
                "u": names[i],
                "pu": port_pool[i].pop(),
                "v": names[j],
                "pv": port_pool[j].pop(),
                "len": 1,
            }
        )
    return build_finite_graph({"nodes": names, "edges": edges})
