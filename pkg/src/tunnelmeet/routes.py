"""Route representation and algebra.

A route is a chained sequence of edge traversals starting at a fixed
node.  The rendezvous recursion concatenates long stretches of its own
history and of simulated routes over and over, so the step sequence is
held as a rope (concatenation DAG with reverse and repeat nodes) whose
subtrees are shared.  Building is O(nodes); only iteration pays for the
materialized length, and the step budget caps that length up front.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .graph_model import EdgeTraversal, NodeHandle


class StepBudgetExceeded(Exception):
    """Route construction would exceed the configured traversal budget."""


class _Leaf:
    __slots__ = ("steps", "_rev")

    def __init__(self, steps: tuple[EdgeTraversal, ...]):
        self.steps = steps
        self._rev = None

    @property
    def length(self) -> int:
        return len(self.steps)

    def reversed_steps(self) -> tuple[EdgeTraversal, ...]:
        if self._rev is None:
            self._rev = tuple(s.reversed() for s in reversed(self.steps))
        return self._rev


class _Cat:
    __slots__ = ("kids", "length")

    def __init__(self, kids: tuple):
        self.kids = kids
        self.length = sum(_node_len(k) for k in kids)


class _Rev:
    __slots__ = ("kid",)

    def __init__(self, kid):
        self.kid = kid


_EMPTY = _Leaf(())


def _node_len(node) -> int:
    if isinstance(node, _Leaf):
        return len(node.steps)
    if isinstance(node, _Rev):
        return _node_len(node.kid)
    return node.length


def _iter_node(node, rev: bool) -> Iterator[EdgeTraversal]:
    # Explicit stack: nested generators would pay O(depth) per step.
    stack = [(node, rev)]
    while stack:
        node, rev = stack.pop()
        if isinstance(node, _Leaf):
            yield from (node.reversed_steps() if rev else node.steps)
        elif isinstance(node, _Rev):
            stack.append((node.kid, not rev))
        else:
            kids = node.kids if rev else reversed(node.kids)
            stack.extend((kid, rev) for kid in kids)


def _step_at_fwd_or_rev(node, i: int, flip: bool) -> EdgeTraversal:
    while True:
        if isinstance(node, _Leaf):
            step = node.steps[i]
            return step.reversed() if flip else step
        if isinstance(node, _Rev):
            node = node.kid
            i = _node_len(node) - 1 - i
            flip = not flip
            continue
        for kid in node.kids:
            k = _node_len(kid)
            if i < k:
                node = kid
                break
            i -= k


@dataclass
class Route:
    """A route: start node plus a finite sequence of chained traversals.

    ``phase_marks[k-1]`` is the step index at which phase k begins; the
    rendezvous construction guarantees the route prefix of that length
    is closed at ``start``.
    """

    start: NodeHandle
    _root: object = field(default=_EMPTY, repr=False)
    phase_marks: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return _node_len(self._root)

    def steps(self) -> Iterator[EdgeTraversal]:
        return _iter_node(self._root, False)

    def step_at(self, i: int) -> EdgeTraversal:
        if not 0 <= i < len(self):
            raise IndexError(i)
        return _step_at_fwd_or_rev(self._root, i, flip=False)

    @property
    def end(self) -> NodeHandle:
        n = len(self)
        return self.start if n == 0 else self.step_at(n - 1).v

    def node_after(self, i: int) -> NodeHandle:
        """Node reached after the first ``i`` steps."""
        if i == 0:
            return self.start
        return self.step_at(i - 1).v

    def prefix(self, n_steps: int) -> "Route":
        """Route consisting of the first ``n_steps`` traversals."""
        if n_steps > len(self):
            raise IndexError(n_steps)
        steps = []
        for step in self.steps():
            if len(steps) == n_steps:
                break
            steps.append(step)
        marks = [(k, s) for k, s in self.phase_marks if s <= n_steps]
        return Route(self.start, _Leaf(tuple(steps)), marks)


def empty_route(start: NodeHandle) -> Route:
    return Route(start)


def route_from_steps(start: NodeHandle, steps: Iterable[EdgeTraversal]) -> Route:
    steps = tuple(steps)
    cur = start
    for step in steps:
        if step.u != cur:
            raise ValueError(f"route not chained at {step!r}")
        cur = step.v
    return Route(start, _Leaf(steps))


def reverse_route(r: Route) -> Route:
    """The same edges in reverse order, each traversal reversed."""
    return Route(r.end, _Rev(r._root))


def concat_routes(first: Route, *rest: Route) -> Route:
    cur = first.end
    kids = [first._root]
    for r in rest:
        if r.start != cur:
            raise ValueError("concatenation endpoints do not chain")
        kids.append(r._root)
        cur = r.end
    return Route(first.start, _Cat(tuple(kids)))


# Internal builder API (used by the rendezvous recursion) -------------------

def _leaf(steps: tuple[EdgeTraversal, ...]):
    return _Leaf(steps) if steps else _EMPTY


def _cat(*nodes):
    kids = tuple(n for n in nodes if _node_len(n) > 0)
    if not kids:
        return _EMPTY
    if len(kids) == 1:
        return kids[0]
    return _Cat(kids)


def _rev(node):
    if _node_len(node) == 0:
        return _EMPTY
    return _Rev(node)


# Text dump -----------------------------------------------------------------

def dump_route(r: Route) -> str:
    """One traversal per line ``u<TAB>out_port<TAB>v<TAB>in_port`` with
    ``# phase k`` markers where each phase begins.  The header line names
    the start node so that empty routes stay parseable."""
    lines = [f"# start {r.start}"]
    marks = sorted(r.phase_marks, key=lambda t: (t[1], t[0]))
    mi = 0
    for idx, step in enumerate(r.steps()):
        while mi < len(marks) and marks[mi][1] == idx:
            lines.append(f"# phase {marks[mi][0]}")
            mi += 1
        lines.append(f"{step.u}\t{step.out_port}\t{step.v}\t{step.in_port}")
    while mi < len(marks):
        lines.append(f"# phase {marks[mi][0]}")
        mi += 1
    return "\n".join(lines) + "\n"


def parse_route_dump(text: str, start=None) -> Route:
    """Rebuild a route from its dump.

    Edge identity is reconstructed canonically from the two directed
    endpoints; lengths are not carried by the format and default to 1.
    """
    from fractions import Fraction

    steps = []
    marks = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "phase":
                marks.append((int(parts[1]), len(steps)))
            elif len(parts) == 2 and parts[0] == "start" and start is None:
                start = parts[1]
            continue
        u, out_p, v, in_p = line.split("\t")
        a = (u, int(out_p))
        b = (v, int(in_p))
        edge_id = (min(a, b), max(a, b))
        steps.append(
            EdgeTraversal(u, int(out_p), v, int(in_p), edge_id, Fraction(1))
        )
    if start is None:
        if not steps:
            raise ValueError("empty dump needs an explicit start node")
        start = steps[0].u
    r = route_from_steps(start, steps)
    r.phase_marks = marks
    return r
