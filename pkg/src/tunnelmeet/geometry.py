"""Exact rational planar geometry and terrain rendezvous.

Terrains are closed polygon-with-holes regions with rational vertices;
all predicates (point classification, segment-boundary contact) are
exact.  The countable graph over rational interior points reduces
terrain rendezvous to graph rendezvous: every rational offset is a port
(numbered by the pair enumeration), a segment that stays interior is an
edge between interior points, and a segment that touches the boundary
leads to a degree-one stub node that forces the agent straight back.
Routes built this way are polylines of rational points plus bounce
pairs, so meeting detection stays in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

from .enumeration import rational_pair, rational_pair_index
from .graph_model import (
    EdgeTraversal,
    GraphError,
    InvalidPort,
    PortLabeledGraph,
    format_rational,
    parse_rational,
)
from .rendezvous import Limits, graph_rv
from .routes import Route

QPoint = tuple[Fraction, Fraction]

TERRAIN_SCHEMA = "terrain-v1"

_ZERO = Fraction(0)
_ONE = Fraction(1)


class TerrainError(GraphError):
    pass


class StartNotInterior(TerrainError):
    pass


class NoPath(TerrainError):
    pass


def _cross(ox, oy, ax, ay, bx, by) -> Fraction:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _on_segment(p: QPoint, a: QPoint, b: QPoint) -> bool:
    if _cross(a[0], a[1], b[0], b[1], p[0], p[1]) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _strictly_inside(p: QPoint, poly: tuple[QPoint, ...]) -> bool:
    """Exact ray casting; p must not lie on the polygon boundary."""
    x, y = p
    inside = False
    n = len(poly)
    for k in range(n):
        ax, ay = poly[k]
        bx, by = poly[(k + 1) % n]
        if (ay > y) != (by > y):
            xi = ax + (y - ay) * (bx - ax) / (by - ay)
            if xi > x:
                inside = not inside
    return inside


def _segments_intersect(p1, p2, q1, q2) -> bool:
    """Exact closed-segment intersection test."""
    d1 = _cross(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1])
    d2 = _cross(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1])
    d3 = _cross(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1])
    d4 = _cross(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1])
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    for p, a, b in ((p1, q1, q2), (p2, q1, q2), (q1, p1, p2), (q2, p1, p2)):
        if _on_segment(p, a, b):
            return True
    return False


class BoundaryHit(NamedTuple):
    point: QPoint
    param: Fraction  # position along the probe segment, in (0, 1]
    dist_sq: Fraction  # squared distance from the segment start


@dataclass(frozen=True)
class Terrain:
    """Closed region: a simple outer polygon minus open polygonal holes."""

    outer: tuple[QPoint, ...]
    holes: tuple[tuple[QPoint, ...], ...] = ()

    def __post_init__(self) -> None:
        _validate_polygon(self.outer, "outer")
        for idx, hole in enumerate(self.holes):
            _validate_polygon(hole, f"hole {idx}")
            for v in hole:
                if _on_boundary_of(v, self.outer) or not _strictly_inside(v, self.outer):
                    raise TerrainError(f"hole {idx} is not strictly inside the outer polygon")
        polys = (self.outer,) + self.holes
        for a in range(len(polys)):
            for b in range(a + 1, len(polys)):
                _reject_polygon_contact(polys[a], polys[b])
        for idx, hole in enumerate(self.holes):
            for other in self.holes[:idx]:
                if any(_strictly_inside(v, other) for v in hole) or any(
                    _strictly_inside(v, hole) for v in other
                ):
                    raise TerrainError("nested holes")

    def boundary_edges(self) -> Iterator[tuple[QPoint, QPoint]]:
        for poly in (self.outer,) + self.holes:
            n = len(poly)
            for k in range(n):
                yield poly[k], poly[(k + 1) % n]

    def classify(self, p: QPoint) -> str:
        for a, b in self.boundary_edges():
            if _on_segment(p, a, b):
                return "boundary"
        if _strictly_inside(p, self.outer) and not any(
            _strictly_inside(p, hole) for hole in self.holes
        ):
            return "interior"
        return "outside"

    def is_interior(self, p: QPoint) -> bool:
        return self.classify(p) == "interior"

    def contains(self, p: QPoint) -> bool:
        return self.classify(p) != "outside"


def _on_boundary_of(p, poly) -> bool:
    n = len(poly)
    return any(_on_segment(p, poly[k], poly[(k + 1) % n]) for k in range(n))


def _validate_polygon(poly, name: str) -> None:
    if len(poly) < 3:
        raise TerrainError(f"{name}: a polygon needs at least 3 vertices")
    n = len(poly)
    area2 = sum(
        poly[k][0] * poly[(k + 1) % n][1] - poly[(k + 1) % n][0] * poly[k][1]
        for k in range(n)
    )
    if area2 == 0:
        raise TerrainError(f"{name}: degenerate polygon")
    for k in range(n):
        if poly[k] == poly[(k + 1) % n]:
            raise TerrainError(f"{name}: repeated consecutive vertex")
    for a in range(n):
        for b in range(a + 1, n):
            adjacent = b == a + 1 or (a == 0 and b == n - 1)
            if adjacent:
                continue
            if _segments_intersect(
                poly[a], poly[(a + 1) % n], poly[b], poly[(b + 1) % n]
            ):
                raise TerrainError(f"{name}: polygon is not simple")


def _reject_polygon_contact(p1, p2) -> None:
    n1, n2 = len(p1), len(p2)
    for a in range(n1):
        for b in range(n2):
            if _segments_intersect(p1[a], p1[(a + 1) % n1], p2[b], p2[(b + 1) % n2]):
                raise TerrainError("boundary polygons touch")


def terrain_from_json(doc: dict) -> Terrain:
    if doc.get("schema") != TERRAIN_SCHEMA:
        raise TerrainError(f"expected schema {TERRAIN_SCHEMA!r}")

    def pts(rows):
        return tuple((parse_rational(x), parse_rational(y)) for x, y in rows)

    return Terrain(pts(doc["outer"]), tuple(pts(h) for h in doc.get("holes", ())))


def terrain_to_json(t: Terrain) -> dict:
    def rows(poly):
        return [[format_rational(x), format_rational(y)] for x, y in poly]

    return {
        "schema": TERRAIN_SCHEMA,
        "outer": rows(t.outer),
        "holes": [rows(h) for h in t.holes],
    }


def first_boundary_hit(t: Terrain, v: QPoint, u: QPoint) -> BoundaryHit | None:
    """First boundary contact of the segment from interior point v to u.

    Contact includes tangential grazing.  Returns the closest contact
    (smallest parameter > 0) or None when the whole segment stays
    interior.  Distances are reported squared to stay rational.
    """
    if not t.is_interior(v):
        raise StartNotInterior(f"{v} is not interior")
    if u == v:
        return None
    dx, dy = u[0] - v[0], u[1] - v[1]
    best: Fraction | None = None
    for a, b in t.boundary_edges():
        ex, ey = b[0] - a[0], b[1] - a[1]
        denom = dx * ey - dy * ex
        wx, wy = a[0] - v[0], a[1] - v[1]
        if denom != 0:
            tt = (wx * ey - wy * ex) / denom
            ss = (wx * dy - wy * dx) / denom
            if 0 < tt <= 1 and 0 <= ss <= 1:
                if best is None or tt < best:
                    best = tt
        else:
            if wx * dy - wy * dx != 0:
                continue  # parallel, not collinear
            dd = dx * dx + dy * dy
            ta = (wx * dx + wy * dy) / dd
            tb = ((b[0] - v[0]) * dx + (b[1] - v[1]) * dy) / dd
            lo, hi = min(ta, tb), max(ta, tb)
            if hi <= 0 or lo > 1:
                continue
            tt = max(lo, _ZERO)
            if tt > 0 and (best is None or tt < best):
                best = tt
    if best is None:
        return None
    w = (v[0] + best * dx, v[1] + best * dy)
    return BoundaryHit(w, best, best * best * (dx * dx + dy * dy))


# ---------------------------------------------------------------------------
# The countable terrain graph
# ---------------------------------------------------------------------------

def gt_target(p: QPoint, port: int) -> QPoint:
    """Absolute target of a port at p: p shifted by the port's offset."""
    off = rational_pair(port)
    return (p[0] + off.q1, p[1] + off.q2)


@dataclass(frozen=True)
class GtArrival:
    """Outcome of following one port: an interior rational point, or a
    boundary hit that forces the reverse stage back."""

    kind: str  # "v1" | "v2"
    point: QPoint  # reached interior point, or the boundary hit point
    hit: BoundaryHit | None = None


def gt_traverse(t: Terrain, p: QPoint, port: int) -> GtArrival:
    if not t.is_interior(p):
        raise StartNotInterior(f"{p} is not interior")
    target = gt_target(p, port)
    if target == p:
        return GtArrival("v1", p)
    hit = first_boundary_hit(t, p, target)
    if hit is None:
        return GtArrival("v1", target)
    return GtArrival("v2", hit.point, hit)


class TerrainGraph(PortLabeledGraph):
    """Port-labeled view of a terrain.

    Interior rational points have one port per rational offset (infinite
    degree); boundary stubs are keyed by (origin point, port) and have
    the single return port 1.  Edge lengths are the constant 1: the
    adapter is combinatorial, the metric lives in the planar route.
    """

    def __init__(self, terrain: Terrain):
        self.terrain = terrain
        self._arrivals: dict = {}

    def arrival(self, p: QPoint, port: int) -> GtArrival:
        key = (p, port)
        out = self._arrivals.get(key)
        if out is None:
            out = gt_traverse(self.terrain, p, port)
            self._arrivals[key] = out
        return out

    def is_port(self, node, p: int) -> bool:
        if node[0] == "v1":
            return p >= 1
        return p == 1

    def traverse(self, node, p: int) -> EdgeTraversal:
        if node[0] == "v1":
            if p < 1:
                raise InvalidPort(f"{p} at {node!r}")
            point = node[1]
            arr = self.arrival(point, p)
            if arr.kind == "v2":
                stub = ("v2", point, p)
                return EdgeTraversal(node, p, stub, 1, ("b", point, p), _ONE)
            other = arr.point
            back = rational_pair_index(point[0] - other[0], point[1] - other[1])
            a, b = sorted((point, other))
            return EdgeTraversal(node, p, ("v1", other), back, ("f", a, b), _ONE)
        if p != 1:
            raise InvalidPort(f"{p} at {node!r}")
        _, origin, out_port = node
        return EdgeTraversal(node, 1, ("v1", origin), out_port, ("b", origin, out_port), _ONE)


# ---------------------------------------------------------------------------
# Planar routes
# ---------------------------------------------------------------------------

class PlanarSegment(NamedTuple):
    start: QPoint
    end: QPoint
    kind: str  # "free" | "bounce_out" | "bounce_back"


@dataclass
class PlanarRoute:
    start: QPoint
    segments: list[PlanarSegment] = field(default_factory=list)
    phase_marks: list[tuple[int, int]] = field(default_factory=list)

    @property
    def end(self) -> QPoint:
        return self.segments[-1].end if self.segments else self.start

    def points(self) -> Iterator[QPoint]:
        yield self.start
        for seg in self.segments:
            yield seg.end


def geometric_rv(
    t: Terrain, start: QPoint, label: int, limits: Limits
) -> PlanarRoute:
    """Terrain rendezvous route: the graph construction run on the
    terrain's port-labeled view, rendered as planar segments."""
    start = (Fraction(start[0]), Fraction(start[1]))
    if not t.is_interior(start):
        raise StartNotInterior(f"{start} is not interior")
    gt = TerrainGraph(t)
    graph_route = graph_rv(gt, ("v1", start), label, limits)
    return planar_route_from_graph(gt, graph_route)


def planar_route_from_graph(gt: TerrainGraph, graph_route: Route) -> PlanarRoute:
    segments = []
    for step in graph_route.steps():
        if step.u[0] == "v1" and step.v[0] == "v1":
            segments.append(PlanarSegment(step.u[1], step.v[1], "free"))
        elif step.v[0] == "v2":
            origin = step.u[1]
            hit = gt.arrival(origin, step.out_port)
            segments.append(PlanarSegment(origin, hit.point, "bounce_out"))
        else:
            origin = step.v[1]
            hit = gt.arrival(origin, step.in_port)
            segments.append(PlanarSegment(hit.point, origin, "bounce_back"))
    return PlanarRoute(
        graph_route.start[1], segments, list(graph_route.phase_marks)
    )


def audit_planar_route(t: Terrain, route: PlanarRoute) -> None:
    """Exact containment audit: every point of the route lies in the
    terrain, free segments never touch the boundary, and every bounce is
    immediately undone by its exact reverse.

    Route algebra repeats a small set of distinct segments many times, so
    the geometric checks are cached per segment value.
    """
    if not t.is_interior(route.start):
        raise TerrainError("route start is not interior")
    checked: set = set()

    def check(seg: PlanarSegment) -> None:
        if seg in checked:
            return
        if seg.kind == "bounce_out":
            if t.classify(seg.end) != "boundary":
                raise TerrainError("bounce endpoint is not on the boundary")
        elif seg.kind == "free":
            if not t.is_interior(seg.end):
                raise TerrainError(f"free endpoint {seg.end} is not interior")
            if seg.end != seg.start and first_boundary_hit(t, seg.start, seg.end):
                raise TerrainError("free segment touches the boundary")
        checked.add(seg)

    prev = route.start
    pending_bounce = None
    for seg in route.segments:
        if seg.start != prev:
            raise TerrainError("segments do not chain")
        if pending_bounce is not None:
            if seg.kind != "bounce_back" or (seg.start, seg.end) != pending_bounce:
                raise TerrainError("boundary hit not followed by its reverse")
            pending_bounce = None
        elif seg.kind == "bounce_back":
            raise TerrainError("bounce_back without a preceding hit")
        else:
            check(seg)
            if seg.kind == "bounce_out":
                pending_bounce = (seg.end, seg.start)
        prev = seg.end
    if pending_bounce is not None:
        raise TerrainError("route ends mid-bounce")


# ---------------------------------------------------------------------------
# Rational polyline oracle
# ---------------------------------------------------------------------------

def rational_path(t: Terrain, u: QPoint, v: QPoint) -> list[QPoint]:
    """Rational polyline from u to v through the terrain's interior.

    Grid construction: partition the plane into square cells, keep the
    cells whose closure lies in the interior, and connect the two cells
    through cell centers over side-adjacency, halving the cell size until
    the endpoints connect.  Interior path-connectivity of the supported
    terrains makes this terminate for interior rational endpoints.
    """
    u = (Fraction(u[0]), Fraction(u[1]))
    v = (Fraction(v[0]), Fraction(v[1]))
    for name, p in (("u", u), ("v", v)):
        if not t.is_interior(p):
            raise StartNotInterior(f"{name}={p} is not interior")
    if u == v:
        return [u]
    if first_boundary_hit(t, u, v) is None:
        return [u, v]
    xs = [x for x, _ in t.outer]
    ys = [y for _, y in t.outer]
    delta = Fraction(1, 4)
    while delta >= Fraction(1, 1 << 14):
        path = _grid_path(t, u, v, delta, (min(xs), min(ys), max(xs), max(ys)))
        if path is not None:
            return path
        delta /= 2
    raise NoPath(f"no interior grid path from {u} to {v}")


def _cell_ok(t: Terrain, delta: Fraction, cell, cache) -> bool:
    ok = cache.get(cell)
    if ok is None:
        x0 = cell[0] * delta
        y0 = cell[1] * delta
        x1, y1 = x0 + delta, y0 + delta
        corners = ((x0, y0), (x1, y0), (x1, y1), (x0, y1))
        ok = all(t.is_interior(c) for c in corners)
        if ok:
            sides = tuple(
                (corners[k], corners[(k + 1) % 4]) for k in range(4)
            )
            for a, b in t.boundary_edges():
                if any(_segments_intersect(a, b, s0, s1) for s0, s1 in sides):
                    ok = False
                    break
                if ok and x0 < a[0] < x1 and y0 < a[1] < y1:
                    ok = False
                    break
        cache[cell] = ok
    return ok


def _grid_path(t, u, v, delta, bbox):
    def cell_of(p):
        return (p[0] // delta, p[1] // delta)

    min_cx = int(bbox[0] // delta) - 1
    max_cx = int(bbox[2] // delta) + 1
    min_cy = int(bbox[1] // delta) - 1
    max_cy = int(bbox[3] // delta) + 1
    cu, cv = cell_of(u), cell_of(v)
    cache: dict = {}
    if not (_cell_ok(t, delta, cu, cache) and _cell_ok(t, delta, cv, cache)):
        return None
    parent = {cu: None}
    queue = [cu]
    qi = 0
    while qi < len(queue):
        cell = queue[qi]
        qi += 1
        if cell == cv:
            break
        cx, cy = cell
        for nxt in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
            if nxt in parent:
                continue
            if not (min_cx <= nxt[0] <= max_cx and min_cy <= nxt[1] <= max_cy):
                continue
            if _cell_ok(t, delta, nxt, cache):
                parent[nxt] = cell
                queue.append(nxt)
    if cv not in parent:
        return None
    half = delta / 2
    centers = []
    cell = cv
    while cell is not None:
        centers.append((cell[0] * delta + half, cell[1] * delta + half))
        cell = parent[cell]
    centers.reverse()
    path = [u] + centers + [v]
    return _dedupe(path)


def _dedupe(points):
    out = [points[0]]
    for p in points[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def path_port_sequences(path: list[QPoint]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Forward and reverse port sequences of a rational polyline, as seen
    by agents walking it in the terrain graph."""
    fwd = []
    rev = []
    for a, b in zip(path, path[1:]):
        fwd.append(rational_pair_index(b[0] - a[0], b[1] - a[1]))
        rev.append(rational_pair_index(a[0] - b[0], a[1] - b[1]))
    return tuple(fwd), tuple(reversed(rev))


# ---------------------------------------------------------------------------
# Approximate rendezvous
# ---------------------------------------------------------------------------

def approx_rendezvous(
    t: Terrain,
    start1: QPoint,
    start2: QPoint,
    label1: int,
    label2: int,
    epsilon: Fraction,
    limits: Limits,
    suite=None,
    seeds=(0, 1, 2),
) -> dict:
    """Run both agents' routes (each rational in its own start-anchored
    frame) and report the exact worst-case minimum distance over the
    adversary suite.

    Starts are exact rationals; callers approximating irrational points
    choose the precision.  The report carries ``min_distance_sq`` per
    cell and the aggregate ``within_epsilon`` flag (squared comparison,
    no rounding).
    """
    from .adversary import DEFAULT_SUITE, verify_rendezvous

    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    r1 = geometric_rv(t, start1, label1, limits)
    r2 = geometric_rv(t, start2, label2, limits)
    report = verify_rendezvous(
        t, r1, r2, suite=DEFAULT_SUITE if suite is None else suite, seeds=seeds
    )
    worst: Fraction | None = None
    for cell in report["cells"]:
        verdict = cell["verdict"]
        gap = verdict.min_distance_sq
        if gap is None:
            gap = _ZERO if verdict.met else None
        if gap is not None and (worst is None or gap > worst):
            worst = gap
    report["epsilon"] = epsilon
    report["worst_min_distance_sq"] = worst
    report["within_epsilon"] = worst is not None and worst <= epsilon * epsilon
    report["routes"] = (r1, r2)
    return report
