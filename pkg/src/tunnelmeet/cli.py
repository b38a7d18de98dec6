"""Scenario-driven command line front end.

Subcommands: ``run`` (construct routes for a two-agent scenario and run
the adversary suite), ``route`` (dump one agent's route), ``tunnel``
(decide the tunnel relation between two dumped routes), ``enumerate``
(print enumeration heads for golden pinning).

All numeric output is exact (``num/den``); ``--float`` adds decimal
approximations for humans.  Reports are byte-deterministic for fixed
scenarios and seeds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .adversary import (
    DEFAULT_SUITE,
    MeetingVerdict,
    suite_from_names,
    verify_rendezvous,
)
from .enumeration import ENUM_VERSION, Quadruple, phi, rational_pair
from .geometry import (
    PlanarRoute,
    StartNotInterior,
    approx_rendezvous,
    geometric_rv,
    terrain_from_json,
)
from .graph_model import (
    GraphError,
    format_rational,
    generator,
    generator_origin,
    load_graph_json,
    parse_rational,
)
from .rendezvous import Limits, graph_rv, tunnel_check
from .routes import StepBudgetExceeded, dump_route, parse_route_dump

SCENARIO_SCHEMA = "scenario-v1"
VERDICT_SCHEMA = "verdict-v1"


class ScenarioError(Exception):
    pass


def _load_scenario(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{path}: cannot read scenario: {exc}") from exc
    if doc.get("schema") != SCENARIO_SCHEMA:
        raise ScenarioError(f"{path}: expected schema {SCENARIO_SCHEMA!r}")
    agents = doc.get("agents")
    if not isinstance(agents, list) or len(agents) != 2:
        raise ScenarioError(f"{path}: scenario needs exactly two agents")
    l1, l2 = (a.get("label") for a in agents)
    if not (isinstance(l1, int) and isinstance(l2, int) and 0 < l1 and 0 < l2):
        raise ScenarioError(f"{path}: labels must be positive integers")
    if l1 == l2:
        raise ScenarioError(f"{path}: agent labels must be distinct")
    return doc


def _build_world(doc: dict):
    world = doc.get("world", {})
    kind = world.get("kind")
    if kind == "graph":
        return "graph", load_graph_json(world["graph"])
    if kind == "terrain":
        return "terrain", terrain_from_json(world["terrain"])
    if kind == "generator":
        return "generator", generator(world["name"], world.get("unit_length", 1))
    raise ScenarioError(f"unknown world kind {kind!r}")


def _limits(doc: dict, args) -> Limits:
    lim = doc.get("limits", {})
    cap = args.phase_cap if args.phase_cap is not None else lim.get("phase_cap")
    if cap is None:
        raise ScenarioError("no phase cap given (scenario limits or --phase-cap)")
    budget = (
        args.step_budget
        if args.step_budget is not None
        else lim.get("step_budget", 10**7)
    )
    return Limits(int(cap), int(budget))


def _start_for(kind: str, world, agent: dict):
    start = agent.get("start")
    if kind == "terrain":
        x, y = start
        return (parse_rational(x), parse_rational(y))
    if kind == "generator":
        if start is None or start == "origin":
            return generator_origin(_gen_name(world))
        return tuple(start) if isinstance(start, list) else start
    return start


def _gen_name(world) -> str:
    from .graph_model import InfiniteBinaryTree, InfiniteGrid, InfiniteLine

    return {
        InfiniteLine: "infinite_line",
        InfiniteGrid: "infinite_grid",
        InfiniteBinaryTree: "infinite_binary_tree",
    }[type(world)]


def _frac_str(x: Fraction) -> str:
    return format_rational(Fraction(x))


def _location_json(loc, use_float: bool):
    if loc is None:
        return None
    if isinstance(loc, tuple) and loc and loc[0] == "node":
        return {"kind": "node", "node": str(loc[1])}
    if isinstance(loc, tuple) and loc and loc[0] == "edge":
        out = {"kind": "edge", "edge": str(loc[1]), "offset": _frac_str(loc[2])}
        if use_float:
            out["offset_float"] = float(loc[2])
        return out
    x, y = loc
    out = {"kind": "point", "x": _frac_str(x), "y": _frac_str(y)}
    if use_float:
        out["x_float"] = float(x)
        out["y_float"] = float(y)
    return out


def _verdict_json(v: MeetingVerdict, use_float: bool) -> dict:
    out: dict = {"met": v.met}
    if v.met:
        out["time"] = _frac_str(v.time)
        if use_float:
            out["time_float"] = float(v.time)
        out["location"] = _location_json(v.location, use_float)
    if v.min_distance_sq is not None:
        out["min_distance_sq"] = _frac_str(v.min_distance_sq)
        if use_float:
            out["min_distance_float"] = float(v.min_distance_sq) ** 0.5
    return out


def _report_json(doc, report, use_float: bool) -> dict:
    cells = [
        {
            "strategy": c["strategy"],
            "seed": c["seed"],
            **_verdict_json(c["verdict"], use_float),
        }
        for c in report["cells"]
    ]
    out = {
        "schema": VERDICT_SCHEMA,
        "enum_version": ENUM_VERSION,
        "world": doc["world"]["kind"],
        "agents": [
            {"label": a["label"], "start": a["start"]} for a in doc["agents"]
        ],
        "cells": cells,
        "all_met": report["all_met"],
        "vacuous": report["vacuous"],
    }
    if "epsilon" in report:
        out["epsilon"] = _frac_str(report["epsilon"])
        worst = report["worst_min_distance_sq"]
        out["worst_min_distance_sq"] = None if worst is None else _frac_str(worst)
        out["within_epsilon"] = report["within_epsilon"]
        if use_float and worst is not None:
            out["worst_min_distance_float"] = float(worst) ** 0.5
    return out


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    doc = _load_scenario(args.scenario)
    kind, world = _build_world(doc)
    limits = _limits(doc, args)
    agents = doc["agents"]
    adversary = doc.get("adversary", {})
    seeds = [args.seed] if args.seed is not None else list(adversary.get("seeds", [0]))
    suite = suite_from_names(
        adversary.get("strategies", [row[0] for row in DEFAULT_SUITE])
    )
    epsilon = doc.get("epsilon")
    starts = [_start_for(kind, world, a) for a in agents]
    labels = [a["label"] for a in agents]
    if epsilon is not None:
        if kind != "terrain":
            raise ScenarioError("epsilon mode needs a terrain world")
        report = approx_rendezvous(
            world,
            starts[0],
            starts[1],
            labels[0],
            labels[1],
            parse_rational(epsilon),
            limits,
            suite=suite,
            seeds=tuple(seeds),
        )
        ok = report["within_epsilon"]
    else:
        if kind == "terrain":
            r1 = geometric_rv(world, starts[0], labels[0], limits)
            r2 = geometric_rv(world, starts[1], labels[1], limits)
        else:
            r1 = graph_rv(world, starts[0], labels[0], limits)
            r2 = graph_rv(world, starts[1], labels[1], limits)
        report = verify_rendezvous(world, r1, r2, suite=suite, seeds=tuple(seeds))
        ok = report["all_met"]
    text = json.dumps(_report_json(doc, report, args.float), indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    return 0 if ok else 1


def cmd_route(args) -> int:
    doc = _load_scenario(args.scenario)
    kind, world = _build_world(doc)
    limits = _limits(doc, args)
    agent = doc["agents"][args.agent]
    start = _start_for(kind, world, agent)
    if kind == "terrain":
        route = geometric_rv(world, start, agent["label"], limits)
        text = _dump_planar(route)
    else:
        route = graph_rv(world, start, agent["label"], limits)
        text = dump_route(route)
    _emit(text, args.out)
    return 0


def _dump_planar(route: PlanarRoute) -> str:
    lines = [f"start\t{_frac_str(route.start[0])}\t{_frac_str(route.start[1])}"]
    marks = sorted(route.phase_marks, key=lambda t: (t[1], t[0]))
    mi = 0
    for idx, seg in enumerate(route.segments):
        while mi < len(marks) and marks[mi][1] == idx:
            lines.append(f"# phase {marks[mi][0]}")
            mi += 1
        lines.append(
            f"{_frac_str(seg.end[0])}\t{_frac_str(seg.end[1])}\t{seg.kind}"
        )
    while mi < len(marks):
        lines.append(f"# phase {marks[mi][0]}")
        mi += 1
    return "\n".join(lines) + "\n"


def cmd_tunnel(args) -> int:
    with open(args.route1, "r", encoding="utf-8") as fh:
        r1 = parse_route_dump(fh.read())
    with open(args.route2, "r", encoding="utf-8") as fh:
        r2 = parse_route_dump(fh.read())
    cert = tunnel_check(r1, r2)
    if cert is None:
        _emit("none\n", args.out)
    else:
        _emit(f"tunnel n={cert.n}\n", args.out)
    return 0


def _format_quadruple(q: Quadruple) -> str:
    sp = ",".join(map(str, q.s_prime))
    sd = ",".join(map(str, q.s_dprime))
    return f"({q.i},{q.j},({sp}),({sd}))"


def cmd_enumerate(args) -> int:
    lines = []
    for k in range(args.start, args.end + 1):
        if args.kind == "phi":
            value = _format_quadruple(phi(k))
        else:
            pair = rational_pair(k)
            value = f"({format_rational(pair.q1)},{format_rational(pair.q2)})"
        lines.append(f"{k}\t{value}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunnelmeet",
        description="asynchronous rendezvous routes, adversary simulation, verdicts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and emit a verdict report")
    run.add_argument("scenario")
    run.add_argument("--out")
    run.add_argument("--seed", type=int)
    run.add_argument("--phase-cap", type=int, dest="phase_cap")
    run.add_argument("--step-budget", type=int, dest="step_budget")
    run.add_argument("--float", action="store_true")
    run.set_defaults(fn=cmd_run)

    route = sub.add_parser("route", help="dump one agent's constructed route")
    route.add_argument("scenario")
    route.add_argument("--agent", type=int, default=0, choices=(0, 1))
    route.add_argument("--out")
    route.add_argument("--phase-cap", type=int, dest="phase_cap")
    route.add_argument("--step-budget", type=int, dest="step_budget")
    route.set_defaults(fn=cmd_route)

    tun = sub.add_parser("tunnel", help="decide the tunnel relation of two dumps")
    tun.add_argument("route1")
    tun.add_argument("route2")
    tun.add_argument("--out")
    tun.set_defaults(fn=cmd_tunnel)

    enum = sub.add_parser("enumerate", help="print enumeration values")
    enum.add_argument("--kind", choices=("phi", "zpair"), default="phi")
    enum.add_argument("--start", type=int, default=1)
    enum.add_argument("--end", type=int, default=64)
    enum.add_argument("--out")
    enum.set_defaults(fn=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    pinned = os.environ.get("TUNNELMEET_ENUM_VERSION")
    if pinned is not None and pinned != ENUM_VERSION:
        sys.stderr.write(
            f"error: enumeration version mismatch: pinned {pinned!r}, "
            f"built {ENUM_VERSION!r}\n"
        )
        return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except StepBudgetExceeded as exc:
        sys.stderr.write(f"error: StepBudgetExceeded: {exc}\n")
        return 1
    except (ScenarioError, GraphError, StartNotInterior, OSError, KeyError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
