import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import pytest

from tunnelmeet.cli import main

SCENARIOS = resources.files("tunnelmeet") / "scenarios"


def scenario_path(name: str) -> str:
    return str(SCENARIOS / f"{name}.json")


def write_scenario(tmp_path: Path, doc: dict, name="scenario.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def test_run_k2_meets_on_all_strategies(tmp_path):
    out = tmp_path / "verdict.json"
    rc = main(["run", scenario_path("k2"), "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == "verdict-v1"
    assert doc["all_met"] is True
    strategies = {c["strategy"] for c in doc["cells"]}
    assert strategies == {
        "unit_speed",
        "alternating",
        "random_speeds",
        "jitter",
        "frozen_prefix",
    }
    assert all(c["met"] for c in doc["cells"])


def test_run_disconnected_graph_exits_two(tmp_path, capsys):
    doc = {
        "schema": "scenario-v1",
        "world": {
            "kind": "graph",
            "graph": {
                "schema": "graph-v1",
                "nodes": ["A", "B", "C", "D"],
                "edges": [
                    {"u": "A", "pu": 1, "v": "B", "pv": 1, "len": "1/1"},
                    {"u": "C", "pu": 1, "v": "D", "pv": 1, "len": "1/1"},
                ],
            },
        },
        "agents": [{"label": 1, "start": "A"}, {"label": 2, "start": "C"}],
        "limits": {"phase_cap": 1},
    }
    rc = main(["run", write_scenario(tmp_path, doc)])
    assert rc == 2
    assert "Disconnected" in capsys.readouterr().err


def test_run_hole_approx_small_epsilon(tmp_path):
    base = json.loads((SCENARIOS / "hole.json").read_text())
    base["epsilon"] = "1/100"
    out = tmp_path / "verdict.json"
    rc = main(["run", write_scenario(tmp_path, base), "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["within_epsilon"] is True
    num, den = doc["worst_min_distance_sq"].split("/")
    assert Fraction(int(num), int(den)) <= Fraction(1, 100) ** 2


def test_run_rejects_duplicate_labels(tmp_path, capsys):
    base = json.loads((SCENARIOS / "k2.json").read_text())
    base["agents"][1]["label"] = 1
    rc = main(["run", write_scenario(tmp_path, base)])
    assert rc == 2
    assert "distinct" in capsys.readouterr().err


K2_ROUTE_DUMP = (
    "# start A\n"
    "# phase 1\n"
    "A\t1\tB\t1\n"
    "B\t1\tA\t1\n"
    "A\t1\tB\t1\n"
    "B\t1\tA\t1\n"
)


def test_route_dump_matches_golden(tmp_path):
    out = tmp_path / "route.txt"
    rc = main(["route", scenario_path("k2"), "--out", str(out)])
    assert rc == 0
    assert out.read_text() == K2_ROUTE_DUMP


def test_route_zero_phases_emits_header_only(tmp_path):
    out = tmp_path / "route.txt"
    rc = main(["route", scenario_path("k2"), "--phase-cap", "0", "--out", str(out)])
    assert rc == 0
    assert out.read_text() == "# start A\n"


def test_route_budget_guard_exits_one(tmp_path, capsys):
    rc = main(
        ["route", scenario_path("k2"), "--phase-cap", "500", "--step-budget", "9999"]
    )
    assert rc == 1
    assert "StepBudgetExceeded" in capsys.readouterr().err


def test_tunnel_command(tmp_path, capsys):
    r1 = tmp_path / "r1.txt"
    r2 = tmp_path / "r2.txt"
    assert main(["route", scenario_path("k2"), "--out", str(r1)]) == 0
    assert main(["route", scenario_path("k2"), "--agent", "1", "--out", str(r2)]) == 0
    assert main(["tunnel", str(r1), str(r2)]) == 0
    assert capsys.readouterr().out == "tunnel n=1\n"
    # the certificate length is symmetric under swapping the inputs
    assert main(["tunnel", str(r2), str(r1)]) == 0
    assert capsys.readouterr().out == "tunnel n=1\n"


def test_tunnel_disjoint_routes(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("# start a\na\t1\tb\t1\n", encoding="utf-8")
    b.write_text("# start c\nc\t1\td\t1\n", encoding="utf-8")
    assert main(["tunnel", str(a), str(b)]) == 0
    assert capsys.readouterr().out == "none\n"


def test_enumerate_matches_golden_head(capsys):
    golden = json.loads(
        resources.files("tunnelmeet").joinpath("data/enum_v1.json").read_text()
    )
    assert main(["enumerate", "--kind", "phi", "--end", "64"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [ln.split("\t")[1] for ln in lines] == golden["phi_head"]
    assert main(["enumerate", "--kind", "zpair", "--end", "64"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [ln.split("\t")[1] for ln in lines] == golden["zpair_head"]


def test_run_reports_are_byte_identical(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["run", scenario_path("lshape"), "--out", str(out1)]) == 0
    assert main(["run", scenario_path("lshape"), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_enum_version_pin(monkeypatch, capsys):
    monkeypatch.setenv("TUNNELMEET_ENUM_VERSION", "enum-v0")
    rc = main(["enumerate", "--end", "1"])
    assert rc == 2
    assert "mismatch" in capsys.readouterr().err
    monkeypatch.setenv("TUNNELMEET_ENUM_VERSION", "enum-v1")
    assert main(["enumerate", "--end", "1"]) == 0


def test_scenario_strategy_list_filters_suite(tmp_path):
    base = json.loads((SCENARIOS / "k2.json").read_text())
    base["adversary"] = {"seeds": [0], "strategies": ["unit_speed", "alternating"]}
    out = tmp_path / "verdict.json"
    rc = main(["run", write_scenario(tmp_path, base), "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert {c["strategy"] for c in doc["cells"]} == {"unit_speed", "alternating"}
    base["adversary"]["strategies"] = ["teleport"]
    rc = main(["run", write_scenario(tmp_path, base)])
    assert rc == 2


def test_route_planar_dump_format(tmp_path):
    out = tmp_path / "route.txt"
    rc = main(["route", scenario_path("hole"), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "start\t1/4\t3/16"
    assert lines[1] == "# phase 1"
    body = [ln for ln in lines if not ln.startswith(("start", "#"))]
    assert body, "route has segments"
    for ln in body:
        x, y, kind = ln.split("\t")
        assert kind in ("free", "bounce_out", "bounce_back")
        Fraction(x), Fraction(y)


def test_run_generator_world(tmp_path):
    doc = {
        "schema": "scenario-v1",
        "world": {"kind": "generator", "name": "infinite_line"},
        "agents": [{"label": 1, "start": 0}, {"label": 2, "start": 1}],
        "limits": {"phase_cap": 2},
        "adversary": {"seeds": [0]},
    }
    out = tmp_path / "verdict.json"
    rc = main(["run", write_scenario(tmp_path, doc), "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["all_met"] is True
    assert report["world"] == "generator"


def test_seed_flag_overrides_scenario_seeds(tmp_path):
    out = tmp_path / "verdict.json"
    assert main(["run", scenario_path("k2"), "--seed", "7", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert {c["seed"] for c in doc["cells"]} == {7}


def test_float_flag_adds_decimals(tmp_path):
    out = tmp_path / "verdict.json"
    assert main(["run", scenario_path("k2"), "--float", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    met_cell = doc["cells"][0]
    assert "time_float" in met_cell
