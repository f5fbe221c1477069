import json
import math
import os
from pathlib import Path

import pytest

import cfo

DATA = Path(os.environ.get("CFO_DATA", Path(__file__).resolve().parents[2] / "data"))


def test_generate_is_deterministic():
    a = cfo.generate(seed=7, nodes=6, stations=2)
    b = cfo.generate(seed=7, nodes=6, stations=2)
    assert a.to_json() == b.to_json()
    assert a.node_count == 6
    assert len(a.station_nodes) == 2
    assert a.validate() == []


def test_solve_and_evaluate_round_trip():
    inst = cfo.load_instance(str(DATA / "example5.json"))
    seen = []
    r = cfo.solve(inst, iterations=40, callback=lambda k, d, res: seen.append(k))
    assert seen == list(range(40))
    assert len(r["duals"]) == 40
    assert r["summary"]["feasible"]
    again = cfo.evaluate(r["plan"], inst)
    assert again["objective"] == pytest.approx(r["summary"]["objective"])
    assert max(r["duals"]) <= r["summary"]["objective"] + 1e-9


def test_oracle_on_the_bundled_example():
    inst = cfo.load_instance(str(DATA / "example5.json"))
    o = cfo.oracle(inst, strict_soc=False)
    assert o["feasible"]
    assert o["error_bound"] >= 0.0
    assert o["plan"]["stops"]


def test_instance_json_round_trip_and_deadline_setter():
    inst = cfo.generate(seed=3, nodes=5, stations=1)
    again = cfo.instance_from_json(inst.to_json())
    assert again.to_json() == inst.to_json()
    again.deadline_h = inst.deadline_h * 2
    assert again.deadline_h == pytest.approx(inst.deadline_h * 2)
    assert json.loads(again.to_json())["params"]["deadline_h"] == pytest.approx(inst.deadline_h * 2)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        cfo.generate(topology="ring")
    with pytest.raises(ValueError):
        cfo.instance_from_json("{")
    big = cfo.generate(topology="grid", nodes=25, delay_factor=0.0)
    with pytest.raises(cfo.OracleRefusal):
        cfo.oracle(big)


def test_infeasible_instance_has_no_plan():
    inst = cfo.load_instance(str(DATA / "example5.json"))
    inst.deadline_h = 1.0
    r = cfo.solve(inst, iterations=10)
    assert r["plan"] is None
    assert math.isinf(r["gap"])
