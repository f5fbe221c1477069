"""Carbon-aware route, speed and charging planner for battery-electric trucks."""

import json

from ._core import (
    ConfigError,
    DomainError,
    Instance,
    OracleRefusal,
    ParseError,
    SolverError,
    fastest_completion,
    generate,
    instance_from_json,
    load_instance,
)
from . import _core


def _decode(result):
    if result.get("plan") is not None:
        result["plan"] = json.loads(result["plan"])
    return result


def solve(instance, objective=None, iterations=200, step=1.0, strict_soc=False, eps=1e-3,
          polyak=False, callback=None):
    """Dual subgradient solve. The plan comes back as a dict (None if infeasible)."""
    return _decode(_core.solve(instance, objective, iterations, step, strict_soc, eps, polyak, callback))


def oracle(instance, objective=None, time_points=9, charge_points=9, wait_points=5, strict_soc=True):
    return _decode(_core.oracle(instance, objective, time_points, charge_points, wait_points, strict_soc))


def evaluate(plan, instance, objective=None, strict_soc=False):
    text = plan if isinstance(plan, str) else json.dumps(plan)
    return _core.evaluate(text, instance, objective, strict_soc)


__all__ = [
    "ConfigError",
    "DomainError",
    "Instance",
    "OracleRefusal",
    "ParseError",
    "SolverError",
    "evaluate",
    "fastest_completion",
    "generate",
    "instance_from_json",
    "load_instance",
    "oracle",
    "solve",
]
