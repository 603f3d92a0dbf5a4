"""JSON loaders for functions, closed sets and decomposition witnesses."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .classify import DecompositionWitness, WitnessError, make_difex
from .funcmodel.expr import ExprSyntaxError, parse_expression
from .funcmodel.pl import PLFunction
from .funcmodel.sets import ClosedSetDesc, Interval


class InputError(ValueError):
    pass


def read_json(path) -> object:
    p = Path(path)
    try:
        return json.loads(p.read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {p}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: invalid JSON ({exc})") from exc


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, non-finite floats as strings."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _clean(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):   # numpy scalars
        return _clean(obj.item())
    return obj


def load_function(obj: dict):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("function JSON needs a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "pl":
            return PLFunction(tuple(obj["breakpoints"]), tuple(obj["values"]))
        if kind == "seq":
            family = obj.get("family", "difex")
            if family != "difex":
                raise InputError(f"unknown sequence family {family!r}")
            if obj.get("anchor", 0) != 0:
                raise InputError("the difex family is anchored at 0")
            return make_difex(int(obj["n"]), int(obj["M"]))
        if kind == "expr":
            return parse_expression(obj["src"], tuple(obj.get("domain", (-math.inf, math.inf))))
    except KeyError as exc:
        raise InputError(f"function JSON of kind {kind!r} lacks field {exc}") from exc
    except (ExprSyntaxError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc
    raise InputError(f"unknown function kind {kind!r}")


def load_set(obj, domain: Interval) -> ClosedSetDesc:
    """A set is either ``{"domain": .., "components": ..}`` or a bare list of points."""
    try:
        if isinstance(obj, list):
            return ClosedSetDesc.from_points(domain, obj)
        if isinstance(obj, dict):
            if "domain" not in obj:
                obj = {**obj, "domain": [domain.lo, domain.hi]}
            return ClosedSetDesc.from_json(obj)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed set: {exc}") from exc
    raise InputError("a set must be a list of points or an object with components")


def load_witness(obj: dict, domain: Interval) -> DecompositionWitness:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("witness JSON needs a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "sbvg-bar":
            sets = tuple(tuple(load_set(s, domain) for s in row) for row in obj["sets"])
            deltas = tuple(tuple(r) for r in obj["deltas"])
        else:
            sets = tuple(load_set(s, domain) for s in obj["sets"])
            deltas = tuple(obj["deltas"]) if "deltas" in obj else None
        return DecompositionWitness(kind, sets, deltas)
    except KeyError as exc:
        raise InputError(f"witness lacks field {exc}") from exc
    except WitnessError as exc:
        raise InputError(str(exc)) from exc
