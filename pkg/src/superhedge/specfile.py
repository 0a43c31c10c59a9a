"""JSON market-spec files (``"schema": 1``).

Numbers are ratio strings (``"1/3"``), decimal strings (``"0.25"``) or JSON
integers; decimal literals are read exactly.  Unknown fields are rejected.

Example::

    {"schema": 1, "T": 1, "d": 2,
     "nodes": [
       {"id": "r", "parent": null, "mid": ["1", "1"], "spread": "3/2",
        "kernels": [{"r.0": "1/2", "r.1": "1/2"}]},
       {"id": "r.0", "parent": "r", "mid": ["2", "1"], "intervals": [["3/2", "3"]]},
       {"id": "r.1", "parent": "r", "mid": ["1/2", "1"], "frictionless": true}],
     "claim": {"xi": {"r.0": ["0", "1"]},
               "statics": [{"zeta": {"r.0": ["1", "0"]}, "c": "2"}]}}
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any

from .cones import BidAskSpec, build_cone
from .errors import ConeError, SpecParseError, SuperhedgeError
from .pricing import ClaimSpec
from .tree import NodeRecord, ScenarioTree

SCHEMA = 1


@dataclass
class NodeSpec:
    id: str
    parent: str | None
    mid: tuple[Fraction, ...]
    spread: Fraction | None = None
    intervals: tuple[tuple[Fraction, Fraction], ...] | None = None
    frictionless: bool = False
    kernels: tuple[dict[str, Fraction], ...] = ()

    def bid_ask(self, d: int) -> BidAskSpec:
        return BidAskSpec(d, self.mid, self.spread, self.intervals, self.frictionless)


@dataclass
class MarketSpec:
    T: int
    d: int
    nodes: list[NodeSpec]
    xi: dict[str, tuple[Fraction, ...]] = field(default_factory=dict)
    statics: list[tuple[dict[str, tuple[Fraction, ...]], Fraction]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def tree(self) -> ScenarioTree:
        records = []
        for k, n in enumerate(self.nodes):
            try:
                cone = build_cone(n.bid_ask(self.d))
            except ConeError as exc:
                raise SpecParseError(str(exc), f"nodes[{k}] ({n.id})") from exc
            records.append(NodeRecord(n.id, n.parent, cone, n.kernels))
        try:
            return ScenarioTree.from_records(self.T, self.d, records)
        except SuperhedgeError as exc:
            raise SpecParseError(str(exc), "nodes") from exc

    def claim(self, tree: ScenarioTree | None = None) -> ClaimSpec:
        tree = tree or self.tree()
        for label, m in [("claim.xi", self.xi)] + [(f"claim.statics[{i}].zeta", z) for i, (z, _) in enumerate(self.statics)]:
            for name in m:
                if name not in tree._by_name:
                    raise SpecParseError(f"unknown node {name!r}", label)
        try:
            return ClaimSpec.make(tree, self.xi, self.statics)
        except SuperhedgeError as exc:
            raise SpecParseError(str(exc), "claim") from exc

    def with_claim(self, xi, statics=()) -> "MarketSpec":
        return MarketSpec(self.T, self.d, self.nodes, dict(xi), list(statics), dict(self.meta))


# ---------------------------------------------------------------------------
# emit

def _num(x: Fraction) -> str:
    return str(Fraction(x))


def _vec(v) -> list[str]:
    return [_num(a) for a in v]


def to_json_obj(spec: MarketSpec) -> dict:
    nodes = []
    for n in spec.nodes:
        obj: dict[str, Any] = {"id": n.id, "parent": n.parent, "mid": _vec(n.mid)}
        if n.spread is not None:
            obj["spread"] = _num(n.spread)
        if n.intervals is not None:
            obj["intervals"] = [[_num(lo), _num(hi)] for lo, hi in n.intervals]
        if n.frictionless:
            obj["frictionless"] = True
        if n.kernels:
            obj["kernels"] = [{k: _num(p) for k, p in ker.items()} for ker in n.kernels]
        nodes.append(obj)
    claim: dict[str, Any] = {"xi": {k: _vec(v) for k, v in spec.xi.items()}}
    if spec.statics:
        claim["statics"] = [{"zeta": {k: _vec(v) for k, v in z.items()}, "c": _num(c)} for z, c in spec.statics]
    out = {"schema": SCHEMA, "T": spec.T, "d": spec.d, "nodes": nodes, "claim": claim}
    if spec.meta:
        out["meta"] = spec.meta
    return out


def dumps(spec: MarketSpec) -> str:
    return json.dumps(to_json_obj(spec), indent=2) + "\n"


def digest(spec: MarketSpec) -> str:
    canon = json.dumps(to_json_obj(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# ---------------------------------------------------------------------------
# parse

def _fields(obj, where: str, required: set[str], optional: set[str]) -> None:
    if not isinstance(obj, dict):
        raise SpecParseError("expected an object", where)
    missing = required - obj.keys()
    if missing:
        raise SpecParseError(f"missing field(s) {sorted(missing)}", where)
    unknown = obj.keys() - required - optional
    if unknown:
        raise SpecParseError(f"unknown field(s) {sorted(unknown)}", where)


def parse_number(x, where: str) -> Fraction:
    if isinstance(x, bool) or x is None:
        raise SpecParseError(f"expected a number, got {x!r}", where)
    if isinstance(x, (int, Decimal)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise SpecParseError(f"not an exact number: {x!r}", where) from None
    raise SpecParseError(f"expected a number, got {type(x).__name__}", where)


def _parse_vec(x, where: str, d: int) -> tuple[Fraction, ...]:
    if not isinstance(x, list):
        raise SpecParseError("expected a list", where)
    if len(x) != d:
        raise SpecParseError(f"expected {d} entries, got {len(x)}", where)
    return tuple(parse_number(a, f"{where}[{i}]") for i, a in enumerate(x))


def _parse_payoffs(obj, where: str, d: int) -> dict[str, tuple[Fraction, ...]]:
    if not isinstance(obj, dict):
        raise SpecParseError("expected an object mapping node ids to vectors", where)
    return {k: _parse_vec(v, f"{where}.{k}", d) for k, v in obj.items()}


def from_json_obj(obj) -> MarketSpec:
    _fields(obj, "$", {"schema", "T", "d", "nodes", "claim"}, {"meta"})
    if obj["schema"] != SCHEMA:
        raise SpecParseError(f"unsupported schema {obj['schema']!r}", "schema")
    T, d = obj["T"], obj["d"]
    if not isinstance(T, int) or isinstance(T, bool) or T < 1:
        raise SpecParseError("horizon must be a positive integer", "T")
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise SpecParseError("asset count must be an integer >= 2", "d")
    if not isinstance(obj["nodes"], list) or not obj["nodes"]:
        raise SpecParseError("expected a non-empty list", "nodes")
    nodes = []
    for k, n in enumerate(obj["nodes"]):
        w = f"nodes[{k}]"
        _fields(n, w, {"id", "parent", "mid"}, {"spread", "intervals", "frictionless", "kernels"})
        if not isinstance(n["id"], str) or not n["id"]:
            raise SpecParseError("id must be a non-empty string", f"{w}.id")
        if n["parent"] is not None and not isinstance(n["parent"], str):
            raise SpecParseError("parent must be a string or null", f"{w}.parent")
        mid = _parse_vec(n["mid"], f"{w}.mid", d)
        spread = parse_number(n["spread"], f"{w}.spread") if "spread" in n else None
        intervals = None
        if "intervals" in n:
            iv = n["intervals"]
            if not isinstance(iv, list) or len(iv) != d - 1:
                raise SpecParseError(f"expected {d - 1} intervals", f"{w}.intervals")
            intervals = tuple(tuple(_parse_vec(p, f"{w}.intervals[{i}]", 2)) for i, p in enumerate(iv))
        fr = n.get("frictionless", False)
        if not isinstance(fr, bool):
            raise SpecParseError("expected true or false", f"{w}.frictionless")
        if not fr and spread is None and intervals is None:
            raise SpecParseError("one of spread, intervals or frictionless is required", w)
        kernels = []
        ks = n.get("kernels", [])
        if not isinstance(ks, list):
            raise SpecParseError("expected a list of kernels", f"{w}.kernels")
        for j, ker in enumerate(ks):
            if not isinstance(ker, dict):
                raise SpecParseError("expected an object mapping child ids to weights", f"{w}.kernels[{j}]")
            kernels.append({c: parse_number(p, f"{w}.kernels[{j}].{c}") for c, p in ker.items()})
        nodes.append(NodeSpec(n["id"], n["parent"], mid, spread, intervals, fr, tuple(kernels)))
    claim = obj["claim"]
    _fields(claim, "claim", {"xi"}, {"statics"})
    xi = _parse_payoffs(claim["xi"], "claim.xi", d)
    statics = []
    st = claim.get("statics", [])
    if not isinstance(st, list):
        raise SpecParseError("expected a list", "claim.statics")
    for i, s in enumerate(st):
        w = f"claim.statics[{i}]"
        _fields(s, w, {"zeta", "c"}, set())
        statics.append((_parse_payoffs(s["zeta"], f"{w}.zeta", d), parse_number(s["c"], f"{w}.c")))
    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise SpecParseError("expected an object", "meta")
    return MarketSpec(T, d, nodes, xi, statics, meta)


def loads(text: str) -> MarketSpec:
    try:
        obj = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return from_json_obj(obj)


def load(path: str | Path) -> MarketSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecParseError(exc.strerror or str(exc), str(path)) from None
    return loads(text)


def from_tree(tree: ScenarioTree, claim: ClaimSpec | None = None, meta=None) -> MarketSpec:
    """Spec for a box-shaped tree built in code."""
    nodes = []
    for n in tree.nodes:
        K = n.cone
        if K.box is None:
            raise SpecParseError("only box-shaped slices can be written to a spec file", n.name)
        kernels = tuple({tree[c].name: p for c, p in zip(n.children, ker)} for ker in n.kernels)
        if K.frictionless:
            nodes.append(NodeSpec(n.name, None if n.parent is None else tree[n.parent].name, K.mid,
                                  frictionless=True, kernels=kernels))
        else:
            nodes.append(NodeSpec(n.name, None if n.parent is None else tree[n.parent].name, K.mid,
                                  intervals=K.box, kernels=kernels))
    xi, statics = {}, []
    if claim is not None:
        xi = {tree[k].name: v for k, v in claim.xi.items()}
        statics = [({tree[k].name: v for k, v in s.zeta.items()}, s.c) for s in claim.statics]
    return MarketSpec(tree.T, tree.d, nodes, xi, statics, dict(meta or {}))


__all__ = ["NodeSpec", "MarketSpec", "dumps", "loads", "load", "digest", "from_tree",
           "to_json_obj", "from_json_obj", "SCHEMA"]
