import json
from fractions import Fraction as F

import pytest

from superhedge.errors import SpecParseError
from superhedge.generate import generate
from superhedge.pricing import ClaimSpec, price_primal
from superhedge.specfile import digest, dumps, from_tree, loads, parse_number

from helpers import binomial_call, frictionless, spread

DOC = {
    "schema": 1, "T": 1, "d": 2,
    "nodes": [
        {"id": "r", "parent": None, "mid": ["1", "1"], "spread": "3/2",
         "kernels": [{"r.0": "1/2", "r.1": "1/2"}]},
        {"id": "r.0", "parent": "r", "mid": ["2", "1"], "intervals": [["3/2", "3"]]},
        {"id": "r.1", "parent": "r", "mid": ["1/2", "1"], "frictionless": True},
    ],
    "claim": {"xi": {"r.0": ["0", "1"]}, "statics": [{"zeta": {"r.0": ["1", "0"]}, "c": "2"}]},
}


def test_round_trip():
    spec = loads(json.dumps(DOC))
    assert loads(dumps(spec)) == spec
    tree = spec.tree()
    assert tree["r.0"].cone.box == ((F(3, 2), 3),)
    assert tree["r.1"].cone.frictionless
    claim = spec.claim(tree)
    assert claim.e == 1 and claim.statics[0].c == 2


def test_numbers_are_exact():
    assert parse_number("0.1", "x") == F(1, 10)
    assert loads(json.dumps(DOC).replace('"3/2"', "1.5")).nodes[0].spread == F(3, 2)
    assert loads(json.dumps(DOC).replace('"3/2"', "0.30000000000000004")).nodes[0].spread == F(30000000000000004, 10**17)
    with pytest.raises(SpecParseError):
        parse_number("pi", "x")
    with pytest.raises(SpecParseError):
        parse_number(True, "x")


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.update(extra=1), "$"),
    (lambda d: d["nodes"][0].update(color="red"), "nodes[0]"),
    (lambda d: d["nodes"][1].pop("intervals"), "nodes[1]"),
    (lambda d: d["nodes"][1].update(mid=["2"]), "nodes[1].mid"),
    (lambda d: d["claim"]["xi"].update(zz=["1", "1"]), "claim.xi"),
    (lambda d: d["nodes"][1].update(intervals=[["3", "4"]]), "nodes[1] (r.0)"),
    (lambda d: d["nodes"][0]["kernels"][0].update({"r.0": "1"}), "nodes"),
    (lambda d: d.update(schema=2), "schema"),
])
def test_errors_name_the_field(mutate, where):
    doc = json.loads(json.dumps(DOC))
    mutate(doc)
    with pytest.raises(SpecParseError) as info:
        spec = loads(json.dumps(doc))
        spec.claim(spec.tree())
    assert info.value.where == where


def test_malformed_json():
    with pytest.raises(SpecParseError, match="line 1"):
        loads("{")


def test_generator_is_deterministic():
    a = dumps(generate(7, T=2, d=2, na2="yes"))
    b = dumps(generate(7, T=2, d=2, na2="yes"))
    assert a == b
    assert a != dumps(generate(8, T=2, d=2, na2="yes"))
    assert digest(loads(a)) == digest(generate(7, T=2, d=2, na2="yes"))


def test_generator_arguments_checked():
    with pytest.raises(ValueError):
        generate(1, T=0)
    with pytest.raises(ValueError):
        generate(1, na2="maybe")


def test_from_tree_preserves_prices():
    for cone_at in (frictionless, lambda m: spread(m, F(3, 2))):
        tree = binomial_call(cone_at)
        claim = ClaimSpec.make(tree, {"r.0": (0, 1)})
        spec = loads(dumps(from_tree(tree, claim)))
        t2 = spec.tree()
        assert price_primal(t2, spec.claim(t2)).price == price_primal(tree, claim).price
