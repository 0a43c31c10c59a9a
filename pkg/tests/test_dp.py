from fractions import Fraction as F

import pytest

from superhedge.dp import backward_induction, envelope_value
from superhedge.enlarged import build_enlarged
from superhedge.errors import NAViolated, UnsupportedClaim
from superhedge.generate import generate
from superhedge.pricing import ClaimSpec, price_enlarged, price_primal
from superhedge.tree import NodeRecord, ScenarioTree

from helpers import binomial_call, box, frictionless, one_period, spread


def _binomial2(c):
    """Two-period recombining-in-price binomial: up x2, down x1/2, Dirac kernels."""
    recs, prices = [], {"r": F(1)}
    for name, parent in [("r", None), ("u", "r"), ("d", "r"), ("uu", "u"), ("ud", "u"), ("du", "d"), ("dd", "d")]:
        if parent is not None:
            prices[name] = prices[parent] * (2 if name[-1] == "u" else F(1, 2))
        stem = "" if name == "r" else name
        kids = [] if len(stem) == 2 else [stem + "u", stem + "d"]
        kernels = tuple({k: 1} for k in kids)
        recs.append(NodeRecord(name, parent, spread((prices[name], 1), c), kernels))
    return ScenarioTree.from_records(2, 2, recs)


def test_zero_claim():
    tree = binomial_call(lambda m: spread(m, 2))
    r = backward_induction(build_enlarged(tree, 3), ClaimSpec.make(tree, {}), grid_values=True)
    assert r.price == 0
    assert all(h == (0, 0) for h in r.H.values())
    assert set(r.values.grid_values.values()) == {0}


@pytest.mark.parametrize("cone_at", [frictionless, lambda m: spread(m, F(3, 2)), lambda m: spread(m, 3)])
def test_one_period_matches_minimax(cone_at):
    tree = binomial_call(cone_at)
    claim = ClaimSpec.make(tree, {"r.0": (1, -1), "r.1": (0, F(1, 2))})
    E = build_enlarged(tree, 3)
    r = backward_induction(E, claim)
    assert r.price == price_enlarged(E, claim).price == price_primal(tree, claim).price
    assert r.certificate.verify(tree, claim, r.price)


def test_two_period_binomial():
    tree = _binomial2(F(3, 2))
    claim = ClaimSpec.make(tree, {"uu": (1, -1), "ud": (0, 0), "du": (0, 0), "dd": (0, 0)})
    E = build_enlarged(tree, 3)
    r = backward_induction(E, claim)
    assert r.price == price_primal(tree, claim).price == price_enlarged(E, claim).price
    assert r.certificate.verify(tree, claim, r.price)


def test_value_function_is_concave_on_grid():
    tree = _binomial2(2)
    claim = ClaimSpec.make(tree, {"uu": (1, 0), "dd": (0, 1)})
    E = build_enlarged(tree, 5)
    r = backward_induction(E, claim, grid_values=True)
    xs = sorted(X for (n, X) in r.values.grid_values if n == 0)
    g = [r.values.g(0, X) for X in xs]
    for a, b, c, ga, gb, gc in zip(xs, xs[1:], xs[2:], g, g[1:], g[2:]):
        w = (c[0] - b[0]) / (c[0] - a[0])
        assert gb >= w * ga + (1 - w) * gc


def test_envelope_outside_hull():
    pts = [((F(1), F(1)), F(0)), ((F(2), F(1)), F(1))]
    assert envelope_value(pts, (F(3, 2), F(1))) == F(1, 2)
    assert envelope_value(pts, (F(3), F(1))) is None


def test_statics_not_supported():
    tree = binomial_call(frictionless)
    claim = ClaimSpec.make(tree, {"r.0": (0, 1)}, [({"r.0": (0, 1)}, F(1, 2))])
    with pytest.raises(UnsupportedClaim):
        backward_induction(build_enlarged(tree, 3), claim)


def test_arbitrage_detected():
    tree = one_period(box((1, 1), (F(2, 3), F(3, 2))), [box((4, 1), (F(8, 3), 6))], [(1,)])
    with pytest.raises(NAViolated):
        backward_induction(build_enlarged(tree, 3), ClaimSpec.make(tree, {}))


@pytest.mark.parametrize("seed", range(20))
def test_generated_instances_agree(seed):
    spec = generate(seed, T=2 + seed % 2, d=2 + seed % 3 // 2, branching=2, kernels=2)
    tree = spec.tree()
    claim = spec.claim(tree)
    E = build_enlarged(tree, 3)
    r = backward_induction(E, claim)
    assert r.price == price_primal(tree, claim).price
    assert r.certificate.verify(tree, claim, r.price)
