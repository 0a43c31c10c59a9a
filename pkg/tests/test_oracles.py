from fractions import Fraction as F

import pytest

from superhedge.errors import NAViolated, UnsupportedShape
from superhedge.oracles import (
    brute_na2,
    brute_price_one_period,
    holds_qs_by_enumeration,
    in_cone_by_generators,
    robust_frictionless_price,
    supported_nodes,
)
from superhedge.pricing import ClaimSpec

from helpers import binomial_call, box, frictionless, one_period, spread


def test_brute_price_examples():
    tree = binomial_call(frictionless)
    assert brute_price_one_period(tree, ClaimSpec.make(tree, {"r.0": (0, 1)})) == F(1, 3)
    assert brute_price_one_period(tree, ClaimSpec.make(tree, {})) == 0
    assert brute_price_one_period(tree, ClaimSpec.make(tree, {"r.0": (0, 1), "r.1": (0, 1)})) == 1


def test_brute_price_needs_a_split():
    tree = one_period(box((1, 1), (F(2, 3), F(3, 2))), [box((4, 1), (F(8, 3), 6))], [(1,)])
    with pytest.raises(NAViolated):
        brute_price_one_period(tree, ClaimSpec.make(tree, {}))


def test_brute_price_shape_guard():
    tree = one_period(spread((1, 1, 1), 2), [spread((1, 1, 1), 2)], [(1,)])
    with pytest.raises(UnsupportedShape):
        brute_price_one_period(tree, ClaimSpec.make(tree, {}))
    with pytest.raises(UnsupportedShape):
        brute_na2(tree)


def test_brute_na2_examples():
    nested = one_period(box((1, 1), (F(3, 4), F(4, 3))), [box((1, 1), (F(1, 2), 2))], [(1,)])
    disjoint = one_period(box((1, 1), (F(2, 3), F(3, 2))), [box((4, 1), (F(8, 3), 6))], [(1,)])
    touching = one_period(box((1, 1), (F(1, 2), 2)), [box((1, 1), (F(1, 2), 2))], [(1,)])
    assert brute_na2(nested) and not brute_na2(disjoint) and brute_na2(touching)


def test_supported_nodes_per_selection():
    c = spread((1, 1), 2)
    tree = one_period(c, [c, c], [(1, 0), (0, 1)])
    assert supported_nodes(tree, {0: 0}) == {0, 1}
    assert supported_nodes(tree, {0: 1}) == {0, 2}
    assert not holds_qs_by_enumeration(tree, lambda n: n.index != 2)


def test_generators_membership():
    K = spread((1, 1), 2)
    assert in_cone_by_generators(K, (1, 1)) and in_cone_by_generators(K, (-1, 2))
    assert not in_cone_by_generators(K, (-1, 1))


def test_frictionless_oracle_guard():
    tree = binomial_call(lambda m: spread(m, 2))
    with pytest.raises(UnsupportedShape):
        robust_frictionless_price(tree, ClaimSpec.make(tree, {}))


def test_frictionless_oracle_two_kernels():
    # a trinomial split into two binomial models: the robust price is the larger one
    tree = one_period(frictionless((1, 1)), [frictionless((2, 1)), frictionless((1, 1)), frictionless((F(1, 2), 1))],
                      [(F(1, 3), 0, F(2, 3)), (0, 1, 0)])
    claim = ClaimSpec.make(tree, {"r.0": (0, 3)})
    assert robust_frictionless_price(tree, claim) == 1
