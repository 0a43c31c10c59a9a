from fractions import Fraction as F

import pytest

from superhedge.enlarged import build_enlarged
from superhedge.errors import DimensionMismatch, Unbounded, UnsupportedClaim
from superhedge.generate import generate
from superhedge.oracles import analytic_binomial_call, brute_price_one_period, robust_frictionless_price
from superhedge.pricing import (
    ClaimSpec,
    HedgeCertificate,
    certificate_from_H,
    eta_from_H,
    price_dual,
    price_enlarged,
    price_primal,
    robustness_check,
)

from helpers import binomial_call, frictionless, spread

CALL = {"r.0": (0, 1)}


def _routes(tree, claim, res=3):
    E = build_enlarged(tree, res)
    return (price_primal(tree, claim).price, price_dual(tree, claim).price,
            price_enlarged(E, claim).price, price_enlarged(E, claim, method="paths").price)


def test_zero_claim():
    tree = binomial_call(lambda m: spread(m, 2))
    claim = ClaimSpec.make(tree, {})
    assert _routes(tree, claim) == (0, 0, 0, 0)
    zero = HedgeCertificate(F(0), (), {n.index: (0, 0) for n in tree.nodes})
    assert zero.verify(tree, claim, F(0))


def test_frictionless_binomial_call():
    tree = binomial_call(frictionless)
    claim = ClaimSpec.make(tree, CALL)
    assert analytic_binomial_call(1, 2, F(1, 2), 1, 0) == F(1, 3)
    assert robust_frictionless_price(tree, claim) == F(1, 3)
    assert brute_price_one_period(tree, claim) == F(1, 3)
    assert _routes(tree, claim) == (F(1, 3),) * 4
    dual = price_dual(tree, claim)
    assert dual.q == {0: 1, 1: F(1, 3), 2: F(2, 3)}
    res = price_primal(tree, claim)
    assert res.certificate.verify(tree, claim, F(1, 3))


def test_binomial_with_spread():
    tree = binomial_call(lambda m: spread(m, F(3, 2)))
    claim = ClaimSpec.make(tree, CALL)
    oracle = brute_price_one_period(tree, claim)
    assert oracle == 1
    assert _routes(tree, claim) == (oracle,) * 4


def test_cash_translation():
    tree = binomial_call(lambda m: spread(m, F(3, 2)))
    claim = ClaimSpec.make(tree, {"r.0": (1, 0), "r.1": (F(-1, 2), 2)})
    base = price_primal(tree, claim).price
    for a in (F(-3), F(1, 7), F(5)):
        shifted = ClaimSpec.make(tree, {"r.0": (1, a), "r.1": (F(-1, 2), 2 + a)})
        assert price_primal(tree, shifted).price == base + a
        assert price_primal(tree, claim.shifted(a, 2)).price == base + a


def test_constant_claim_prices_to_constant():
    for seed in range(10):
        spec = generate(seed, T=2, d=2 + seed % 2, branching=2, kernels=2)
        tree = spec.tree()
        d = tree.d
        claim = ClaimSpec.make(tree, {n.index: (0,) * (d - 1) + (F(7, 3),) for n in tree.terminals()})
        assert price_dual(tree, claim).price == F(7, 3)
        assert price_primal(tree, claim).price == F(7, 3)


def test_eta_from_H_pays_worst_side():
    tree = binomial_call(lambda m: spread(m, 2))
    E = build_enlarged(tree, 3)
    assert eta_from_H(E, {}) == {0: (0, 0), 1: (0, 0), 2: (0, 0)}
    assert eta_from_H(E, {0: (1, 0)})[0] == (1, -2)
    assert eta_from_H(E, {0: (-1, 0)})[0] == (-1, F(1, 2))


def test_enlarged_hedge_converts_to_base_certificate():
    for seed in range(10):
        spec = generate(seed, T=2, d=2, branching=2, kernels=2)
        tree = spec.tree()
        claim = spec.claim(tree)
        E = build_enlarged(tree, 3)
        r = price_enlarged(E, claim)
        cert = certificate_from_H(E, claim, r.price, r.ell, r.H)
        assert cert.verify(tree, claim, r.price)


def test_static_option_cheaper_than_claim():
    tree = binomial_call(lambda m: spread(m, F(3, 2)))
    claim = ClaimSpec.make(tree, CALL, [(CALL, F(1, 2))])
    assert robustness_check(tree, claim)
    assert price_primal(tree, claim).price == F(1, 2)
    assert price_dual(tree, claim).price == F(1, 2)
    assert price_enlarged(build_enlarged(tree, 3), claim).price == F(1, 2)
    assert price_primal(tree, claim.drop_last()).price == 1


def test_static_option_too_expensive_to_matter():
    tree = binomial_call(frictionless)
    claim = ClaimSpec.make(tree, CALL, [(CALL, F(1, 2))])
    assert robustness_check(tree, claim)
    assert price_primal(tree, claim).price == F(1, 3)


def test_free_static_option_is_an_arbitrage():
    tree = binomial_call(frictionless)
    claim = ClaimSpec.make(tree, CALL, [(CALL, 0)])
    with pytest.raises(Unbounded):
        price_primal(tree, claim)
    assert not robustness_check(tree, claim)


def test_robustness_large_bound_holds():
    tree = binomial_call(lambda m: spread(m, F(3, 2)))
    claim = ClaimSpec.make(tree, CALL, [(CALL, 1000)])
    assert robustness_check(tree, claim)


def test_robustness_constant_option_at_its_value_fails():
    tree = binomial_call(lambda m: spread(m, F(3, 2)))
    const = {"r.0": (0, 3), "r.1": (0, 3)}
    assert not robustness_check(tree, ClaimSpec.make(tree, CALL, [(const, 3)]))
    # below the value the option is a free gain, above it neither side is
    assert not robustness_check(tree, ClaimSpec.make(tree, CALL, [(const, F(29, 10))]))
    assert robustness_check(tree, ClaimSpec.make(tree, CALL, [(const, F(31, 10))]))


def test_claim_validation():
    tree = binomial_call(frictionless)
    with pytest.raises(UnsupportedClaim):
        ClaimSpec.make(tree, {"r": (0, 1)})
    with pytest.raises(DimensionMismatch):
        ClaimSpec.make(tree, {"r.0": (0, 1, 2)})
    with pytest.raises(UnsupportedClaim):
        ClaimSpec.make(tree, CALL, [(CALL, -1)])
    with pytest.raises(UnsupportedClaim):
        robustness_check(tree, ClaimSpec.make(tree, CALL))
