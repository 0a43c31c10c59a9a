"""Randomised properties; hypothesis drives seeds and small exact inputs."""

from fractions import Fraction as F

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from superhedge.arbitrage import check_na2, find_scps
from superhedge.cones import BidAskSpec, build_cone, dot
from superhedge.generate import generate
from superhedge.oracles import holds_qs_by_enumeration, in_cone_by_generators
from superhedge.pricing import ClaimSpec, price_dual, price_primal
from superhedge.tree import holds_qs, polar_mask

SETTINGS = settings(max_examples=40, deadline=None, derandomize=True,
                    suppress_health_check=[HealthCheck.too_slow])

ratios = st.fractions(min_value=-5, max_value=5, max_denominator=6)
seeds = st.integers(min_value=0, max_value=10**6)


@st.composite
def cones(draw):
    d = draw(st.integers(2, 4))
    mid = tuple(draw(st.fractions(F(1, 4), 4, max_denominator=4)) for _ in range(d - 1)) + (F(1),)
    spec = BidAskSpec(d, mid, factor=draw(st.sampled_from([F(9, 8), F(3, 2), F(2), F(3)])))
    return build_cone(spec)


@SETTINGS
@given(cones(), st.data())
def test_bipolarity(K, data):
    x = tuple(data.draw(ratios) for _ in range(K.d))
    assert K.in_cone(x) == in_cone_by_generators(K, x)
    assert K.in_minus_cone(x) == K.in_cone(tuple(-a for a in x))


@SETTINGS
@given(cones(), st.data())
def test_projection(K, data):
    p = tuple(data.draw(st.fractions(-2, 8, max_denominator=5)) for _ in range(K.d - 1)) + (F(1),)
    q = tuple(data.draw(st.fractions(-2, 8, max_denominator=5)) for _ in range(K.d - 1)) + (F(1),)
    pp, pq = K.project_to_slice(p), K.project_to_slice(q)
    assert K.in_slice(pp) and K.project_to_slice(pp) == pp
    assert sum((a - b) ** 2 for a, b in zip(pp, pq)) <= sum((a - b) ** 2 for a, b in zip(p, q))
    # first-order optimality: (p - pp) . (v - pp) <= 0 for every slice vertex v
    assert all(dot([a - b for a, b in zip(p, pp)], [a - b for a, b in zip(v, pp)]) <= 0 for v in K.vertices)


@SETTINGS
@given(seeds)
def test_polar_mask_matches_enumeration(seed):
    tree = generate(seed, T=2, d=2, branching=2, kernels=2, na2="any").tree()
    assert len(list(tree.kernel_selections())) <= 64
    mask = polar_mask(tree)
    for n in tree.nodes:
        def pred(m):
            return m.index != n.index
        assert holds_qs(tree, pred) == holds_qs_by_enumeration(tree, pred) == (not mask[n.index])


@SETTINGS
@given(seeds)
def test_redundant_mixture_kernel_changes_nothing(seed):
    spec = generate(seed, T=2, d=2, branching=3, kernels=2, na2="yes")
    tree = spec.tree()
    claim = spec.claim(tree)
    base = price_primal(tree, claim).price
    for n in tree.nodes:
        if len(n.kernels) < 2:
            continue
        mix = tuple((a + 2 * b) / 3 for a, b in zip(n.kernels[0], n.kernels[1]))
        bigger = tree.with_kernels(n.index, n.kernels + (mix,))
        assert polar_mask(bigger) == polar_mask(tree)
        assert price_primal(bigger, claim).price == base
        assert check_na2(bigger).holds


@SETTINGS
@given(seeds, st.sampled_from([2, 3]))
def test_weak_duality_with_any_price_system(seed, d):
    spec = generate(seed, T=2, d=d, branching=2, kernels=2, na2="yes")
    tree = spec.tree()
    claim = spec.claim(tree)
    upper = price_primal(tree, claim)
    ps = find_scps(tree)
    value = sum((ps.q[n.name] * dot(claim.payoff(n.index, d), ps.Z[n.name])
                 for n in tree.terminals() if n.name in ps.q), F(0))
    assert value <= price_dual(tree, claim).price == upper.price
    assert upper.certificate.verify(tree, claim, upper.price)


@SETTINGS
@given(seeds, st.fractions(-4, 4, max_denominator=7))
def test_cash_translation(seed, a):
    spec = generate(seed, T=2, d=2, branching=2, kernels=2, na2="yes")
    tree = spec.tree()
    claim = spec.claim(tree)
    full = ClaimSpec({n.index: claim.payoff(n.index, 2) for n in tree.terminals()})
    assert price_primal(tree, full.shifted(a, 2)).price == price_primal(tree, full).price + a
