from fractions import Fraction as F

import pytest

from superhedge.errors import DimensionMismatch, TreeError
from superhedge.generate import generate
from superhedge.oracles import holds_qs_by_enumeration
from superhedge.tree import NodeRecord, ScenarioTree, holds_qs, is_admissible, polar_mask

from helpers import one_period, spread


def _two_kernel_tree():
    c = spread((1, 1), 2)
    return one_period(c, [c, c, c], [(F(1, 2), F(1, 2), 0), (0, 1, 0)])


def test_polar_mask_excludes_uncharged_child():
    tree = _two_kernel_tree()
    assert polar_mask(tree) == (True, True, True, False)
    assert tree.support(tree.root) == [1, 2]


def test_admissible_only_on_reachable_nodes():
    tree = _two_kernel_tree()
    good = [(0, 0), (1, -2), (-1, F(1, 2)), (0, 0)]
    assert is_admissible(tree, good)
    # a gift at the unreachable node is ignored
    assert is_admissible(tree, good[:3] + [(5, 5)])
    assert not is_admissible(tree, [(0, 0), (1, -1), (0, 0), (0, 0)])
    with pytest.raises(DimensionMismatch):
        is_admissible(tree, [(0, 0)] * 3)
    with pytest.raises(DimensionMismatch):
        is_admissible(tree, {1: (1, 2, 3)})


@pytest.mark.parametrize("records, msg", [
    ([], "root"),
    ([("a", None), ("b", "zz")], "unknown parent"),
    ([("a", None), ("a", None)], "duplicate"),
])
def test_bad_records(records, msg):
    c = spread((1, 1), 2)
    with pytest.raises(TreeError, match=msg):
        ScenarioTree.from_records(1, 2, [NodeRecord(n, p, c, ({"b": 1},) if p is None else ()) for n, p in records])


def test_kernel_validation():
    c = spread((1, 1), 2)
    with pytest.raises(TreeError, match="sums to"):
        one_period(c, [c, c], [(F(1, 2), F(1, 3))])
    with pytest.raises(TreeError, match="negative"):
        one_period(c, [c, c], [(2, -1)])
    with pytest.raises(TreeError, match="no transition kernel"):
        one_period(c, [c], [])
    with pytest.raises(DimensionMismatch):
        one_period(c, [spread((1, 1, 1), 2)], [(1,)])


def test_qs_mask_matches_enumeration_on_generated_trees():
    checked = 0
    for seed in range(40):
        tree = generate(seed, T=2, d=2, branching=2, kernels=2, na2="any").tree()
        if len(list(tree.kernel_selections())) > 64:
            continue
        for target in range(len(tree.nodes)):
            def pred(n):
                return n.index != target
            assert holds_qs(tree, pred) == holds_qs_by_enumeration(tree, pred)
        checked += 1
    assert checked >= 10


def test_reachability_monotone_in_kernel_family():
    for seed in range(30):
        tree = generate(seed, T=2, d=2, branching=3, kernels=2, na2="any").tree()
        base = polar_mask(tree)
        for n in tree.nodes:
            if not n.children:
                continue
            uniform = tuple(F(1, len(n.children)) for _ in n.children)
            bigger = polar_mask(tree.with_kernels(n.index, n.kernels + (uniform,)))
            assert all(b or not a for a, b in zip(base, bigger))
            smaller = polar_mask(tree.with_kernels(n.index, n.kernels[:1]))
            assert all(a or not s for a, s in zip(base, smaller))


def test_lookup_and_paths():
    tree = generate(3, T=2, d=2, branching=2, kernels=1).tree()
    leaf = tree.terminals()[-1]
    path = tree.path(leaf)
    assert [n.t for n in path] == [0, 1, 2]
    assert tree[leaf.name] is leaf and tree.index_of(leaf.name) == leaf.index
    assert [n.index for n in tree.nodes] == list(range(len(tree)))
