"""Small tree builders shared by the test modules."""

from fractions import Fraction as F

from superhedge.cones import BidAskSpec, SolvencyCone, build_cone
from superhedge.tree import NodeRecord, ScenarioTree


def box(mid, *intervals):
    return SolvencyCone.from_box(mid, intervals)


def frictionless(mid):
    return build_cone(BidAskSpec(len(mid), mid, frictionless=True))


def spread(mid, c):
    return build_cone(BidAskSpec(len(mid), mid, factor=F(c)))


def one_period(root_cone, child_cones, kernels):
    """Root ``r`` with children ``r.0, r.1, ...``; kernels are weight lists."""
    names = [f"r.{k}" for k in range(len(child_cones))]
    recs = [NodeRecord("r", None, root_cone, tuple(dict(zip(names, k)) for k in kernels))]
    recs += [NodeRecord(nm, "r", c) for nm, c in zip(names, child_cones)]
    return ScenarioTree.from_records(1, root_cone.d, recs)


def binomial_call(cone_at):
    """d=2 binomial: S0=1, up 2, down 1/2, both Dirac kernels; xi(u)=(0,1), xi(d)=0."""
    tree = one_period(cone_at((1, 1)), [cone_at((2, 1)), cone_at((F(1, 2), 1))], [(1, 0), (0, 1)])
    return tree


# acceptance verdict lines, printed in the pytest terminal summary
ACCEPTANCE_LINES: list[str] = []
