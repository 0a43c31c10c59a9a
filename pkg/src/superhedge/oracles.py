"""Independent verifiers.

Each function here avoids the machinery it checks: the one-period oracles are
closed-form scans over interval endpoints, the quasi-sure oracle enumerates
kernel selections, and the frictionless oracle prices over path measures
rather than node-wise price systems.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .cones import SolvencyCone, Vector, dot, vec
from .errors import NAViolated, UnsupportedClaim, UnsupportedShape
from .lp import LinearProgram, solve
from .pricing import ClaimSpec
from .tree import ScenarioTree


def _interval(cone: SolvencyCone) -> tuple[Fraction, Fraction]:
    lo = min(v[0] for v in cone.vertices)
    hi = max(v[0] for v in cone.vertices)
    return lo, hi


def brute_price_one_period(tree: ScenarioTree, claim: ClaimSpec) -> Fraction:
    """Super-hedging price for ``T = 1``, ``d = 2`` by enumerating basic solutions.

    A dual solution mixes child points ``(child, Z)`` with ``Z`` an endpoint of
    the child's bid/ask interval, and the mean must land in the root interval.
    The objective is linear in the mixture, so the maximum sits at a single
    point whose mean is already admissible, or at a pair mixed so that the mean
    hits a root endpoint exactly.
    """
    if tree.T != 1 or tree.d != 2:
        raise UnsupportedShape("the one-period oracle handles T = 1 and d = 2 only")
    if claim.e:
        raise UnsupportedClaim("the one-period oracle handles claims without static options")
    root = tree.root
    lo0, hi0 = _interval(root.cone)
    points = []
    for c in tree.support(root):
        xi = claim.payoff(c, 2)
        lo, hi = _interval(tree[c].cone)
        for z in sorted({lo, hi}):
            points.append((z, xi[0] * z + xi[1]))
    best = None
    for z, val in points:
        if lo0 <= z <= hi0:
            best = val if best is None else max(best, val)
    for (z1, v1), (z2, v2) in itertools.combinations(points, 2):
        if z1 == z2:
            continue
        for target in (lo0, hi0):
            w = (target - z2) / (z1 - z2)  # weight on the first point
            if 0 < w < 1:
                val = w * v1 + (1 - w) * v2
                best = val if best is None else max(best, val)
    if best is None:
        raise NAViolated("no martingale split of the root interval exists", node=root.name)
    return best


def brute_na2(tree: ScenarioTree) -> bool:
    """For ``d = 2`` the local condition is interval inclusion: the root interval
    must sit inside ``[min child lo, max child hi]`` over reachable children."""
    if tree.d != 2:
        raise UnsupportedShape("the interval oracle handles d = 2 only")
    for n in tree.reachable_nodes():
        if not n.children:
            continue
        lo, hi = _interval(n.cone)
        spans = [_interval(tree[c].cone) for c in tree.support(n)]
        if lo < min(a for a, _ in spans) or hi > max(b for _, b in spans):
            return False
    return True


def supported_nodes(tree: ScenarioTree, selection: dict[int, int]) -> set[int]:
    """Nodes with positive probability under the product measure picking
    kernel ``selection[n]`` at each internal node ``n``."""
    out = {tree.root.index}
    stack = [tree.root]
    while stack:
        n = stack.pop()
        if not n.children:
            continue
        ker = n.kernels[selection[n.index]]
        for p, c in zip(ker, n.children):
            if p > 0:
                out.add(c)
                stack.append(tree[c])
    return out


def holds_qs_by_enumeration(tree: ScenarioTree, predicate) -> bool:
    """Predicate at every node charged by some single model of the family."""
    for sel in tree.kernel_selections():
        for idx in supported_nodes(tree, sel):
            if not predicate(tree[idx]):
                return False
    return True


def in_cone_by_generators(K: SolvencyCone, x) -> bool:
    """``x`` as a nonnegative combination of the generators of ``K``."""
    x = vec(x)
    gens = K.generators()
    lp = LinearProgram("min")
    mu = [lp.add_var("nonneg") for _ in gens]
    for i in range(K.d):
        lp.add_row({m: g[i] for m, g in zip(mu, gens)}, "==", x[i])
    return solve(lp, method="exact").optimal


def robust_frictionless_price(tree: ScenarioTree, claim: ClaimSpec) -> Fraction:
    """``sup E[xi . S_T]`` over martingale measures written on terminal paths.

    Only for trees in which every node is frictionless (a single dual point).
    """
    if any(not n.cone.frictionless for n in tree.nodes):
        raise UnsupportedShape("frictionless oracle needs a frictionless toggle at every node")
    d = tree.d
    terminals = tree.reachable_nodes(tree.T)
    S = {n.index: n.cone.vertices[0] for n in tree.nodes}
    lp = LinearProgram("max")
    p = {t.index: lp.add_var("nonneg", dot(claim.payoff(t.index, d), S[t.index])) for t in terminals}
    lp.add_row({j: 1 for j in p.values()}, "==", 1)
    paths = {t.index: tree.path(t) for t in terminals}
    for n in tree.reachable_nodes():
        if not n.children:
            continue
        for i in range(d - 1):
            row = {}
            for t, path in paths.items():
                if len(path) > n.t + 1 and path[n.t].index == n.index:
                    row[p[t]] = S[path[n.t + 1].index][i] - S[n.index][i]
            lp.add_row(row, "==", 0)
    out = solve(lp)
    if not out.optimal:
        raise NAViolated("no martingale measure on the reachable paths")
    return out.value


def analytic_binomial_call(s0, up, down, payoff_up, payoff_down) -> Fraction:
    """Replication price in a one-period frictionless binomial market."""
    s0, up, down = Fraction(s0), Fraction(up), Fraction(down)
    q = (s0 - down) / (up - down)
    return q * Fraction(payoff_up) + (1 - q) * Fraction(payoff_down)


__all__ = [
    "brute_price_one_period", "brute_na2", "holds_qs_by_enumeration", "supported_nodes",
    "in_cone_by_generators", "robust_frictionless_price", "analytic_binomial_call",
]
