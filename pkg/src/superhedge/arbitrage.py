"""No-arbitrage checks on the base tree and on the randomised market.

The local test at a node ``n`` compares the dual slice of ``n`` with
``C = conv(union of the slices of its reachable children)``:

* NA2 at ``n`` holds iff every vertex of the slice at ``n`` lies in ``C``;
* the enlarged frictionless market has no arbitrage at ``n`` iff every interior
  price at ``n`` lies in the relative interior of ``C`` (a martingale weight
  that is strictly positive on every child point exists).

Both reduce to small mixture LPs over the vertices of the children.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cones import SolvencyCone, Vector, _extreme_points, dot
from .enlarged import EnlargedTree
from .lp import LinearProgram, solve
from .tree import Node, ScenarioTree


# ---------------------------------------------------------------------------
# mixture LPs

def _mixture_program(target: Vector, groups: Sequence[Sequence[Vector]], *, floor: str | None):
    """``sum lam_gk w_gk = target`` with ``lam >= 0``.  Since every ``w`` and the
    target have last coordinate 1, the last row is the normalisation.

    ``floor`` adds a free variable ``s`` to maximise, with ``s`` below every
    group mass (``"group"``) or below every single weight (``"point"``).
    """
    lp = LinearProgram("max")
    lam = [[lp.add_var("nonneg") for _ in g] for g in groups]
    d = len(target)
    for i in range(d):
        lp.add_row({lam[g][k]: w[i] for g, pts in enumerate(groups) for k, w in enumerate(pts)}, "==", target[i])
    s = None
    if floor is not None:
        s = lp.add_var("free", 1, "s")
        for g, pts in enumerate(groups):
            if floor == "group":
                lp.add_row({**{j: 1 for j in lam[g]}, s: -1}, ">=", 0)
            else:
                for j in lam[g]:
                    lp.add_row({j: 1, s: -1}, ">=", 0)
    return lp, lam, s


def in_hull(target: Vector, groups: Sequence[Sequence[Vector]]):
    """Outcome of the closure test ``target in conv(union groups)``."""
    lp, lam, _ = _mixture_program(target, groups, floor=None)
    return solve(lp), lam


def relint_margin(target: Vector, groups: Sequence[Sequence[Vector]]) -> Fraction | None:
    """Largest ``s`` such that ``target`` is a mixture with every point weight ``>= s``;
    ``None`` when the target is outside the hull.  Positive iff relative interior."""
    lp, _, _ = _mixture_program(target, groups, floor="point")
    out = solve(lp)
    return out.value if out.optimal else None


def _child_vertices(tree: ScenarioTree, node: Node) -> list[tuple[Vector, ...]]:
    return [tree[c].cone.vertices for c in tree.support(node)]


# ---------------------------------------------------------------------------
# NA2

@dataclass
class Na2Report:
    holds: bool
    failing_node: str | None = None
    witness: Vector | None = None
    vertex: Vector | None = None
    failures: list[str] = field(default_factory=list)

    def verify(self, tree: ScenarioTree) -> bool:
        if self.holds:
            return self.failing_node is None
        n = tree[self.failing_node]
        z = self.witness
        children_ok = all(tree[c].cone.in_cone(z) for c in tree.support(n))
        return children_ok and not n.cone.in_cone(z)


def check_na2_at(tree: ScenarioTree, node: Node) -> tuple[bool, Vector | None, Vector | None]:
    """Local test; on failure returns the offending vertex and a separating ``zeta``."""
    groups = _child_vertices(tree, node)
    for v in node.cone.vertices:
        out, _ = in_hull(v, groups)
        if not out.optimal:
            # Farkas: <y, w> <= 0 on child vertices and <y, v> > 0, so zeta = -y works
            zeta = tuple(-a for a in out.farkas)
            return False, v, zeta
    return True, None, None


def check_na2(tree: ScenarioTree) -> Na2Report:
    report = Na2Report(True)
    for n in tree.reachable_nodes():
        if n.t == tree.T:
            continue
        ok, v, zeta = check_na2_at(tree, n)
        if not ok:
            report.failures.append(n.name)
            if report.holds:
                report.holds = False
                report.failing_node, report.vertex, report.witness = n.name, v, zeta
    return report


# ---------------------------------------------------------------------------
# NA on the randomised frictionless market

@dataclass
class ArbitrageCertificate:
    """Hold ``h`` (units of the first ``d-1`` assets) from enlarged node
    ``(node, theta)`` with price ``X`` for one period, flat otherwise."""

    node: str
    theta: Vector
    X: Vector
    h: Vector

    def gains(self, enlarged: EnlargedTree) -> list[Fraction]:
        tree = enlarged.tree
        n = tree[self.node]
        out = []
        for c in tree.support(n):
            for Y in enlarged.prices(c):
                out.append(sum((a * (y - x) for a, y, x in zip(self.h, Y, self.X)), Fraction(0)))
        return out

    def verify(self, enlarged: EnlargedTree) -> bool:
        """Nonnegative gain at every reachable child price, strictly positive at
        some interior child price, starting from an interior price at a
        reachable node."""
        tree = enlarged.tree
        n = tree[self.node]
        if not tree.reachable[n.index] or not n.cone.in_slice_relint(self.X):
            return False
        if any(g < 0 for g in self.gains(enlarged)):
            return False
        for c in tree.support(n):
            for Y in enlarged.interior_prices(c):
                if sum((a * (y - x) for a, y, x in zip(self.h, Y, self.X)), Fraction(0)) > 0:
                    return True
        return False


@dataclass
class NaReport:
    holds: bool
    martingale: dict[tuple[str, Vector], dict[Vector, Fraction]] | None = None
    arbitrage: ArbitrageCertificate | None = None

    def verify(self, enlarged: EnlargedTree) -> bool:
        if not self.holds:
            return self.arbitrage is not None and self.arbitrage.verify(enlarged)
        tree = enlarged.tree
        for (name, X), weights in self.martingale.items():
            n = tree[name]
            support = {Y for c in tree.support(n) for Y in enlarged.prices(c)}
            if set(weights) != support or any(w <= 0 for w in weights.values()):
                return False
            if sum(weights.values()) != 1:
                return False
            for i in range(tree.d):
                if sum((w * Y[i] for Y, w in weights.items()), Fraction(0)) != X[i]:
                    return False
        return True


def _separating_strategy(target: Vector, groups, mids) -> Vector | None:
    """``h`` with ``h.(x' - target) >= 0`` on every child point and
    ``sum_c h.(S_c - target) = 1``; exists iff target is outside the relative
    interior of the children hull."""
    k = len(target) - 1
    lp = LinearProgram("min")
    h = [lp.add_var("free") for _ in range(k)]
    for pts in groups:
        for w in pts:
            lp.add_row({h[i]: w[i] - target[i] for i in range(k)}, ">=", 0)
    lp.add_row({h[i]: sum(S[i] - target[i] for S in mids) for i in range(k)}, "==", 1)
    out = solve(lp)
    return tuple(out.x) if out.optimal else None


def check_na_frictionless(enlarged: EnlargedTree) -> NaReport:
    tree = enlarged.tree
    weights: dict[tuple[str, Vector], dict[Vector, Fraction]] = {}
    for n in tree.reachable_nodes():
        if n.t == tree.T:
            continue
        kids = tree.support(n)
        groups = [enlarged.prices(c) for c in kids]
        mids = [tree[c].mid for c in kids]
        # closure part: extreme grid prices of the parent must be reachable mixtures
        bad = None
        for X in _extreme_points(list(enlarged.prices(n))):
            out, _ = in_hull(X, groups)
            if not out.optimal:
                bad = _interior_outside(n.cone, X, groups)
                break
        if bad is None:
            for X in enlarged.interior_prices(n):
                lp, lam, s = _mixture_program(X, groups, floor="point")
                out = solve(lp)
                if not out.optimal or out.value <= 0:
                    bad = X
                    break
                w: dict[Vector, Fraction] = {}
                for g, pts in enumerate(groups):
                    for k, Y in enumerate(pts):
                        w[Y] = w.get(Y, Fraction(0)) + out.x[lam[g][k]]
                weights[(n.name, X)] = w
        if bad is not None:
            h = _separating_strategy(bad, groups, mids)
            theta = tuple(x / s for x, s in zip(bad[:-1], n.mid[:-1]))
            return NaReport(False, arbitrage=ArbitrageCertificate(n.name, theta, bad, h))
    return NaReport(True, martingale=weights)


def _interior_outside(cone: SolvencyCone, v: Vector, groups) -> Vector:
    """A relative-interior point of the slice near vertex ``v`` that is not in the hull."""
    tau = Fraction(1, 2)
    while True:
        p = tuple(a + tau * (s - a) for a, s in zip(v, cone.mid))
        out, _ = in_hull(p, groups)
        if not out.optimal:
            return p
        tau /= 2


def cross_check_equivalence(tree: ScenarioTree, enlarged: EnlargedTree) -> bool:
    return check_na2(tree).holds == check_na_frictionless(enlarged).holds


# ---------------------------------------------------------------------------
# consistent price systems

@dataclass
class PriceSystem:
    """Node probabilities ``q`` (root mass 1) and an adapted price process ``Z``."""

    q: dict[str, Fraction]
    Z: dict[str, Vector]
    strict: dict[str, bool]

    @property
    def is_strict(self) -> bool:
        return all(self.strict.values())

    def path_weights(self, tree: ScenarioTree) -> dict[str, Fraction]:
        return {n.name: self.q[n.name] for n in tree.terminals() if n.name in self.q}

    def equivalent(self, tree: ScenarioTree) -> bool:
        """Every reachable node carries positive mass."""
        return all(self.q.get(n.name, 0) > 0 for n in tree.reachable_nodes())

    def verify(self, tree: ScenarioTree) -> bool:
        if self.q.get(tree.root.name) != 1:
            return False
        for n in tree.nodes:
            if self.q.get(n.name, 0) == 0:
                continue
            if not tree.reachable[n.index]:
                return False
            Z = self.Z[n.name]
            if Z[-1] != 1 or not n.cone.in_slice(Z):
                return False
            if self.strict[n.name] != n.cone.in_slice_relint(Z):
                return False
            if n.children:
                mass = sum((self.q.get(tree[c].name, 0) for c in n.children), Fraction(0))
                if mass != self.q[n.name]:
                    return False
                for i in range(tree.d):
                    m = sum((self.q.get(tree[c].name, 0) * self.Z[tree[c].name][i]
                             for c in n.children if self.q.get(tree[c].name, 0)), Fraction(0))
                    if m != self.q[n.name] * Z[i]:
                        return False
        return True


def _shrunk(cone: SolvencyCone, delta: Fraction) -> tuple[Vector, ...]:
    return tuple(tuple(a + delta * (s - a) for a, s in zip(v, cone.mid)) for v in cone.vertices)


def _continue(tree: ScenarioTree, node: Node, Z: Vector, delta: Fraction):
    """Split ``Z`` into child prices from slices shrunk by ``delta`` towards the
    mids, keeping the smallest child mass as large as possible and then staying
    as close as possible to the child mids.  Returns ``(masses, prices)`` or None."""
    kids = tree.support(node)
    groups = [_shrunk(tree[c].cone, delta) if delta else tree[c].cone.vertices for c in kids]
    lp, lam, s = _mixture_program(Z, groups, floor="group")
    out = solve(lp)
    if not out.optimal:
        return None
    smin = out.value
    # second stage: masses pinned at or above the best floor, minimise |y - q S|_1
    lp2 = LinearProgram("min")
    lam2 = [[lp2.add_var("nonneg") for _ in g] for g in groups]
    for i in range(tree.d):
        lp2.add_row({lam2[g][k]: w[i] for g, pts in enumerate(groups) for k, w in enumerate(pts)}, "==", Z[i])
    for g, pts in enumerate(groups):
        lp2.add_row({j: 1 for j in lam2[g]}, ">=", smin)
        S = tree[kids[g]].mid
        for i in range(tree.d - 1):
            dev = lp2.add_var("nonneg", 1)
            expr = {lam2[g][k]: w[i] - S[i] for k, w in enumerate(pts)}
            lp2.add_row({**expr, dev: 1}, ">=", 0)
            lp2.add_row({**{j: -a for j, a in expr.items()}, dev: 1}, ">=", 0)
    out2 = solve(lp2)
    masses, prices = {}, {}
    for g, pts in enumerate(groups):
        q = sum((out2.x[j] for j in lam2[g]), Fraction(0))
        masses[kids[g]] = q
        if q:
            y = [sum((out2.x[lam2[g][k]] * w[i] for k, w in enumerate(pts)), Fraction(0)) for i in range(tree.d)]
            prices[kids[g]] = tuple(a / q for a in y)
    return smin, masses, prices


def find_scps(tree: ScenarioTree, *, max_halvings: int = 40) -> PriceSystem | None:
    """A consistent price system supported on the reachable nodes, strictly
    interior wherever the data allow.  ``None`` iff some reachable slice vertex
    cannot be split into child prices, i.e. iff NA2 fails."""
    for n in tree.reachable_nodes():
        if n.children:
            ok, _, _ = check_na2_at(tree, n)
            if not ok:
                return None
    q = {tree.root.name: Fraction(1)}
    Z = {tree.root.name: tree.root.mid}
    for n in tree.nodes:
        if n.name not in q or not q[n.name] or not n.children:
            continue
        res = None
        delta = Fraction(1, 1000)
        for _ in range(max_halvings):
            res = _continue(tree, n, Z[n.name], delta)
            if res is not None and res[0] > 0:
                break
            delta /= 2
        else:
            res = _continue(tree, n, Z[n.name], Fraction(0))
        _, masses, prices = res
        for c, m in masses.items():
            q[tree[c].name] = q[n.name] * m
            if m:
                Z[tree[c].name] = prices[c]
    strict = {name: tree[name].cone.in_slice_relint(z) for name, z in Z.items()}
    q = {k: v for k, v in q.items() if v}
    return PriceSystem(q, {k: Z[k] for k in q}, {k: strict[k] for k in q})


__all__ = [
    "Na2Report", "NaReport", "ArbitrageCertificate", "PriceSystem", "check_na2", "check_na2_at",
    "check_na_frictionless", "cross_check_equivalence", "find_scps", "in_hull", "relint_margin",
]
