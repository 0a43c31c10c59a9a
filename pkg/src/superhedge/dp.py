"""Backward induction on the randomised market.

At a node ``n`` the value ``g_n(x)`` is the best expected payoff over one-step
martingale splits of ``x`` into child prices, where child values are already
known.  Each ``g_n`` is concave and piecewise linear on the slice at ``n``, so it
is stored exactly as the finite generating set of its hypograph:
points ``(x_k, g_k)`` with ``g_n = `` upper concave envelope of the points.

A terminal node contributes the points ``(v, xi . v)`` over slice vertices.  An
internal node takes the union of its children's points, forms the envelope,
and clips it to its own slice; the clipping is an exact double description
step done with cddlib.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import cdd

from .cones import SolvencyCone, Vector, dot
from .enlarged import EnlargedTree
from .errors import NAViolated, UnsupportedClaim
from .lp import LinearProgram, solve
from .pricing import ClaimSpec, HedgeCertificate, certificate_from_H

Point = tuple[Vector, Fraction]  # (price x with x^d = 1, value)


@dataclass
class ValueFunction:
    points: dict[int, list[Point]]
    grid_values: dict[tuple[int, Vector], Fraction] = field(default_factory=dict)

    def g(self, node: int, X: Vector) -> Fraction:
        """Exact value at ``X`` via the one-period program over generating points."""
        return envelope_value(self.points[node], X)

    def g_prime(self, node: int, h: Vector) -> Fraction:
        """``max_x g(x) - h.x`` over the slice; attained at a generating point."""
        return max(v - dot(h, x) for x, v in self.points[node])


def envelope_value(points: list[Point], X: Vector) -> Fraction | None:
    """``max sum w_k g_k`` over weights with ``sum w_k x_k = X``; None if X is not a mixture."""
    lp = LinearProgram("max")
    w = [lp.add_var("nonneg", v) for _, v in points]
    for i in range(len(X)):
        lp.add_row({w[k]: x[i] for k, (x, _) in enumerate(points)}, "==", X[i])
    out = solve(lp)
    return out.value if out.optimal else None


def _clip(points: list[Point], cone: SolvencyCone) -> list[Point]:
    """Generating points of the hypograph of the envelope of ``points``
    restricted to the slice of ``cone``."""
    k = cone.d - 1
    rows = [[1] + list(x[:-1]) + [v] for x, v in points]
    rows.append([0] * (k + 1) + [-1])
    gen = cdd.Matrix(rows, number_type="fraction")
    gen.rep_type = cdd.RepType.GENERATOR
    hrep = cdd.Polyhedron(gen).get_inequalities()
    ineq_rows = [list(hrep[r]) for r in range(hrep.row_size)]
    lin = set(hrep.lin_set)
    ineqs, eqs = cone.slice_facets
    for b, a in ineqs:
        ineq_rows.append([b] + list(a) + [0])
    for b, a in eqs:
        lin.add(len(ineq_rows))
        ineq_rows.append([b] + list(a) + [0])
    mat = cdd.Matrix(ineq_rows, number_type="fraction")
    mat.rep_type = cdd.RepType.INEQUALITY
    mat.lin_set = frozenset(lin)
    gens = cdd.Polyhedron(mat).get_generators()
    out = []
    for r in range(gens.row_size):
        row = [Fraction(a) for a in gens[r]]
        if row[0] == 0:
            continue
        x = tuple(row[1:k + 1]) + (Fraction(1),)
        out.append((x, row[k + 1]))
    out.sort()
    return out


def _selector(child_points: list[Point], cone: SolvencyCone, h: Vector) -> tuple[Vector, Fraction]:
    """One-step hedge: ``min a + b`` with ``a >= g - h'.x`` over child points and
    ``b >= (h' - h).v`` over slice vertices.  Returns ``(h', value)``."""
    k = cone.d - 1
    lp = LinearProgram("min")
    a = lp.add_var("free", 1, "a")
    b = lp.add_var("free", 1, "b")
    hv = [lp.add_var("free", 0, f"h{i}") for i in range(k)]
    for x, g in child_points:
        lp.add_row({a: 1, **{hv[i]: x[i] for i in range(k)}}, ">=", g)
    for v in cone.vertices:
        lp.add_row({b: 1, **{hv[i]: -v[i] for i in range(k)}}, ">=", -sum((h[i] * v[i] for i in range(k)), Fraction(0)))
    out = solve(lp)
    return tuple(out.x[j] for j in hv) + (Fraction(0),), out.value


@dataclass
class DpResult:
    price: Fraction
    values: ValueFunction
    H: dict[int, Vector]
    certificate: HedgeCertificate


def backward_induction(enlarged: EnlargedTree, claim: ClaimSpec, *, grid_values: bool = False) -> DpResult:
    if claim.e:
        raise UnsupportedClaim("backward induction covers claims without static options")
    tree = enlarged.tree
    d = tree.d
    points: dict[int, list[Point]] = {}
    for n in reversed(tree.reachable_nodes()):
        if not n.children:
            xi = claim.payoff(n.index, d)
            points[n.index] = sorted((v, dot(xi, v)) for v in n.cone.vertices)
            continue
        pool = [p for c in tree.support(n) for p in points[c]]
        for v in n.cone.vertices:
            if envelope_value(pool, v) is None:
                raise NAViolated(f"slice vertex {tuple(map(str, v))} at {n.name!r} is not a one-step martingale split",
                                 node=n.name)
        points[n.index] = _clip(pool, n.cone)
    values = ValueFunction(points)
    if grid_values:
        for n in tree.reachable_nodes():
            for X in enlarged.prices(n):
                values.grid_values[(n.index, X)] = values.g(n.index, X)
    price = max(v for _, v in points[tree.root.index])

    # forward pass: hedge ratios from the one-step selector
    zero = (Fraction(0),) * d
    H: dict[int, Vector] = {}
    for n in tree.reachable_nodes():
        if not n.children:
            continue
        h_in = H[n.parent] if n.parent is not None else zero
        pool = [p for c in tree.support(n) for p in points[c]]
        h_out, val = _selector(pool, n.cone, h_in)
        expected = values.g_prime(n.index, h_in)
        if val != expected:  # pragma: no cover - minimax identity
            raise ArithmeticError(f"selector value {val} differs from g' = {expected} at {n.name!r}")
        H[n.index] = h_out
    cert = certificate_from_H(enlarged, claim, price, (), H)
    return DpResult(price, values, H, cert)


__all__ = ["ValueFunction", "DpResult", "backward_induction", "envelope_value"]
