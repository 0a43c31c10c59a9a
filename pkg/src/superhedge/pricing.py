"""Super-hedging prices with static option positions.

Routes:

* :func:`price_primal` works on the base tree with transfers ``eta``;
* :func:`price_dual` maximises over consistent price systems;
* :func:`price_enlarged` trades the fictitious price ``X`` with holdings that
  depend only on the base node;
* :func:`superhedge.dp.backward_induction` runs the one-period recursion.

The cash unit ``1_d`` is the last basis vector (one unit of numeraire).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .cones import Vector, dot, vec
from .enlarged import EnlargedTree
from .errors import DimensionMismatch, GridMissingVertices, Infeasible, Unbounded, UnsupportedClaim
from .lp import LinearProgram, LpOutcome, solve
from .tree import ScenarioTree, is_admissible

ZERO = Fraction(0)


@dataclass(frozen=True)
class StaticOption:
    zeta: Mapping[int, Vector]  # terminal node index -> payoff vector
    c: Fraction


@dataclass(frozen=True)
class ClaimSpec:
    xi: Mapping[int, Vector]
    statics: tuple[StaticOption, ...] = ()

    @property
    def e(self) -> int:
        return len(self.statics)

    @classmethod
    def make(cls, tree: ScenarioTree, xi, statics=()) -> "ClaimSpec":
        """Accepts node names or indices as keys; missing terminals pay nothing."""
        def norm(m):
            out = {}
            for k, v in m.items():
                idx = tree.index_of(k) if isinstance(k, str) else k
                out[idx] = vec(v)
            return out

        st = tuple(StaticOption(norm(z), Fraction(c)) for z, c in statics)
        claim = cls(norm(xi), st)
        claim.validate(tree)
        return claim

    def validate(self, tree: ScenarioTree) -> None:
        terminals = {n.index for n in tree.terminals()}
        for label, m in [("xi", self.xi)] + [(f"zeta_{i + 1}", s.zeta) for i, s in enumerate(self.statics)]:
            for k, v in m.items():
                if k not in terminals:
                    raise UnsupportedClaim(f"{label} is defined at non-terminal node {tree[k].name!r}")
                if len(v) != tree.d:
                    raise DimensionMismatch(f"{label} at {tree[k].name!r} has length {len(v)}, expected {tree.d}")
        for i, s in enumerate(self.statics):
            if s.c < 0:
                raise UnsupportedClaim(f"static option {i + 1} has negative price bound {s.c}")
            if not any(any(v) for v in s.zeta.values()):
                raise UnsupportedClaim(f"static option {i + 1} pays zero everywhere")

    def payoff(self, idx: int, d: int) -> Vector:
        return self.xi.get(idx, (ZERO,) * d)

    def static_payoff(self, i: int, idx: int, d: int) -> Vector:
        return self.statics[i].zeta.get(idx, (ZERO,) * d)

    def drop_last(self) -> "ClaimSpec":
        return ClaimSpec(self.xi, self.statics[:-1])

    def shifted(self, a, d: int) -> "ClaimSpec":
        """Add ``a`` units of cash to every listed payoff (complete the claim first)."""
        a = Fraction(a)
        xi = {k: v[:-1] + (v[-1] + a,) for k, v in self.xi.items()}
        return ClaimSpec(xi, self.statics)


def complete_claim(tree: ScenarioTree, claim: ClaimSpec) -> ClaimSpec:
    """Claim with an explicit payoff at every terminal node."""
    xi = {n.index: claim.payoff(n.index, tree.d) for n in tree.terminals()}
    return ClaimSpec(xi, claim.statics)


# ---------------------------------------------------------------------------
# certificates

@dataclass
class HedgeCertificate:
    price: Fraction
    ell: tuple[Fraction, ...]
    eta: dict[int, Vector]
    H: dict[int, Vector] | None = None
    residuals: dict[int, tuple[Vector, bool]] = field(default_factory=dict)

    def residual(self, tree: ScenarioTree, claim: ClaimSpec, idx: int) -> Vector:
        d = tree.d
        cash = self.price - sum((abs(l) * s.c for l, s in zip(self.ell, claim.statics)), ZERO)
        r = [ZERO] * d
        r[-1] += cash
        for i, l in enumerate(self.ell):
            if l:
                z = claim.static_payoff(i, idx, d)
                for k in range(d):
                    r[k] += l * z[k]
        for n in tree.path(idx):
            e = self.eta.get(n.index)
            if e is not None:
                for k in range(d):
                    r[k] += e[k]
        xi = claim.payoff(idx, d)
        return tuple(a - b for a, b in zip(r, xi))

    def fill_residuals(self, tree: ScenarioTree, claim: ClaimSpec) -> "HedgeCertificate":
        self.residuals = {}
        for n in tree.terminals():
            if tree.reachable[n.index]:
                r = self.residual(tree, claim, n.index)
                self.residuals[n.index] = (r, n.cone.in_cone(r))
        return self

    def verify(self, tree: ScenarioTree, claim: ClaimSpec, price: Fraction | None = None) -> bool:
        """Independent re-evaluation: admissible transfers, solvent residual at
        every reachable terminal node, and (optionally) the declared price."""
        if price is not None and price != self.price:
            return False
        if len(self.ell) != claim.e:
            return False
        if not is_admissible(tree, self.eta):
            return False
        for n in tree.terminals():
            if tree.reachable[n.index] and not n.cone.in_cone(self.residual(tree, claim, n.index)):
                return False
        return True


# ---------------------------------------------------------------------------
# primal

def _primal_program(tree: ScenarioTree, claim: ClaimSpec, *, force: tuple[int, int] | None = None):
    """Variables and rows of the super-hedging program.

    With ``force=(i, s)`` the cost-free feasibility version used by the
    robustness check: ``y`` is dropped and ``ell_i = s`` is imposed.
    """
    d = tree.d
    lp = LinearProgram("min")
    y = None if force else lp.add_var("free", 1, "y")
    lplus, lminus = [], []
    for i, s in enumerate(claim.statics):
        lplus.append(lp.add_var("nonneg", 0 if force else s.c, f"l{i}+"))
        lminus.append(lp.add_var("nonneg", 0 if force else s.c, f"l{i}-"))
    eta = {}
    for n in tree.reachable_nodes():
        eta[n.index] = [lp.add_var("free", 0, f"eta[{n.name}]{k}") for k in range(d)]
        for v in n.cone.vertices:
            lp.add_row({eta[n.index][k]: v[k] for k in range(d)}, "<=", 0)
    for n in tree.reachable_nodes(tree.T):
        path = tree.path(n)
        for v in n.cone.vertices:
            row: dict[int, Fraction] = {}
            if y is not None:
                row[y] = v[-1]
            for i, s in enumerate(claim.statics):
                a = dot(claim.static_payoff(i, n.index, d), v)
                if force:
                    row[lplus[i]] = a - s.c * v[-1]
                    row[lminus[i]] = -a - s.c * v[-1]
                else:
                    row[lplus[i]] = a
                    row[lminus[i]] = -a
            for m in path:
                for k in range(d):
                    j = eta[m.index][k]
                    row[j] = row.get(j, ZERO) + v[k]
            lp.add_row(row, ">=", 0 if force else dot(claim.payoff(n.index, d), v))
    if force:
        i, s = force
        lp.add_row({lplus[i]: 1, lminus[i]: -1}, "==", s)
    return lp, y, lplus, lminus, eta


@dataclass
class PrimalResult:
    price: Fraction
    certificate: HedgeCertificate
    outcome: LpOutcome


def price_primal(tree: ScenarioTree, claim: ClaimSpec) -> PrimalResult:
    lp, y, lplus, lminus, eta = _primal_program(tree, claim)
    out = solve(lp)
    if out.status == "unbounded":
        raise Unbounded("super-hedging program is unbounded below: the market admits arbitrage", out.ray)
    if out.status == "infeasible":
        raise Infeasible("super-hedging program is infeasible", out.farkas)
    x = out.x
    ell = tuple(x[p] - x[m] for p, m in zip(lplus, lminus))
    etas = {k: tuple(x[j] for j in js) for k, js in eta.items()}
    price = out.value
    cert = HedgeCertificate(price, ell, etas).fill_residuals(tree, claim)
    return PrimalResult(price, cert, out)


# ---------------------------------------------------------------------------
# dual

@dataclass
class DualResult:
    price: Fraction
    q: dict[int, Fraction]
    Z: dict[int, Vector]
    strict: bool  # every charged node carries a relative-interior price
    outcome: LpOutcome


def price_dual(tree: ScenarioTree, claim: ClaimSpec) -> DualResult:
    """Maximise ``E^Q[xi . Z_T]`` over martingale pairs in the closed slices.

    Unknowns are ``y_n = q_n Z_n`` written as nonnegative combinations of the
    slice vertices at ``n``; martingality is ``sum_children y = y_n``.
    """
    d = tree.d
    lp = LinearProgram("max")
    lam: dict[int, list[int]] = {}
    for n in tree.reachable_nodes():
        lam[n.index] = [lp.add_var("nonneg", 0, f"lam[{n.name}]{k}") for k in range(len(n.cone.vertices))]

    def y_expr(idx: int, k: int) -> dict[int, Fraction]:
        return {j: v[k] for j, v in zip(lam[idx], tree[idx].cone.vertices) if v[k]}

    root = tree.root.index
    lp.add_row(y_expr(root, d - 1), "==", 1)
    for n in tree.reachable_nodes():
        if not n.children:
            continue
        kids = tree.support(n)
        for k in range(d):
            row = {j: -a for j, a in y_expr(n.index, k).items()}
            for c in kids:
                for j, a in y_expr(c, k).items():
                    row[j] = row.get(j, ZERO) + a
            lp.add_row(row, "==", 0)
    terminals = tree.reachable_nodes(tree.T)
    for n in terminals:
        xi = claim.payoff(n.index, d)
        for j, v in zip(lam[n.index], n.cone.vertices):
            lp.set_cost(j, dot(xi, v))
    for i, s in enumerate(claim.statics):
        row = {}
        for n in terminals:
            z = claim.static_payoff(i, n.index, d)
            for j, v in zip(lam[n.index], n.cone.vertices):
                a = dot(z, v)
                if a:
                    row[j] = a
        lp.add_row(row, "<=", s.c)
        lp.add_row(row, ">=", -s.c)
    out = solve(lp)
    if out.status == "infeasible":
        raise Infeasible("no consistent price system is compatible with the data", out.farkas)
    if out.status == "unbounded":  # pragma: no cover - the feasible set is bounded
        raise Unbounded("dual program unbounded", out.ray)
    q, Z = {}, {}
    strict = True
    for n in tree.reachable_nodes():
        yv = [sum((out.x[j] * v[k] for j, v in zip(lam[n.index], n.cone.vertices)), ZERO) for k in range(d)]
        if yv[-1]:
            q[n.index] = yv[-1]
            Z[n.index] = tuple(a / yv[-1] for a in yv)
            strict = strict and n.cone.in_slice_relint(Z[n.index])
    return DualResult(out.value, q, Z, strict, out)


# ---------------------------------------------------------------------------
# enlarged frictionless market

@dataclass
class EnlargedResult:
    price: Fraction
    ell: tuple[Fraction, ...]
    H: dict[int, Vector]  # holding chosen at a node for the next period, last entry 0
    outcome: LpOutcome


def price_enlarged(enlarged: EnlargedTree, claim: ClaimSpec, *, method: str = "epigraph") -> EnlargedResult:
    """``inf y + sum c|l|`` with ``y + (H o X)_T >= <xi - sum l zeta, X_T>`` on every
    reachable enlarged path.

    ``H`` only sees the base node, so on each base path the worst theta can be
    chosen node by node.  ``method="epigraph"`` exploits this with one bound
    ``u_n <= a_n . X`` per grid point; ``method="paths"`` writes one row per
    enlarged path and is kept as a cross-check for small trees.
    """
    tree = enlarged.tree
    if not enlarged.is_vertex_complete:
        raise GridMissingVertices("enlarged pricing needs every slice vertex on the grid")
    d = tree.d
    lp = LinearProgram("min")
    y = lp.add_var("free", 1, "y")
    lplus = [lp.add_var("nonneg", s.c, f"l{i}+") for i, s in enumerate(claim.statics)]
    lminus = [lp.add_var("nonneg", s.c, f"l{i}-") for i, s in enumerate(claim.statics)]
    H = {n.index: [lp.add_var("free", 0, f"H[{n.name}]{k}") for k in range(d - 1)]
         for n in tree.reachable_nodes() if n.children}

    def coeff(n, X) -> dict[int, Fraction]:
        """Linear form in the unknowns of the term ``a_n . X`` contributed by node ``n``."""
        row: dict[int, Fraction] = {}
        if n.parent is not None:
            for k in range(d - 1):
                row[H[n.parent][k]] = row.get(H[n.parent][k], ZERO) + X[k]
        if n.children:
            for k in range(d - 1):
                row[H[n.index][k]] = row.get(H[n.index][k], ZERO) - X[k]
        else:
            for i in range(claim.e):
                a = dot(claim.static_payoff(i, n.index, d), X)
                row[lplus[i]] = row.get(lplus[i], ZERO) + a
                row[lminus[i]] = row.get(lminus[i], ZERO) - a
        return row

    def const(n, X) -> Fraction:
        return -dot(claim.payoff(n.index, d), X) if not n.children else ZERO

    if method == "epigraph":
        u = {}
        for n in tree.reachable_nodes():
            u[n.index] = lp.add_var("free", 0, f"u[{n.name}]")
            for X in enlarged.prices(n):
                row = {j: -a for j, a in coeff(n, X).items()}
                row[u[n.index]] = row.get(u[n.index], ZERO) + 1
                lp.add_row(row, "<=", const(n, X))
        for n in tree.reachable_nodes(tree.T):
            row = {y: Fraction(1)}
            for m in tree.path(n):
                row[u[m.index]] = Fraction(1)
            lp.add_row(row, ">=", 0)
    elif method == "paths":
        for n in tree.reachable_nodes(tree.T):
            path = tree.path(n)
            for Xs in itertools.product(*(enlarged.prices(m) for m in path)):
                row = {y: Fraction(1)}
                rhs = ZERO
                for m, X in zip(path, Xs):
                    for j, a in coeff(m, X).items():
                        row[j] = row.get(j, ZERO) + a
                    rhs -= const(m, X)
                lp.add_row(row, ">=", rhs)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = solve(lp)
    if out.status == "unbounded":
        raise Unbounded("enlarged super-hedging program is unbounded: the market admits arbitrage", out.ray)
    if out.status == "infeasible":  # pragma: no cover
        raise Infeasible("enlarged program infeasible", out.farkas)
    x = out.x
    ell = tuple(x[p] - x[m] for p, m in zip(lplus, lminus))
    Hv = {k: tuple(x[j] for j in js) + (ZERO,) for k, js in H.items()}
    return EnlargedResult(out.value, ell, Hv, out)


def eta_from_H(enlarged: EnlargedTree, H: Mapping[int, Sequence]) -> dict[int, Vector]:
    """Base-market transfers replicating the enlarged strategy ``H``.

    Risky legs are the rebalancing ``H_{t+1}(n) - H_t(parent)``; the cash leg
    pays for them at the worst grid price.  Terminal nodes transfer nothing.
    """
    tree = enlarged.tree
    d = tree.d
    zero = (ZERO,) * d
    eta = {}
    for n in tree.nodes:
        if not n.children:
            eta[n.index] = zero
            continue
        h_new = vec(H.get(n.index, zero))
        h_old = vec(H.get(n.parent, zero)) if n.parent is not None else zero
        risky = tuple(a - b for a, b in zip(h_new[:-1], h_old[:-1]))
        cash = min(-sum((a * X[k] for k, a in enumerate(risky)), ZERO) for X in enlarged.prices(n))
        eta[n.index] = risky + (cash,)
    return eta


def certificate_from_H(enlarged: EnlargedTree, claim: ClaimSpec, price, ell, H) -> HedgeCertificate:
    eta = eta_from_H(enlarged, H)
    return HedgeCertificate(Fraction(price), tuple(ell), eta, dict(H)).fill_residuals(enlarged.tree, claim)


# ---------------------------------------------------------------------------
# robustness of the static positions

def robustness_check(tree: ScenarioTree, claim: ClaimSpec) -> bool:
    """True iff no nonzero static position can be carried at zero cost into a
    solvent terminal position; checked for each option and sign."""
    if claim.e == 0:
        raise UnsupportedClaim("robustness check needs at least one static option")
    for i in range(claim.e):
        for s in (1, -1):
            lp, *_ = _primal_program(tree, claim, force=(i, s))
            if solve(lp).status != "infeasible":
                return False
    return True


__all__ = [
    "StaticOption", "ClaimSpec", "HedgeCertificate", "PrimalResult", "DualResult", "EnlargedResult",
    "price_primal", "price_dual", "price_enlarged", "eta_from_H", "certificate_from_H",
    "robustness_check", "complete_claim",
]
