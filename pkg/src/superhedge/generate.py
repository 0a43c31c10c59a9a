"""Deterministic random market instances."""

from __future__ import annotations

import random
from fractions import Fraction

from .arbitrage import in_hull
from .cones import SolvencyCone
from .specfile import MarketSpec, NodeSpec

MOVES = [Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1), Fraction(4, 3), Fraction(3, 2), Fraction(2)]
LOWER = [Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(4, 5)]
UPPER = [Fraction(5, 4), Fraction(4, 3), Fraction(3, 2), Fraction(2)]
SPREADS = [Fraction(5, 4), Fraction(4, 3), Fraction(3, 2), Fraction(2)]
STATIC_PRICES = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)]


def _box(n: NodeSpec) -> tuple[tuple[Fraction, Fraction], ...]:
    if n.intervals is not None:
        return n.intervals
    return tuple((s / n.spread, s * n.spread) for s in n.mid[:-1])


def _slice_vertices(n: NodeSpec):
    return SolvencyCone.from_box(n.mid, _box(n)).vertices


def _kernels(rng: random.Random, children: list[str], count: int) -> tuple[dict[str, Fraction], ...]:
    out = []
    for _ in range(count):
        while True:
            w = [rng.choice([0, 1, 1, 2, 3]) for _ in children]
            if sum(w):
                break
        total = sum(w)
        out.append({c: Fraction(a, total) for c, a in zip(children, w)})
    return tuple(out)


def _charged(n: NodeSpec) -> list[str]:
    return sorted({c for ker in n.kernels for c, p in ker.items() if p > 0})


def generate(seed: int, T: int = 2, d: int = 2, branching: int = 2, kernels: int = 2,
             na2: str = "yes", statics: int = 0) -> MarketSpec:
    """Random box-shaped market with its claim.

    ``na2="yes"`` repairs every node whose slice is not covered by its charged
    children by widening one child's box; ``"no"`` plants a violation at one
    reachable node by lifting all its charged children above the parent's ask
    on the first asset; ``"any"`` leaves the sample as drawn.
    """
    if not (1 <= T <= 4 and 2 <= d <= 4 and 1 <= branching <= 4 and kernels >= 1):
        raise ValueError("need 1 <= T <= 4, 2 <= d <= 4, 1 <= branching <= 4, kernels >= 1")
    if na2 not in ("yes", "no", "any"):
        raise ValueError(f"na2 must be yes, no or any, got {na2!r}")
    rng = random.Random(f"superhedge:{seed}:{T}:{d}:{branching}:{kernels}:{na2}:{statics}")

    def draw_node(name, parent, mid):
        if rng.random() < 0.3:
            return NodeSpec(name, parent, mid, spread=rng.choice(SPREADS))
        iv = tuple((s * rng.choice(LOWER), s * rng.choice(UPPER)) for s in mid[:-1])
        return NodeSpec(name, parent, mid, intervals=iv)

    root_mid = tuple(Fraction(rng.randint(2, 8), 4) for _ in range(d - 1)) + (Fraction(1),)
    nodes: dict[str, NodeSpec] = {"r": draw_node("r", None, root_mid)}
    order = ["r"]
    frontier = ["r"]
    for t in range(T):
        nxt = []
        for name in frontier:
            parent = nodes[name]
            k = 1 if branching == 1 else rng.randint(2, branching)
            kids = [f"{name}.{j}" for j in range(k)]
            for c in kids:
                mid = tuple(s * rng.choice(MOVES) for s in parent.mid[:-1]) + (Fraction(1),)
                nodes[c] = draw_node(c, name, mid)
            parent.kernels = _kernels(rng, kids, rng.randint(1, kernels))
            if na2 == "yes":
                _repair(rng, parent, [nodes[c] for c in _charged(parent)])
            order.extend(kids)
            nxt.extend(kids)
        frontier = nxt

    meta = {"generator": {"seed": seed, "T": T, "d": d, "branching": branching,
                          "kernels": kernels, "na2": na2, "statics": statics}}
    if na2 == "no":
        reach = _reachable(nodes, order)
        internal = [n for n in order if nodes[n].kernels and n in reach]
        target = rng.choice(internal)
        _plant(nodes[target], [nodes[c] for c in _charged(nodes[target])])
        meta["planted_violation"] = target

    terminals = [n for n in order if not nodes[n].kernels]
    xi = {n: tuple(Fraction(rng.randint(-2, 3)) for _ in range(d)) for n in terminals}
    st = []
    for _ in range(statics):
        while True:
            z = {n: tuple(Fraction(rng.randint(-1, 2)) for _ in range(d)) for n in terminals}
            if any(any(v) for v in z.values()):
                break
        st.append((z, rng.choice(STATIC_PRICES)))
    return MarketSpec(T, d, [nodes[n] for n in order], xi, st, meta)


def _reachable(nodes, order) -> set[str]:
    out = {"r"}
    for n in order:
        if n in out:
            out.update(_charged(nodes[n]))
    return out


def _repair(rng: random.Random, parent: NodeSpec, kids: list[NodeSpec]) -> None:
    groups = [_slice_vertices(c) for c in kids]
    if all(in_hull(v, groups)[0].optimal for v in _slice_vertices(parent)):
        return
    child = rng.choice(kids)
    pb, cb = _box(parent), _box(child)
    child.intervals = tuple((min(a, c), max(b, e)) for (a, b), (c, e) in zip(pb, cb))
    child.spread = None


def _plant(parent: NodeSpec, kids: list[NodeSpec]) -> None:
    hi = _box(parent)[0][1]
    for child in kids:
        box = _box(child)
        lo = box[0][0]
        if lo > hi:
            continue
        f = hi / lo * Fraction(5, 4)
        child.mid = (child.mid[0] * f,) + child.mid[1:]
        child.intervals = ((box[0][0] * f, box[0][1] * f),) + box[1:]
        child.spread = None


__all__ = ["generate"]
