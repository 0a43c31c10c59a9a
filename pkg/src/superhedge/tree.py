"""Finite scenario trees with a finite family of transition kernels per node."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .cones import SolvencyCone, Vector, vec
from .errors import DimensionMismatch, TreeError
from .lp import as_fraction


@dataclass(frozen=True)
class Node:
    index: int
    name: str
    parent: int | None
    t: int
    children: tuple[int, ...]
    cone: SolvencyCone
    kernels: tuple[tuple[Fraction, ...], ...]  # one weight per child, per kernel

    @property
    def mid(self) -> Vector:
        return self.cone.mid

    @property
    def is_terminal(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class NodeRecord:
    """Loose description used to assemble a tree; kernels map child names to weights."""

    name: str
    parent: str | None
    cone: SolvencyCone
    kernels: tuple[Mapping[str, object], ...] = ()


class ScenarioTree:
    """Immutable event tree.  Nodes are indexed in breadth-first order, root first."""

    def __init__(self, T: int, d: int, nodes: Sequence[Node]):
        self.T = T
        self.d = d
        self.nodes = tuple(nodes)
        self._by_name = {n.name: n.index for n in self.nodes}
        self._validate()

    # construction ----------------------------------------------------------

    @classmethod
    def from_records(cls, T: int, d: int, records: Iterable[NodeRecord]) -> "ScenarioTree":
        records = list(records)
        by_name: dict[str, NodeRecord] = {}
        for r in records:
            if r.name in by_name:
                raise TreeError(f"duplicate node name {r.name!r}")
            by_name[r.name] = r
        roots = [r for r in records if r.parent is None]
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root, found {len(roots)}")
        kids: dict[str, list[str]] = {r.name: [] for r in records}
        for r in records:
            if r.parent is not None:
                if r.parent not in by_name:
                    raise TreeError(f"node {r.name!r} has unknown parent {r.parent!r}")
                kids[r.parent].append(r.name)
        order: list[tuple[str, int]] = []
        frontier = [(roots[0].name, 0)]
        while frontier:
            order.extend(frontier)
            frontier = [(c, t + 1) for name, t in frontier for c in kids[name]]
        if len(order) != len(records):
            raise TreeError("node list contains a cycle or disconnected nodes")
        index = {name: k for k, (name, _) in enumerate(order)}
        nodes = []
        for name, t in order:
            r = by_name[name]
            children = tuple(index[c] for c in kids[name])
            kernels = []
            for k, ker in enumerate(r.kernels):
                unknown = set(ker) - set(kids[name])
                if unknown:
                    raise TreeError(f"node {name!r} kernel {k} charges non-children {sorted(unknown)}")
                kernels.append(tuple(as_fraction(ker.get(c, 0)) for c in kids[name]))
            parent = None if r.parent is None else index[r.parent]
            nodes.append(Node(index[name], name, parent, t, children, r.cone, tuple(kernels)))
        return cls(T, d, nodes)

    def _validate(self) -> None:
        if self.T < 1:
            raise TreeError(f"horizon must be at least 1, got {self.T}")
        for n in self.nodes:
            if n.cone.d != self.d:
                raise DimensionMismatch(f"node {n.name!r} has a cone in dimension {n.cone.d}, expected {self.d}")
            if n.t > self.T:
                raise TreeError(f"node {n.name!r} lies beyond the horizon")
            if n.t < self.T:
                if not n.children:
                    raise TreeError(f"node {n.name!r} at t={n.t} < T has no children")
                if not n.kernels:
                    raise TreeError(f"node {n.name!r} has no transition kernel")
            elif n.children:
                raise TreeError(f"terminal node {n.name!r} has children")
            for k, ker in enumerate(n.kernels):
                if len(ker) != len(n.children):
                    raise TreeError(f"node {n.name!r} kernel {k} has the wrong length")
                if any(p < 0 for p in ker):
                    raise TreeError(f"node {n.name!r} kernel {k} has a negative weight")
                if sum(ker) != 1:
                    raise TreeError(f"node {n.name!r} kernel {k} sums to {sum(ker)}, not 1")

    # navigation ------------------------------------------------------------

    @property
    def root(self) -> Node:
        return self.nodes[0]

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[Node]:
        return iter(self.nodes)

    def __getitem__(self, key: int | str) -> Node:
        if isinstance(key, str):
            return self.nodes[self._by_name[key]]
        return self.nodes[key]

    def index_of(self, name: str) -> int:
        return self._by_name[name]

    def at(self, t: int) -> list[Node]:
        return [n for n in self.nodes if n.t == t]

    def terminals(self) -> list[Node]:
        return self.at(self.T)

    def path(self, node: Node | int) -> list[Node]:
        """Root-to-node list of nodes."""
        n = self.nodes[node] if isinstance(node, int) else node
        out = [n]
        while n.parent is not None:
            n = self.nodes[n.parent]
            out.append(n)
        return out[::-1]

    @cached_property
    def spread(self) -> Fraction:
        return max(n.cone.spread for n in self.nodes)

    # quasi-sure machinery --------------------------------------------------

    @cached_property
    def reachable(self) -> tuple[bool, ...]:
        return polar_mask(self)

    def support(self, node: Node) -> list[int]:
        """Children charged by at least one kernel of ``node``."""
        return [c for k, c in enumerate(node.children) if any(ker[k] > 0 for ker in node.kernels)]

    def reachable_nodes(self, t: int | None = None) -> list[Node]:
        mask = self.reachable
        return [n for n in self.nodes if mask[n.index] and (t is None or n.t == t)]

    def kernel_selections(self) -> Iterator[dict[int, int]]:
        """Every choice of one kernel per internal node (exponential; for tests)."""
        internal = [n for n in self.nodes if n.children]
        for choice in itertools.product(*(range(len(n.kernels)) for n in internal)):
            yield {n.index: k for n, k in zip(internal, choice)}

    def with_cone(self, index: int, cone: SolvencyCone) -> "ScenarioTree":
        nodes = list(self.nodes)
        n = nodes[index]
        nodes[index] = Node(n.index, n.name, n.parent, n.t, n.children, cone, n.kernels)
        return ScenarioTree(self.T, self.d, nodes)

    def with_kernels(self, index: int, kernels) -> "ScenarioTree":
        nodes = list(self.nodes)
        n = nodes[index]
        ks = tuple(tuple(as_fraction(p) for p in k) for k in kernels)
        nodes[index] = Node(n.index, n.name, n.parent, n.t, n.children, n.cone, ks)
        return ScenarioTree(self.T, self.d, nodes)


def polar_mask(tree: ScenarioTree) -> tuple[bool, ...]:
    """Per node: True iff it is charged with positive probability by some model."""
    mask = [False] * len(tree.nodes)
    mask[0] = True
    for n in tree.nodes:  # breadth-first, parents first
        if not mask[n.index]:
            continue
        for k, c in enumerate(n.children):
            if any(ker[k] > 0 for ker in n.kernels):
                mask[c] = True
    return tuple(mask)


def holds_qs(tree: ScenarioTree, predicate) -> bool:
    """``predicate(node)`` at every reachable node."""
    return all(predicate(n) for n in tree.reachable_nodes())


def is_admissible(tree: ScenarioTree, eta: Mapping[int, Sequence] | Sequence[Sequence]) -> bool:
    """Transfers ``eta`` (indexed by node) lie in ``-K_t`` at every reachable node."""
    get = eta.get if isinstance(eta, Mapping) else (lambda k: eta[k])
    if not isinstance(eta, Mapping) and len(eta) != len(tree.nodes):
        raise DimensionMismatch(f"eta has {len(eta)} entries for {len(tree.nodes)} nodes")
    for n in tree.nodes:
        x = get(n.index)
        if x is None:
            continue
        x = vec(x)
        if len(x) != tree.d:
            raise DimensionMismatch(f"eta at {n.name!r} has length {len(x)}, expected {tree.d}")
        if tree.reachable[n.index] and not n.cone.in_minus_cone(x):
            return False
    return True


__all__ = ["Node", "NodeRecord", "ScenarioTree", "polar_mask", "is_admissible", "holds_qs"]
