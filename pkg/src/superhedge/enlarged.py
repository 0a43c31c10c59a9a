"""Randomised market: a finite grid of theta values per node and the
fictitious frictionless price ``X = Pi(S * theta)`` it induces.

The enlarged model quantifies over every theta path, so "for all models of
the enlarged family" reduces to "for all grid points at every reachable node".
Nothing is enumerated per path except in explicit path routines.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import itertools

from .cones import Vector, dot, vec
from .errors import DimensionMismatch, EmptyInteriorGrid, GridMissingVertices
from .tree import Node, ScenarioTree


def axis_grid(c: Fraction, resolution: int) -> list[Fraction]:
    """``resolution`` points on ``[1/c, c]`` containing ``1/c``, ``1`` and ``c``.

    Points are spaced evenly on ``[1/c, 1]`` and on ``[1, c]`` separately so the
    mid price always sits on the grid.
    """
    if resolution < 2:
        raise ValueError(f"grid resolution must be at least 2, got {resolution}")
    if c == 1:
        return [Fraction(1)]
    extra = max(resolution - 3, 0)
    below = extra // 2
    above = extra - below
    lo, hi = 1 / c, c
    pts = {Fraction(1), lo, hi}
    pts.update(lo + (1 - lo) * k / (below + 1) for k in range(1, below + 1))
    pts.update(1 + (hi - 1) * k / (above + 1) for k in range(1, above + 1))
    return sorted(pts)


@dataclass(frozen=True)
class EnlargedNode:
    base: int
    theta: Vector
    X: Vector
    interior: bool


@dataclass(frozen=True)
class ThetaGrid:
    """Grid points of one base node and the distinct prices they produce."""

    node: int
    points: tuple[EnlargedNode, ...]

    @property
    def prices(self) -> tuple[Vector, ...]:
        """Distinct values of ``X`` over the grid, in first-seen order."""
        return tuple(dict.fromkeys(p.X for p in self.points))

    @property
    def interior_prices(self) -> tuple[Vector, ...]:
        return tuple(dict.fromkeys(p.X for p in self.points if p.interior))


class EnlargedTree:
    def __init__(self, tree: ScenarioTree, resolution: int, grids: Sequence[ThetaGrid], c: Fraction):
        self.tree = tree
        self.resolution = resolution
        self.grids = tuple(grids)
        self.c = c

    def grid(self, node: Node | int) -> ThetaGrid:
        return self.grids[node if isinstance(node, int) else node.index]

    def prices(self, node: Node | int) -> tuple[Vector, ...]:
        return self.grid(node).prices

    def interior_prices(self, node: Node | int) -> tuple[Vector, ...]:
        return self.grid(node).interior_prices

    def vertex_complete(self, node: Node | int) -> bool:
        n = self.tree[node] if isinstance(node, int) else node
        have = set(self.prices(n))
        return all(v in have for v in n.cone.vertices)

    @property
    def is_vertex_complete(self) -> bool:
        return all(self.vertex_complete(n) for n in self.tree.reachable_nodes())

    def count(self) -> int:
        return sum(len(g.points) for g in self.grids)


def build_enlarged(tree: ScenarioTree, grid_resolution: int = 3, *, vertex_preimages: bool = True) -> EnlargedTree:
    """Attach a theta grid to every node of ``tree``.

    The per-axis grid spans ``[1/c, c]`` for the largest spread ``c`` in the
    tree.  With ``vertex_preimages`` each node also receives ``theta = v / S``
    for the slice vertices ``v`` so that every extreme dual point is hit.
    """
    c = tree.spread
    base_axis = axis_grid(c, grid_resolution)
    grids = []
    for n in tree.nodes:
        K, S = n.cone, n.mid
        k = tree.d - 1
        axes = [set(base_axis) for _ in range(k)]
        extra: list[Vector] = []
        if vertex_preimages:
            if K.box is not None:
                for i, (lo, hi) in enumerate(K.box):
                    axes[i].update((lo / S[i], hi / S[i]))
            else:
                extra = [tuple(v[i] / S[i] for i in range(k)) for v in K.vertices]
        thetas = list(itertools.product(*(sorted(a) for a in axes)))
        seen = set(thetas)
        thetas.extend(t for t in extra if t not in seen)
        pts = []
        for th in thetas:
            X = K.project_to_slice(tuple(s * a for s, a in zip(S, th)) + (Fraction(1),))
            pts.append(EnlargedNode(n.index, tuple(th), X, K.in_slice_relint(X)))
        grid = ThetaGrid(n.index, tuple(pts))
        if tree.reachable[n.index] and not grid.interior_prices:
            raise EmptyInteriorGrid(f"no interior grid point at node {n.name!r}")
        grids.append(grid)
    return EnlargedTree(tree, grid_resolution, grids, c)


def check_theorem_main(tree: ScenarioTree, grid: EnlargedTree, zeta: Mapping[int, Sequence] | Sequence) -> tuple[bool, bool]:
    """Both sides of the cone/fictitious-price equivalence for an adapted ``zeta``.

    Left: ``zeta in -K`` at every reachable node.  Right: ``<zeta, X> <= 0`` at
    every reachable enlarged node.
    """
    get = zeta.get if isinstance(zeta, Mapping) else (lambda k: zeta[k])
    left = right = True
    for n in tree.reachable_nodes():
        z = get(n.index)
        if z is None:
            continue
        z = vec(z)
        if len(z) != tree.d:
            raise DimensionMismatch(f"zeta at {n.name!r} has length {len(z)}")
        if not grid.vertex_complete(n):
            raise GridMissingVertices(f"grid at {n.name!r} misses slice vertices")
        left = left and n.cone.in_minus_cone(z)
        right = right and all(dot(z, X) <= 0 for X in grid.prices(n))
    return left, right


__all__ = ["axis_grid", "EnlargedNode", "ThetaGrid", "EnlargedTree", "build_enlarged", "check_theorem_main"]
