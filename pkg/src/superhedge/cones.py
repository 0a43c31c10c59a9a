"""Solvency cones described through the vertices of their normalised dual slice.

A cone ``K`` is never stored directly.  We keep the finite vertex list ``V``
of ``K^{*,0} = {y in K^* : y^d = 1}`` and test everything through inner
products: ``x in K`` iff ``<x, v> >= 0`` for every ``v in V``.

Two shapes are supported.  Box slices ``prod [lo_i, hi_i] x {1}`` come from
bid/ask data and are what the file format produces.  Arbitrary vertex lists
are accepted through :meth:`SolvencyCone.from_vertices`; their facets are
computed exactly with cddlib.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import cdd
import flint

from .errors import (
    DimensionMismatch,
    IntervalViolatesAssumption2,
    NonPositiveMid,
    NumeraireNotOne,
    SliceCoordinateNotOne,
    SpreadNotGreaterThanOne,
)
from .lp import as_fraction

Vector = tuple[Fraction, ...]


def vec(values) -> Vector:
    return tuple(as_fraction(v) for v in values)


def dot(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


@dataclass(frozen=True)
class BidAskSpec:
    """Bid/ask description of one node.

    Exactly one of ``factor`` (uniform spread ``c > 1``), ``intervals``
    (per-asset ``(lo, hi)`` for the first ``d-1`` assets) or
    ``frictionless=True`` is the source of the box.  ``factor`` may be given
    together with ``intervals`` as the declared bound they must respect.
    """

    d: int
    mid: Vector
    factor: Fraction | None = None
    intervals: tuple[tuple[Fraction, Fraction], ...] | None = None
    frictionless: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mid", vec(self.mid))
        if self.factor is not None:
            object.__setattr__(self, "factor", as_fraction(self.factor))
        if self.intervals is not None:
            object.__setattr__(self, "intervals",
                               tuple((as_fraction(lo), as_fraction(hi)) for lo, hi in self.intervals))

    def box(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """Validate and return the slice box; raises the construction errors."""
        d, S = self.d, self.mid
        if d < 2:
            raise DimensionMismatch(f"need at least two assets, got d={d}")
        if len(S) != d:
            raise DimensionMismatch(f"mid has length {len(S)}, expected {d}")
        if any(s <= 0 for s in S):
            raise NonPositiveMid(f"mid prices must be positive: {[str(s) for s in S]}")
        if S[-1] != 1:
            raise NumeraireNotOne(f"the numeraire mid must be 1, got {S[-1]}")
        c = self.factor
        if c is not None and c <= 1:
            raise SpreadNotGreaterThanOne(f"spread factor must exceed 1, got {c}")
        if self.frictionless:
            if self.intervals is not None or c is not None:
                raise IntervalViolatesAssumption2("frictionless nodes take neither factor nor intervals")
            return tuple((s, s) for s in S[:-1])
        if self.intervals is None:
            if c is None:
                raise SpreadNotGreaterThanOne("a spread factor or per-asset intervals are required")
            return tuple((s / c, s * c) for s in S[:-1])
        if len(self.intervals) != d - 1:
            raise DimensionMismatch(f"expected {d - 1} intervals, got {len(self.intervals)}")
        for i, ((lo, hi), s) in enumerate(zip(self.intervals, S)):
            if not 0 < lo <= hi:
                raise IntervalViolatesAssumption2(f"axis {i}: need 0 < lo <= hi, got [{lo}, {hi}]")
            if lo == hi:
                if lo != s:
                    raise IntervalViolatesAssumption2(f"axis {i}: collapsed interval must equal the mid {s}")
            elif not lo < s < hi:
                raise IntervalViolatesAssumption2(f"axis {i}: mid {s} not strictly inside [{lo}, {hi}]")
            if c is not None and (lo < s / c or hi > s * c):
                raise IntervalViolatesAssumption2(f"axis {i}: [{lo}, {hi}] exceeds the spread bound {c}")
        if all(lo == hi for lo, hi in self.intervals):
            raise IntervalViolatesAssumption2(
                "every interval is collapsed; use the frictionless toggle for a frictionless node")
        return self.intervals


@dataclass(frozen=True)
class SolvencyCone:
    d: int
    vertices: tuple[Vector, ...]
    mid: Vector
    box: tuple[tuple[Fraction, Fraction], ...] | None = None
    _facets: tuple = field(default=None, compare=False, repr=False)

    # construction ----------------------------------------------------------

    @classmethod
    def from_box(cls, mid, box) -> "SolvencyCone":
        mid = vec(mid)
        box = tuple((as_fraction(lo), as_fraction(hi)) for lo, hi in box)
        axes = [sorted({lo, hi}) for lo, hi in box]
        vertices = tuple(tuple(p) + (Fraction(1),) for p in itertools.product(*axes))
        return cls(len(mid), vertices, mid, box)

    @classmethod
    def from_vertices(cls, mid, vertices) -> "SolvencyCone":
        """General polytope slice; redundant points are dropped."""
        mid = vec(mid)
        d = len(mid)
        pts = []
        for v in vertices:
            v = vec(v)
            if len(v) != d:
                raise DimensionMismatch(f"vertex {v} has length {len(v)}, expected {d}")
            if v[-1] != 1:
                raise SliceCoordinateNotOne(f"vertex last coordinate must be 1, got {v[-1]}")
            if any(a <= 0 for a in v):
                raise IntervalViolatesAssumption2(f"dual generators must be strictly positive: {v}")
            pts.append(v)
        if not pts:
            raise IntervalViolatesAssumption2("empty vertex list")
        if mid[-1] != 1:
            raise NumeraireNotOne(f"the numeraire mid must be 1, got {mid[-1]}")
        if any(s <= 0 for s in mid):
            raise NonPositiveMid("mid prices must be positive")
        ext = _extreme_points(sorted(set(pts)))
        cone = cls(d, tuple(ext), mid, None)
        ineqs, eqs = cone.slice_facets
        if eqs and not ineqs or len(ext) == 1:
            raise IntervalViolatesAssumption2("slice collapsed to a point")
        if not cone.in_dual_interior(mid):
            raise IntervalViolatesAssumption2("mid price is not in the relative interior of the slice")
        return cone

    # basic data ------------------------------------------------------------

    @property
    def is_box(self) -> bool:
        return self.box is not None

    @cached_property
    def spread(self) -> Fraction:
        """Smallest ``c >= 1`` with the slice inside ``[S/c, S*c]`` on every axis."""
        c = Fraction(1)
        for v in self.vertices:
            for a, s in zip(v[:-1], self.mid[:-1]):
                c = max(c, a / s, s / a)
        return c

    @property
    def frictionless(self) -> bool:
        return len(self.vertices) == 1

    def _check(self, x) -> Vector:
        x = vec(x)
        if len(x) != self.d:
            raise DimensionMismatch(f"vector of length {len(x)} for a cone in dimension {self.d}")
        return x

    # membership ------------------------------------------------------------

    def in_cone(self, x) -> bool:
        x = self._check(x)
        return all(dot(x, v) >= 0 for v in self.vertices)

    def in_minus_cone(self, x) -> bool:
        x = self._check(x)
        return all(dot(x, v) <= 0 for v in self.vertices)

    def in_slice(self, y) -> bool:
        y = self._check(y)
        if y[-1] != 1:
            return False
        if self.box is not None:
            return all(lo <= a <= hi for a, (lo, hi) in zip(y, self.box))
        ineqs, eqs = self.slice_facets
        z = y[:-1]
        return all(b + dot(a, z) >= 0 for b, a in ineqs) and all(b + dot(a, z) == 0 for b, a in eqs)

    def in_slice_relint(self, y) -> bool:
        y = self._check(y)
        if y[-1] != 1:
            return False
        if self.box is not None:
            return all((lo < a < hi) if lo < hi else a == lo for a, (lo, hi) in zip(y, self.box))
        ineqs, eqs = self.slice_facets
        z = y[:-1]
        return all(b + dot(a, z) > 0 for b, a in ineqs) and all(b + dot(a, z) == 0 for b, a in eqs)

    def in_dual(self, y) -> bool:
        y = self._check(y)
        t = y[-1]
        if t < 0:
            return False
        if t == 0:
            # K^* meets {y^d = 0} only at the origin since every generator has v^d = 1
            return all(a == 0 for a in y)
        return self.in_slice(tuple(a / t for a in y))

    def in_dual_interior(self, y) -> bool:
        """Strict facet test; axes with a collapsed interval are held as equalities,
        so for frictionless directions this is the relative interior."""
        y = self._check(y)
        t = y[-1]
        if t <= 0:
            return False
        return self.in_slice_relint(tuple(a / t for a in y))

    # facets ----------------------------------------------------------------

    @cached_property
    def slice_facets(self):
        """``(ineqs, eqs)`` with rows ``(b, a)`` meaning ``b + a.z >= 0`` (resp. ``== 0``)
        on the first ``d-1`` coordinates of the slice."""
        if self.box is not None:
            ineqs, eqs = [], []
            k = self.d - 1
            for i, (lo, hi) in enumerate(self.box):
                e = tuple(Fraction(int(j == i)) for j in range(k))
                if lo == hi:
                    eqs.append((-lo, e))
                else:
                    ineqs.append((-lo, e))
                    ineqs.append((hi, tuple(-a for a in e)))
            return tuple(ineqs), tuple(eqs)
        return _cdd_facets([v[:-1] for v in self.vertices])

    def generators(self) -> tuple[Vector, ...]:
        """Generators of ``K`` itself: the facet normals of ``K^*``.

        A slice facet ``b + a.z >= 0`` lifts to ``<(a, b), y> >= 0`` on ``K^*``;
        equalities contribute both signs, and ``e_d`` is always included.
        """
        ineqs, eqs = self.slice_facets
        gens = [tuple(a) + (b,) for b, a in ineqs]
        for b, a in eqs:
            g = tuple(a) + (b,)
            gens.append(g)
            gens.append(tuple(-t for t in g))
        gens.append(tuple(Fraction(int(j == self.d - 1)) for j in range(self.d)))
        return tuple(gens)

    # projection ------------------------------------------------------------

    def project_to_slice(self, y) -> Vector:
        y = self._check(y)
        if y[-1] != 1:
            raise SliceCoordinateNotOne(f"projection needs y^d = 1, got {y[-1]}")
        if self.box is not None:
            return tuple(min(max(a, lo), hi) for a, (lo, hi) in zip(y, self.box)) + (Fraction(1),)
        if self.in_slice(y):
            return y
        return _project_polytope(y[:-1], *self.slice_facets) + (Fraction(1),)


def build_cone(spec: BidAskSpec) -> SolvencyCone:
    return SolvencyCone.from_box(spec.mid, spec.box())


def in_cone(K: SolvencyCone, x) -> bool:
    return K.in_cone(x)


def in_minus_cone(K: SolvencyCone, x) -> bool:
    return K.in_minus_cone(x)


def in_dual(K: SolvencyCone, y) -> bool:
    return K.in_dual(y)


def in_dual_interior(K: SolvencyCone, y) -> bool:
    return K.in_dual_interior(y)


def project_to_slice(K: SolvencyCone, y) -> Vector:
    return K.project_to_slice(y)


# ---------------------------------------------------------------------------
# exact polyhedral helpers

def _cdd_generator_matrix(points):
    m = cdd.Matrix([[1] + list(p) for p in points], number_type="fraction")
    m.rep_type = cdd.RepType.GENERATOR
    return m


def _extreme_points(points):
    if len(points) <= 1:
        return points
    m = _cdd_generator_matrix(points)
    redundant = m.canonicalize()[1]
    return [p for k, p in enumerate(points) if k not in redundant]


def _cdd_facets(points):
    h = cdd.Polyhedron(_cdd_generator_matrix(points)).get_inequalities()
    ineqs, eqs = [], []
    for k in range(h.row_size):
        row = [Fraction(v) for v in h[k]]
        b, a = row[0], tuple(row[1:])
        if not any(a):
            continue
        (eqs if k in h.lin_set else ineqs).append((b, a))
    return tuple(ineqs), tuple(eqs)


def _solve(rows, rhs):
    """Exact solve of a square rational system; None if singular."""
    n = len(rows)
    M = flint.fmpq_mat(n, n)
    B = flint.fmpq_mat(n, 1)
    for i, (r, b) in enumerate(zip(rows, rhs)):
        for j, a in enumerate(r):
            M[i, j] = flint.fmpq(a.numerator, a.denominator)
        B[i, 0] = flint.fmpq(b.numerator, b.denominator)
    try:
        X = M.solve(B)
    except ZeroDivisionError:
        return None
    return [Fraction(int(X[i, 0].p), int(X[i, 0].q)) for i in range(n)]


def _project_polytope(p, ineqs, eqs) -> Vector:
    """Euclidean projection of ``p`` onto ``{z : b + a.z >= 0, b' + a'.z = 0}``.

    Active sets are enumerated by size; for each one the equality-constrained
    projection is solved exactly and accepted once it is feasible with
    nonnegative multipliers (the KKT conditions, sufficient for this convex QP).
    """
    k = len(p)
    for size in range(0, k + 1 - len(eqs)):
        for active in itertools.combinations(range(len(ineqs)), size):
            cons = [ineqs[i] for i in active] + list(eqs)
            # minimise |z - p|^2 subject to a.z = -b for cons:  z = p + sum lam_j a_j
            if cons:
                gram = [[dot(ai, aj) for _, aj in cons] for _, ai in cons]
                rhs = [-b - dot(a, p) for b, a in cons]
                lam = _solve(gram, rhs)
                if lam is None:
                    continue
            else:
                lam = []
            z = list(p)
            for l, (_, a) in zip(lam, cons):
                z = [zi + l * ai for zi, ai in zip(z, a)]
            if any(l < 0 for l in lam[:size]):
                continue
            if all(b + dot(a, z) >= 0 for b, a in ineqs):
                return tuple(z)
    raise ArithmeticError("projection active-set search exhausted")  # pragma: no cover


__all__ = [
    "BidAskSpec", "SolvencyCone", "build_cone", "in_cone", "in_minus_cone", "in_dual",
    "in_dual_interior", "project_to_slice", "dot", "vec", "Vector",
]
