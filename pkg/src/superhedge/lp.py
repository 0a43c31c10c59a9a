"""Exact rational linear programming.

Every outcome is backed by a certificate that is re-checked by substitution
before it is returned:

* ``optimal``: a primal point ``x`` and dual multipliers ``duals`` with equal
  objective values and exact complementary slackness;
* ``infeasible``: a Farkas vector over the rows;
* ``unbounded``: a feasible point and an improving ray.

Sign conventions (``y`` indexed by row):

* minimisation: ``>=`` rows carry ``y >= 0``, ``<=`` rows ``y <= 0``;
  reduced costs ``c - A^T y`` are ``>= 0`` on nonneg columns, ``0`` on free
  columns and ``<= 0`` on nonpos columns;
* maximisation: every sign above is flipped;
* in both cases the optimal value equals ``b . y``.

A Farkas vector obeys the minimisation row signs, has ``b . y > 0`` and
``w = A^T y`` with ``w <= 0`` on nonneg columns, ``w == 0`` on free ones and
``w >= 0`` on nonpos ones.

Large programs are first solved in floating point by HiGHS.  Only the final
basis is used: the vertex and multipliers it describes are recomputed in
rationals, and if they fail the exact checks the program is re-solved by a
dense rational simplex with Bland's rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import DimensionMismatch

KINDS = ("nonneg", "free", "nonpos")
RELATIONS = ("<=", ">=", "==")

# below this many matrix entries the dense exact simplex is cheaper than HiGHS
EXACT_ONLY_SIZE = 240

_MPQ = type(mpq())


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, _MPQ):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass int, Fraction or a ratio string")
    return Fraction(value)


@dataclass
class Row:
    coeffs: dict[int, Fraction]
    rel: str
    rhs: Fraction
    name: str = ""


@dataclass
class LinearProgram:
    sense: str = "min"
    kinds: list[str] = field(default_factory=list)
    costs: list[Fraction] = field(default_factory=list)
    names: list[str] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")

    @property
    def num_vars(self) -> int:
        return len(self.kinds)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def add_var(self, kind: str = "nonneg", cost=0, name: str = "") -> int:
        if kind not in KINDS:
            raise ValueError(f"unknown variable kind {kind!r}")
        self.kinds.append(kind)
        self.costs.append(as_fraction(cost))
        self.names.append(name or f"x{len(self.kinds) - 1}")
        return len(self.kinds) - 1

    def add_vars(self, count: int, kind: str = "nonneg", cost=0, prefix: str = "x") -> list[int]:
        return [self.add_var(kind, cost, f"{prefix}{k}") for k in range(count)]

    def set_cost(self, j: int, cost) -> None:
        self.costs[j] = as_fraction(cost)

    def add_row(self, coeffs: Mapping[int, object] | Iterable[tuple[int, object]],
                rel: str, rhs=0, name: str = "") -> int:
        if rel not in RELATIONS:
            raise ValueError(f"unknown relation {rel!r}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        clean: dict[int, Fraction] = {}
        for j, a in items:
            if not 0 <= j < self.num_vars:
                raise DimensionMismatch(f"row refers to variable {j}, only {self.num_vars} exist")
            a = as_fraction(a)
            if a:
                clean[j] = clean.get(j, Fraction(0)) + a
        clean = {j: a for j, a in clean.items() if a}
        self.rows.append(Row(clean, rel, as_fraction(rhs), name))
        return len(self.rows) - 1

    # evaluation helpers shared by certificate checks
    def activity(self, row: Row, x: Sequence[Fraction]) -> Fraction:
        return sum((a * x[j] for j, a in row.coeffs.items()), Fraction(0))

    def objective(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.costs, x) if c), Fraction(0))

    def transpose_times(self, y: Sequence[Fraction]) -> list[Fraction]:
        w = [Fraction(0)] * self.num_vars
        for yi, row in zip(y, self.rows):
            if yi:
                for j, a in row.coeffs.items():
                    w[j] += a * yi
        return w

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            return False
        for kind, v in zip(self.kinds, x):
            if (kind == "nonneg" and v < 0) or (kind == "nonpos" and v > 0):
                return False
        for row in self.rows:
            if not _satisfies(self.activity(row, x), row.rel, row.rhs):
                return False
        return True


def _satisfies(lhs, rel, rhs) -> bool:
    if rel == "<=":
        return lhs <= rhs
    if rel == ">=":
        return lhs >= rhs
    return lhs == rhs


@dataclass
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: list[Fraction] | None = None
    duals: list[Fraction] | None = None
    farkas: list[Fraction] | None = None
    ray: list[Fraction] | None = None
    method: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def verify(self, lp: LinearProgram) -> bool:
        """Re-check the attached certificate by direct substitution."""
        if self.status == "optimal":
            return self.x is not None and self.duals is not None and _check_optimal(lp, self)
        if self.status == "infeasible":
            return self.farkas is not None and _check_farkas(lp, self.farkas)
        if self.status == "unbounded":
            return (self.x is not None and self.ray is not None
                    and lp.is_feasible(self.x) and _check_ray(lp, self.ray))
        return False


def _check_optimal(lp: LinearProgram, out: LpOutcome) -> bool:
    x, y = out.x, out.duals
    if len(y) != lp.num_rows or not lp.is_feasible(x):
        return False
    flip = 1 if lp.sense == "min" else -1
    for row, yi in zip(lp.rows, y):
        s = flip * yi
        if (row.rel == ">=" and s < 0) or (row.rel == "<=" and s > 0):
            return False
        # complementary slackness on rows
        if yi and lp.activity(row, x) != row.rhs:
            return False
    w = lp.transpose_times(y)
    for j, kind in enumerate(lp.kinds):
        d = flip * (lp.costs[j] - w[j])
        if (kind == "nonneg" and d < 0) or (kind == "nonpos" and d > 0) or (kind == "free" and d):
            return False
        if d and x[j]:
            return False
    primal = lp.objective(x)
    dual = sum((row.rhs * yi for row, yi in zip(lp.rows, y)), Fraction(0))
    return primal == dual == out.value


def _check_farkas(lp: LinearProgram, y: Sequence[Fraction]) -> bool:
    if len(y) != lp.num_rows:
        return False
    for row, yi in zip(lp.rows, y):
        if (row.rel == ">=" and yi < 0) or (row.rel == "<=" and yi > 0):
            return False
    w = lp.transpose_times(y)
    for kind, wj in zip(lp.kinds, w):
        if (kind == "nonneg" and wj > 0) or (kind == "nonpos" and wj < 0) or (kind == "free" and wj):
            return False
    return sum((row.rhs * yi for row, yi in zip(lp.rows, y)), Fraction(0)) > 0


def _check_ray(lp: LinearProgram, r: Sequence[Fraction]) -> bool:
    if len(r) != lp.num_vars:
        return False
    for kind, v in zip(lp.kinds, r):
        if (kind == "nonneg" and v < 0) or (kind == "nonpos" and v > 0):
            return False
    for row in lp.rows:
        if not _satisfies(lp.activity(row, r), row.rel, 0):
            return False
    gain = lp.objective(r)
    return gain < 0 if lp.sense == "min" else gain > 0


class CertificateError(RuntimeError):
    """Raised if no verified certificate could be produced (a kernel bug)."""


def solve(lp: LinearProgram, *, method: str = "auto") -> LpOutcome:
    """Solve ``lp`` exactly; ``method`` is ``auto``, ``exact`` or ``highs``."""
    for row in lp.rows:
        if any(j >= lp.num_vars for j in row.coeffs):
            raise DimensionMismatch("row refers to a missing variable")
    out = None
    size = lp.num_vars * max(lp.num_rows, 1)
    if method == "highs" or (method == "auto" and size > EXACT_ONLY_SIZE):
        out = _solve_with_highs(lp)
    if out is None:
        out = simplex(lp)
    if not out.verify(lp):
        raise CertificateError(f"{out.status} certificate failed verification ({out.method})")
    return out


# ---------------------------------------------------------------------------
# HiGHS warm start + exact basis certification

def _solve_with_highs(lp: LinearProgram) -> LpOutcome | None:
    status, basis = _highs_basis(lp)
    if status == "optimal":
        return _certify_basis(lp, *basis)
    if status in ("infeasible", "unbounded", "unbounded_or_infeasible"):
        return _certify_non_optimal(lp)
    return None


def _highs_basis(lp: LinearProgram):
    import highspy

    n, m = lp.num_vars, lp.num_rows
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("random_seed", 0)
    model = highspy.HighsLp()
    model.num_col_ = n
    model.num_row_ = m
    sign = 1.0 if lp.sense == "min" else -1.0
    model.col_cost_ = [sign * float(c) for c in lp.costs]
    inf = highspy.kHighsInf
    model.col_lower_ = [0.0 if k == "nonneg" else -inf for k in lp.kinds]
    model.col_upper_ = [0.0 if k == "nonpos" else inf for k in lp.kinds]
    model.row_lower_ = [float(r.rhs) if r.rel != "<=" else -inf for r in lp.rows]
    model.row_upper_ = [float(r.rhs) if r.rel != ">=" else inf for r in lp.rows]
    cols: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i, row in enumerate(lp.rows):
        for j, a in row.coeffs.items():
            cols[j].append((i, float(a)))
    start, index, value = [0], [], []
    for col in cols:
        for i, a in col:
            index.append(i)
            value.append(a)
        start.append(len(index))
    model.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    model.a_matrix_.start_ = start
    model.a_matrix_.index_ = index
    model.a_matrix_.value_ = value
    h.passModel(model)
    h.run()
    st = h.getModelStatus()
    S = highspy.HighsModelStatus
    if st == S.kOptimal:
        b = h.getBasis()
        if not b.valid:
            return "unknown", None
        B = highspy.HighsBasisStatus
        col_basic = [s == B.kBasic for s in b.col_status]
        row_basic = [s == B.kBasic for s in b.row_status]
        return "optimal", (col_basic, row_basic)
    if st == S.kInfeasible:
        return "infeasible", None
    if st == S.kUnbounded:
        return "unbounded", None
    if st == S.kUnboundedOrInfeasible:
        return "unbounded_or_infeasible", None
    return "unknown", None


def _certify_basis(lp: LinearProgram, col_basic, row_basic) -> LpOutcome | None:
    """Rebuild the vertex named by a basis in rationals and verify it."""
    import flint

    basic_cols = [j for j, b in enumerate(col_basic) if b]
    tight_rows = [i for i, b in enumerate(row_basic) if not b]
    k = len(basic_cols)
    if k != len(tight_rows):
        return None
    n, m = lp.num_vars, lp.num_rows
    x = [Fraction(0)] * n
    y = [Fraction(0)] * m
    if k:
        pos = {j: p for p, j in enumerate(basic_cols)}
        M = flint.fmpq_mat(k, k)
        rhs = flint.fmpq_mat(k, 1)
        for r, i in enumerate(tight_rows):
            row = lp.rows[i]
            for j, a in row.coeffs.items():
                p = pos.get(j)
                if p is not None:
                    M[r, p] = flint.fmpq(a.numerator, a.denominator)
            rhs[r, 0] = flint.fmpq(row.rhs.numerator, row.rhs.denominator)
        cB = flint.fmpq_mat(k, 1)
        for p, j in enumerate(basic_cols):
            c = lp.costs[j]
            cB[p, 0] = flint.fmpq(c.numerator, c.denominator)
        try:
            xb = M.solve(rhs)
            yn = M.transpose().solve(cB)
        except ZeroDivisionError:
            return None
        for p, j in enumerate(basic_cols):
            v = xb[p, 0]
            x[j] = Fraction(int(v.p), int(v.q))
        for r, i in enumerate(tight_rows):
            v = yn[r, 0]
            y[i] = Fraction(int(v.p), int(v.q))
    out = LpOutcome("optimal", lp.objective(x), x, y, method="highs+exact-basis")
    return out if _check_optimal(lp, out) else None


def _certify_non_optimal(lp: LinearProgram) -> LpOutcome | None:
    """Certify infeasibility through an auxiliary phase-one program, or
    unboundedness through a feasible point plus a normalised ray program."""
    aux, first_slack = _phase_one_program(lp)
    res = _solve_with_highs_optimal(aux)
    if res is None:
        return None
    if res.value > 0:
        farkas = res.duals
        return LpOutcome("infeasible", farkas=farkas, method="highs+phase-one") \
            if _check_farkas(lp, farkas) else None
    x = res.x[:first_slack]
    if not lp.is_feasible(x):
        return None
    ray_lp = LinearProgram(lp.sense, list(lp.kinds), list(lp.costs), list(lp.names),
                           [Row(r.coeffs, r.rel, Fraction(0)) for r in lp.rows])
    # normalise the ray so the auxiliary program is bounded
    if lp.sense == "min":
        ray_lp.add_row(dict(enumerate(lp.costs)), ">=", -1)
    else:
        ray_lp.add_row(dict(enumerate(lp.costs)), "<=", 1)
    rres = _solve_with_highs_optimal(ray_lp)
    if rres is None or not _check_ray(lp, rres.x):
        return None
    return LpOutcome("unbounded", x=x, ray=rres.x, method="highs+ray")


def _solve_with_highs_optimal(lp: LinearProgram) -> LpOutcome | None:
    status, basis = _highs_basis(lp)
    out = _certify_basis(lp, *basis) if status == "optimal" else None
    if out is None:
        out = simplex(lp)
        if out.status != "optimal":
            return None
    return out


def _phase_one_program(lp: LinearProgram) -> tuple[LinearProgram, int]:
    aux = LinearProgram("min", list(lp.kinds), [Fraction(0)] * lp.num_vars, list(lp.names))
    first = aux.num_vars
    for row in lp.rows:
        coeffs = dict(row.coeffs)
        if row.rel in ("<=", "=="):
            coeffs[aux.add_var("nonneg", 1)] = Fraction(-1)
        if row.rel in (">=", "=="):
            coeffs[aux.add_var("nonneg", 1)] = Fraction(1)
        aux.rows.append(Row(coeffs, row.rel, row.rhs))
    return aux, first


# ---------------------------------------------------------------------------
# dense rational simplex, Bland's rule

def simplex(lp: LinearProgram) -> LpOutcome:
    """Two-phase tableau simplex over ``gmpy2.mpq`` with Bland's pivoting."""
    n, m = lp.num_vars, lp.num_rows
    sign = 1 if lp.sense == "min" else -1

    # standard columns: each original variable maps to one or two columns
    colmap: list[tuple[int, int]] = []  # (original var, +1/-1)
    for j, kind in enumerate(lp.kinds):
        if kind in ("nonneg", "free"):
            colmap.append((j, 1))
        if kind in ("nonpos", "free"):
            colmap.append((j, -1))
    cost = [mpq(sign * lp.costs[j].numerator, lp.costs[j].denominator) * s for j, s in colmap]
    by_var: dict[int, list[int]] = {}
    for c, (j, _) in enumerate(colmap):
        by_var.setdefault(j, []).append(c)

    rows: list[list] = []
    rhs: list = []
    sigma: list[int] = []
    for row in lp.rows:
        dense = [mpq(0)] * len(colmap)
        for j, a in row.coeffs.items():
            qa = mpq(a.numerator, a.denominator)
            for c in by_var[j]:
                dense[c] = qa * colmap[c][1]
        b = mpq(row.rhs.numerator, row.rhs.denominator)
        rows.append(dense)
        rhs.append(b)
        sigma.append(1)

    # slacks
    n_struct = len(colmap)
    slack_of: list[int | None] = []
    for i, row in enumerate(lp.rows):
        if row.rel == "==":
            slack_of.append(None)
            continue
        s = mpq(1) if row.rel == "<=" else mpq(-1)
        for r in range(m):
            rows[r].append(s if r == i else mpq(0))
        cost.append(mpq(0))
        slack_of.append(len(cost) - 1)
    n_real = len(cost)

    # make rhs nonnegative
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-a for a in rows[i]]
            rhs[i] = -rhs[i]
            sigma[i] = -1

    # initial basis: a slack with +1 coefficient, else an artificial
    basis: list[int] = []
    ident: list[int] = []
    n_art = 0
    for i in range(m):
        s = slack_of[i]
        if s is not None and rows[i][s] == 1:
            basis.append(s)
            ident.append(s)
        else:
            basis.append(-1)
            n_art += 1
    total = n_real + n_art
    for r in range(m):
        rows[r].extend([mpq(0)] * n_art)
    a = n_real
    for i in range(m):
        if basis[i] == -1:
            rows[i][a] = mpq(1)
            basis[i] = a
            a += 1
    ident = list(basis)
    allowed = [True] * total
    tab = [rows[i] + [rhs[i]] for i in range(m)]

    def run(obj: list, allowed_cols: list[bool]):
        # reduced-cost row: obj - c_B B^{-1} A, kept updated with the tableau
        red = list(obj) + [mpq(0)]
        for i, bcol in enumerate(basis):
            cb = obj[bcol]
            if cb:
                ti = tab[i]
                for c in range(total + 1):
                    if ti[c]:
                        red[c] -= cb * ti[c]
        while True:
            enter = next((c for c in range(total) if allowed_cols[c] and red[c] < 0), None)
            if enter is None:
                return None
            leave, best = None, None
            for i in range(m):
                a_ie = tab[i][enter]
                if a_ie > 0:
                    ratio = tab[i][total] / a_ie
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        leave, best = i, ratio
            if leave is None:
                return enter
            _pivot(tab, red, leave, enter, total)
            basis[leave] = enter

    # phase one
    if n_art:
        obj1 = [mpq(0)] * n_real + [mpq(1)] * n_art
        run(obj1, [True] * total)
        w = sum((tab[i][total] for i in range(m) if basis[i] >= n_real), mpq(0))
        if w > 0:
            y_std = _duals(tab, basis, ident, obj1, m)
            farkas = [Fraction(int(v.numerator), int(v.denominator)) * s for v, s in zip(y_std, sigma)]
            return LpOutcome("infeasible", farkas=farkas, method="exact-simplex")
        # drive zero-level artificials out where possible
        for i in range(m):
            if basis[i] >= n_real:
                c = next((c for c in range(n_real) if tab[i][c] != 0), None)
                if c is not None:
                    _pivot(tab, None, i, c, total)
                    basis[i] = c
        for c in range(n_real, total):
            allowed[c] = False

    obj2 = cost + [mpq(0)] * n_art
    enter = run(obj2, allowed)
    xs = [mpq(0)] * total
    for i, bcol in enumerate(basis):
        xs[bcol] = tab[i][total]
    x = _to_original(xs, colmap, n)
    if enter is not None:
        rs = [mpq(0)] * total
        rs[enter] = mpq(1)
        for i, bcol in enumerate(basis):
            rs[bcol] = -tab[i][enter]
        ray = _to_original(rs, colmap, n)
        return LpOutcome("unbounded", x=x, ray=ray, method="exact-simplex")
    y_std = _duals(tab, basis, ident, obj2, m)
    y = [Fraction(int(v.numerator), int(v.denominator)) * s * sign for v, s in zip(y_std, sigma)]
    return LpOutcome("optimal", lp.objective(x), x, y, method="exact-simplex")


def _pivot(tab, red, r, c, total):
    pr = tab[r]
    p = pr[c]
    if p != 1:
        inv = 1 / p
        pr[:] = [v * inv for v in pr]
    nz = [k for k in range(total + 1) if pr[k]]
    for i, ti in enumerate(tab):
        if i != r:
            f = ti[c]
            if f:
                for k in nz:
                    ti[k] -= f * pr[k]
    if red is not None:
        f = red[c]
        if f:
            for k in nz:
                red[k] -= f * pr[k]


def _duals(tab, basis, ident, obj, m):
    # B^{-1} sits in the columns that formed the starting identity
    y = []
    for i in range(m):
        col = ident[i]
        y.append(sum((obj[basis[r]] * tab[r][col] for r in range(m)), mpq(0)))
    return y


def _to_original(xs, colmap, n) -> list[Fraction]:
    x = [Fraction(0)] * n
    for c, (j, s) in enumerate(colmap):
        v = xs[c]
        if v:
            x[j] += Fraction(int(v.numerator), int(v.denominator)) * s
    return x


__all__ = [
    "LinearProgram", "LpOutcome", "Row", "solve", "simplex", "as_fraction",
    "CertificateError", "KINDS", "RELATIONS",
]
