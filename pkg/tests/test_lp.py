import random
from fractions import Fraction as F

import pytest

from superhedge.errors import DimensionMismatch
from superhedge.lp import LinearProgram, simplex, solve


def test_max_zero_over_orthant():
    lp = LinearProgram("max")
    lp.add_var("nonneg", 0)
    out = solve(lp)
    assert out.status == "optimal" and out.value == 0
    assert out.verify(lp)


def test_max_x_below_three_sevenths():
    lp = LinearProgram("max")
    x = lp.add_var("free", 1)
    lp.add_row({x: 1}, "<=", F(3, 7))
    out = solve(lp)
    assert out.value == F(3, 7)
    assert out.duals == [1]


def test_binomial_martingale_weight():
    # q*2 + (1-q)/2 = 1, q in [0, 1], max q
    lp = LinearProgram("max")
    q = lp.add_var("nonneg", 1)
    lp.add_row({q: 2 - F(1, 2)}, "==", 1 - F(1, 2))
    lp.add_row({q: 1}, "<=", 1)
    out = solve(lp)
    assert out.value == F(1, 3) and out.x == [F(1, 3)]


def test_infeasible_has_farkas():
    lp = LinearProgram("min")
    x = lp.add_var("free", 1)
    lp.add_row({x: 1}, ">=", 2)
    lp.add_row({x: 1}, "<=", 1)
    out = solve(lp)
    assert out.status == "infeasible"
    assert out.verify(lp)
    assert sum(r.rhs * y for r, y in zip(lp.rows, out.farkas)) > 0


def test_unbounded_has_ray():
    lp = LinearProgram("max")
    x = lp.add_var("nonneg", 1)
    y = lp.add_var("nonneg", 1)
    lp.add_row({x: 1, y: -1}, "<=", 1)
    out = solve(lp)
    assert out.status == "unbounded" and out.verify(lp)
    assert out.ray[0] > 0


def test_degenerate_redundant_equalities():
    lp = LinearProgram("min")
    x = lp.add_vars(3, "nonneg")
    for j, c in enumerate([1, 2, 3]):
        lp.set_cost(x[j], c)
    lp.add_row({x[0]: 1, x[1]: 1, x[2]: 1}, "==", 1)
    lp.add_row({x[0]: 2, x[1]: 2, x[2]: 2}, "==", 2)
    lp.add_row({x[0]: 1}, "<=", 1)
    out = solve(lp, method="exact")
    assert out.value == 1 and out.verify(lp)


def test_bad_variable_index():
    lp = LinearProgram()
    lp.add_var()
    with pytest.raises(DimensionMismatch):
        lp.add_row({3: 1}, "<=", 0)


def test_floats_rejected():
    lp = LinearProgram()
    with pytest.raises(TypeError):
        lp.add_var("nonneg", 0.5)


def _random_lp(rng, n, m):
    lp = LinearProgram(rng.choice(["min", "max"]))
    for _ in range(n):
        lp.add_var(rng.choice(["nonneg", "free", "nonpos", "nonneg"]), rng.randint(-3, 3))
    for _ in range(m):
        lp.add_row({j: F(rng.randint(-3, 3), rng.randint(1, 3)) for j in range(n) if rng.random() < 0.6},
                   rng.choice(["<=", ">=", "==", "<="]), rng.randint(-4, 4))
    return lp


def test_exact_and_warm_started_paths_agree():
    rng = random.Random(11)
    seen = set()
    for _ in range(300):
        lp = _random_lp(rng, rng.randint(1, 9), rng.randint(0, 10))
        a = solve(lp, method="exact")
        b = solve(lp, method="highs")
        assert a.status == b.status
        assert a.value == b.value
        assert a.verify(lp) and b.verify(lp)
        seen.add(a.status)
    assert seen == {"optimal", "infeasible", "unbounded"}


def test_simplex_is_deterministic():
    rng = random.Random(3)
    lp = _random_lp(rng, 8, 8)
    assert simplex(lp) == simplex(lp)


def test_optimal_duals_satisfy_complementary_slackness():
    rng = random.Random(5)
    checked = 0
    for _ in range(200):
        lp = _random_lp(rng, 6, 6)
        out = solve(lp)
        if out.optimal:
            for row, y in zip(lp.rows, out.duals):
                if y:
                    assert lp.activity(row, out.x) == row.rhs
            checked += 1
    assert checked > 20
