from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from seqcomplex.errors import DomainError
from seqcomplex.exact_lp import lp_max, solve_matrix_game


def test_matching_pennies():
    sol = solve_matrix_game([[1, 0], [0, 1]])
    assert sol.value == Fraction(1, 2) and sol.exact
    assert sol.row == [Fraction(1, 2)] * 2 and sol.col == [Fraction(1, 2)] * 2


def test_hand_solved_game():
    # rows minimise; mixing rows (3/5, 2/5) equalises columns 1 and 3 at 11/5
    sol = solve_matrix_game([[1, 2, 3], [4, 0, 1]])
    assert sol.value == Fraction(11, 5)
    assert sol.row == [Fraction(3, 5), Fraction(2, 5)]
    assert sol.col == [Fraction(2, 5), 0, Fraction(3, 5)]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_game_solution_is_certified(m, n, data):
    M = [[Fraction(data.draw(st.integers(-4, 4)), 2) for _ in range(n)] for _ in range(m)]
    sol = solve_matrix_game(M)
    q, p = sol.row, sol.col
    assert sum(q) == 1 and sum(p) == 1 and min(q) >= 0 and min(p) >= 0
    col_payoffs = [sum(q[i] * M[i][j] for i in range(m)) for j in range(n)]
    row_payoffs = [sum(M[i][j] * p[j] for j in range(n)) for i in range(m)]
    assert max(col_payoffs) == sol.value == min(row_payoffs)


def test_large_games_fall_back_to_floats():
    rng = np.random.default_rng(0)
    M = rng.integers(-3, 4, size=(14, 13))
    sol = solve_matrix_game(M.tolist())
    assert not sol.exact
    q = np.array(sol.row)
    assert abs((q @ M).max() - sol.value) < 1e-7


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_lp_max_against_highs(nv, nc, data):
    ints = st.integers(-3, 3)
    c = [data.draw(ints) for _ in range(nv)]
    A = [[data.draw(ints) for _ in range(nv)] for _ in range(nc)]
    b = [data.draw(st.integers(0, 4)) for _ in range(nc)]
    A_eq = [[1] * nv]
    b_eq = [1]
    ref = linprog(-np.array(c, float), A_ub=np.array(A, float), b_ub=b, A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * nv, method="highs")
    if ref.status == 2:
        with pytest.raises(DomainError):
            lp_max(c, A, b, A_eq, b_eq)
        return
    value, x = lp_max(c, A, b, A_eq, b_eq)
    assert abs(float(value) + ref.fun) < 1e-9
    assert sum(x) == 1 and all(v >= 0 for v in x)
    assert all(sum(a * v for a, v in zip(row, x)) <= bb for row, bb in zip(A, b))


def test_lp_unbounded_and_negative_rhs():
    with pytest.raises(DomainError):
        lp_max([1], [[-1]], [0])
    value, x = lp_max([-1], [[-1]], [-2])          # x >= 2, maximise -x
    assert value == -2 and x == [2]
