from fractions import Fraction
from math import log, sqrt

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from seqcomplex.classes import FunctionClass, constants, full_binary, leaf_class, leaf_tree, random_class
from seqcomplex.complexity import (dudley_bound, fat_rad_relation, linear_rad_check, massart_bound,
                                   rad_fixed_tree, rad_of_trees, rad_sup, structural_checks)
from seqcomplex.errors import CapacityError, DomainError
from seqcomplex.shattering import fat_dim
from seqcomplex.trees import Tree, constant_tree, enumerate_trees

# f = 1 on a, 0 on b; g = 0 on a, 1 on b
PENNIES = FunctionClass([[1, 0], [0, 1]], 1, "real")


@st.composite
def tiny(draw, max_n=2, max_m=4, max_T=3):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    T = draw(st.integers(1, max_T))
    table = draw(st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n), min_size=m, max_size=m))
    xv = draw(st.lists(st.integers(0, n - 1), min_size=(1 << T) - 1, max_size=(1 << T) - 1))
    return FunctionClass(table, 2, "real"), Tree(T, xv)


@settings(max_examples=50, deadline=None)
@given(tiny())
def test_rad_fixed_tree_matches_path_loop(inst):
    F, x = inst
    assert rad_fixed_tree(F, x).value == oracles.rad_tree(F, x)


@settings(max_examples=25, deadline=None)
@given(tiny(max_T=2))
def test_rad_sup_matches_oracle_and_local_is_lower(inst):
    F, x = inst
    exact = rad_sup(F, F.domain_size, x.depth)
    assert exact.value == oracles.rad_sup(F, x.depth)
    assert rad_fixed_tree(F, exact.argmax_tree).value == exact.value
    assert rad_sup(F, F.domain_size, x.depth, mode="local", restarts=2, seed=1).value <= exact.value


def test_listed_values():
    assert rad_fixed_tree(PENNIES, constant_tree(0, 1)).value == Fraction(1, 2)
    assert rad_sup(PENNIES, 2, 1).value == Fraction(1, 2)
    assert rad_of_trees([constant_tree(1, 2), constant_tree(-1, 2)]) == 1


def test_singleton_class_is_zero_on_all_trees():
    F = FunctionClass([[1, -1]], 1, "real")
    for T in range(1, 5):
        for x in enumerate_trees(2, T):
            assert rad_fixed_tree(F, x).value == 0
    F = FunctionClass([[1, -1, 0]], 1, "real")
    assert rad_fixed_tree(F, Tree(10, [i % 3 for i in range(1023)])).value == 0


def test_budget_errors():
    with pytest.raises(CapacityError):
        rad_fixed_tree(PENNIES, constant_tree(0, 21))
    with pytest.raises(CapacityError):
        rad_sup(random_class(4, 3, 1, seed=0), 4, 4)
    with pytest.raises(DomainError):
        rad_fixed_tree(PENNIES, constant_tree(5, 1))


def test_monte_carlo_within_three_stderr():
    for seed, T in ((1, 6), (2, 12)):
        F = random_class(3, 5, 2, seed=seed)
        x = Tree(T, [(i * 7 + seed) % 3 for i in range((1 << T) - 1)])
        exact = float(rad_fixed_tree(F, x).value)
        mc = rad_fixed_tree(F, x, mode="mc", trials=20000, seed=seed)
        assert abs(mc.value - exact) <= 3 * mc.stderr


def test_monte_carlo_is_seeded():
    x = constant_tree(0, 4)
    assert (rad_fixed_tree(PENNIES, x, "mc", 500, seed=3).value ==
            rad_fixed_tree(PENNIES, x, "mc", 500, seed=3).value)


def test_massart_anchor_and_singleton():
    lhs, rhs, ok = massart_bound([constant_tree(1, 2), constant_tree(-1, 2)])
    assert lhs == 1 and abs(rhs - sqrt(4 * log(2))) < 1e-9 and ok
    lhs, rhs, ok = massart_bound([Tree(2, [1, 0, -1])])
    assert lhs == 0 and rhs == 0 and ok
    with pytest.raises(DomainError):
        massart_bound([])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 5), st.data())
def test_massart_random(T, k, data):
    V = [Tree(T, [Fraction(v, 2) for v in data.draw(st.lists(st.integers(-2, 2), min_size=(1 << T) - 1,
                                                             max_size=(1 << T) - 1))])
         for _ in range(k)]
    lhs, rhs, ok = massart_bound(V)
    assert ok and float(lhs) <= rhs + 1e-9


def test_dudley_examples():
    S = FunctionClass([[1, 0]], 1)
    rep = dudley_bound(S, Tree(2, [0, 1, 0]))
    assert rep.value == 0
    F, x = leaf_class(3), leaf_tree(3)
    assert dudley_bound(F, x).value >= rad_fixed_tree(F, x).value
    B = FunctionClass([[1, 1], [1, -1], [-1, 1], [-1, -1]], 1, "binary")
    x = Tree(2, [0, 1, 0])
    assert dudley_bound(B, x).value >= rad_fixed_tree(B, x).value


@settings(max_examples=20, deadline=None)
@given(tiny(max_T=3))
def test_dudley_per_tree(inst):
    F, x = inst
    r = float(rad_fixed_tree(F, x).value)
    assert r <= dudley_bound(F, x, max_level=5).value + 1e-9
    assert r <= dudley_bound(F, x, max_level=5, cover_mode="greedy").value + 1e-9


def test_fat_rad_examples():
    rep = fat_rad_relation(FunctionClass([[1, 0]], 1), 2, 2)
    assert rep["rad"] == 0 and rep["holds"]
    rep = fat_rad_relation(PENNIES, 2, 1)
    assert rep["threshold"] == 1 and rep["holds"] and all(r["beta"] > 1 for r in rep["rows"])


@settings(max_examples=20, deadline=None)
@given(tiny(max_T=3))
def test_fat_rad_random(inst):
    F, x = inst
    rep = fat_rad_relation(F, F.domain_size, x.depth)
    assert rep["holds"]
    for r in rep["rows"]:
        assert fat_dim(F, r["beta"]) < x.depth


def test_linear_examples():
    values, bound, ok = linear_rad_check([[0, 0, 0]], 3, trees=[constant_tree(0, 3)])
    assert values == [0.0] and ok
    values, bound, ok = linear_rad_check([[1, 0, 0]], 2, trees=[constant_tree(0, 2)])
    assert abs(values[0] - 1) < 1e-12 and bound == 2 and ok


def test_linear_matches_class_on_axis_points():
    # on +-e_i with weights in the ball, sup over the finite class of the same points is a lower bound
    pts = [[1, 0], [0, 1], [-1, 0], [0, -1]]
    values, bound, ok = linear_rad_check(pts, 3, n_trees=10, seed=4)
    assert ok and all(v <= bound for v in values)


def test_structural_on_pennies():
    rep = structural_checks(PENNIES, 2, 2)
    assert rep["holds"]
    props = {r["property"] for r in rep["rows"]}
    assert props == {"monotone", "convex-hull", "scaling", "reflection", "contraction", "translation"}


@settings(max_examples=10, deadline=None)
@given(tiny(max_m=4, max_T=2))
def test_structural_random(inst):
    F, x = inst
    assert structural_checks(F, F.domain_size, x.depth)["holds"]


@settings(max_examples=30, deadline=None)
@given(tiny())
def test_negation_with_reflection(inst):
    from seqcomplex.trees import reflect
    F, x = inst
    neg = F.map_values(lambda u: -u, bound=None)
    assert rad_fixed_tree(neg, x).value == rad_fixed_tree(F, reflect(x)).value
