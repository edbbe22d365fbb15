from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from seqcomplex.errors import CapacityError, StructureError
from seqcomplex.trees import (Tree, apply, constant_tree, count_trees, enumerate_trees, eval_path,
                              join, path_node_matrix, path_signs, reflect, sign_matrix, split)


def tree_strategy(max_depth=4):
    return st.integers(1, max_depth).flatmap(
        lambda d: st.lists(st.integers(-3, 3), min_size=(1 << d) - 1, max_size=(1 << d) - 1)
        .map(lambda v: Tree(d, v)))


def test_node_addressing_follows_sign_prefixes():
    x = Tree(3, [0, 1, 2, 3, 4, 5, 6])
    assert x(( ), 1) == 0
    assert x((-1,), 2) == 1 and x((1,), 2) == 2
    assert x((-1, -1), 3) == 3 and x((-1, 1), 3) == 4 and x((1, -1), 3) == 5 and x((1, 1), 3) == 6


def test_last_sign_is_never_read():
    x = Tree(2, [7, 8, 9])
    assert eval_path(x, (1, -1), 2) == eval_path(x, (1, 1), 2) == 9


def test_wrong_length_rejected():
    with pytest.raises(StructureError):
        Tree(2, [1, 2])


@given(tree_strategy())
def test_join_split_round_trip(x):
    if x.depth == 1:
        with pytest.raises(StructureError):
            split(x)
        return
    r, l, rt = split(x)
    assert join(r, l, rt) == x


@given(tree_strategy())
def test_reflection_mirrors_paths(x):
    y = reflect(x)
    T = x.depth
    for p in range(1 << T):
        eps = path_signs(p, T)
        neg = tuple(-e for e in eps)
        assert all(y(eps, t) == x(neg, t) for t in range(1, T + 1))


@given(tree_strategy())
def test_json_round_trip(x):
    assert Tree.from_json(x.to_json()) == x


def test_fraction_values_serialise():
    x = Tree(1, [Fraction(1, 3)])
    assert x.to_json()["values"] == ["1/3"]
    assert Tree.from_json(x.to_json()) == x


def test_path_matrices_agree_with_eval():
    T = 3
    x = Tree(T, range(7))
    nodes, eps = path_node_matrix(T), sign_matrix(T)
    for p in range(1 << T):
        signs = path_signs(p, T)
        assert tuple(eps[p]) == signs
        assert tuple(nodes[p]) == tuple(x(signs, t) for t in range(1, T + 1))


def test_enumeration_count_and_budget():
    assert sum(1 for _ in enumerate_trees(2, 2)) == count_trees(2, 2) == 8
    with pytest.raises(CapacityError):
        next(enumerate_trees(3, 5, budget=100))


def test_apply_and_constant():
    x = constant_tree(1, 2)
    assert apply(lambda v: 2 * v, x).values == (2, 2, 2)
    with pytest.raises(LookupError):
        apply([5], Tree(1, [3]))
