from fractions import Fraction
from math import e, inf

import pytest
from hypothesis import given, settings, strategies as st

from oracles import cover_size, packing_sizes, pointwise_cover_size
from seqcomplex.classes import FunctionClass, constants, full_binary, leaf_class, leaf_tree, random_class
from seqcomplex.covers import (CoverSet, cover, cover_compose, cover_construct, cover_number,
                               g_k, greedy_cover, is_cover, packing, packing_number,
                               pointwise_entropy, sauer_bound, strong_packing_number,
                               zero_cover_min)
from seqcomplex.errors import ContractError, KindError
from seqcomplex.shattering import fat_dim
from seqcomplex.trees import Tree, apply, constant_tree


@st.composite
def tiny(draw, max_n=2, max_m=3, max_T=2, scale=1):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    T = draw(st.integers(1, max_T))
    table = draw(st.lists(st.lists(st.integers(-scale, scale), min_size=n, max_size=n),
                          min_size=m, max_size=m))
    xv = draw(st.lists(st.integers(0, n - 1), min_size=(1 << T) - 1, max_size=(1 << T) - 1))
    return FunctionClass(table, scale, "real"), Tree(T, xv)


def projections_cover(F, x):
    return [apply(lambda p, r=r: F.value(r, p), x) for r in range(F.size)]


def test_full_projection_is_zero_cover():
    F, x = random_class(2, 4, 2, seed=3), Tree(2, [0, 1, 0])
    assert is_cover(projections_cover(F, x), F, x, 0)
    assert not is_cover([], F, x, 0)


def test_leaf_example():
    F, x = leaf_class(3), leaf_tree(3)
    size, V = zero_cover_min(F, x)
    assert size == 2 and is_cover(V, F, x)
    # the all-zero tree and the tree that is 1 on every leaf form a 0-cover
    g0 = constant_tree(0, 3)
    g1 = Tree(3, [0, 0, 0, 1, 1, 1, 1])
    assert is_cover([g0, g1], F, x, 0)
    assert packing_number(F, x, Fraction(1, 4)) == 4
    assert strong_packing_number(F, x, Fraction(1, 4)) == 2


def test_zero_cover_small_cases():
    assert zero_cover_min(FunctionClass([[0]], 1), Tree(2, [0, 0, 0]))[0] == 1
    F = full_binary(1)
    assert zero_cover_min(F, constant_tree(0, 2))[0] == 2


@settings(max_examples=20, deadline=None)
@given(tiny())
def test_linf_cover_matches_brute_force(inst):
    F, x = inst
    for a in (Fraction(0), Fraction(1, 2), Fraction(1)):
        V = cover(F, x, a, inf)
        assert is_cover(V, F, x)
        brute = cover_size(F, x, a, inf, max_k=2)
        if brute is None:
            assert len(V) > 2
        else:
            assert len(V) == brute


@settings(max_examples=10, deadline=None)
@given(tiny(max_T=2, max_m=3))
def test_l1_l2_covers_match_midpoint_brute_force(inst):
    F, x = inst
    for p in (1, 2):
        V = cover(F, x, Fraction(1, 2), p)
        assert is_cover(V, F, x)
        brute = cover_size(F, x, Fraction(1, 2), p, max_k=2)
        if brute is not None:
            assert len(V) == brute


@settings(max_examples=25, deadline=None)
@given(tiny(max_T=3, max_m=4, scale=2))
def test_norm_ordering_and_greedy(inst):
    F, x = inst
    for a in (Fraction(1, 4), Fraction(1, 2)):
        n1, n2, ni = (cover_number(F, x, a, p) for p in (1, 2, inf))
        assert n1 <= n2 <= ni
        for p in (1, 2, inf):
            G = greedy_cover(F, x, a, p)
            assert is_cover(G, F, x) and len(G) >= cover_number(F, x, a, p)


@settings(max_examples=25, deadline=None)
@given(tiny(max_T=3, max_m=4, scale=2))
def test_fat_based_cover_bound(inst):
    F, x = inst
    T = x.depth
    for a in (Fraction(1, 2), Fraction(1)):
        d = fat_dim(F, a)
        assert cover_number(F, x, a, inf) <= (2 * e * T / float(a)) ** d


def test_alpha_above_spread_gives_one():
    F, x = random_class(2, 4, 2, seed=1), Tree(2, [0, 1, 1])
    assert cover_number(F, x, 1, inf) == 1


def test_binary_small_alpha_equals_zero_cover():
    F, x = full_binary(2), Tree(2, [0, 1, 0])
    z, _ = zero_cover_min(F, x)
    assert cover_number(F, x, Fraction(1, 2), inf) == z
    # from alpha = 1 on, the all-zero tree is within alpha of every sign pattern
    assert cover_number(F, x, Fraction(3, 2), inf) == 1 < z


@settings(max_examples=20, deadline=None)
@given(tiny(max_T=2, max_m=4))
def test_packings_match_brute_force(inst):
    F, x = inst
    for a in (Fraction(1, 2), Fraction(1)):
        for p in (1, 2, inf):
            weak, strong = packing_sizes(F, x, a, p)
            assert packing_number(F, x, a, p) == weak
            assert strong_packing_number(F, x, a, p) == strong
            assert strong <= weak


@settings(max_examples=20, deadline=None)
@given(tiny(max_T=3, max_m=4))
def test_packing_notions_coincide_on_constant_trees(inst):
    F, x = inst
    c = constant_tree(x.root, x.depth)
    for p in (1, inf):
        assert packing_number(F, c, Fraction(1, 2), p) == strong_packing_number(F, c, Fraction(1, 2), p)


def test_identical_functions_pack_to_one():
    F = FunctionClass([[1, 0], [1, 1]], 1)
    x = constant_tree(0, 2)
    assert packing_number(F, x, Fraction(1, 4)) == strong_packing_number(F, x, Fraction(1, 4)) == 1


def test_packing_paths_certify_separation():
    F, x = leaf_class(3), leaf_tree(3)
    rows, paths = packing(F, x, Fraction(1, 4))
    assert len(rows) == len(paths) == 4


def test_g_k_values_and_recurrence():
    assert g_k(1, 1, 1) == 2 and g_k(2, 3, 1) == 7 and g_k(1, 2, 2) == 5
    assert g_k(-1, 3, 2) == 0 and g_k(0, 5, 3) == 1
    for k in (1, 2, 3):
        for d in range(13):
            for T in range(1, 13):
                assert g_k(d, T, k) == g_k(d, T - 1, k) + k * g_k(d - 1, T - 1, k)
                if 1 <= d <= T:
                    assert g_k(d, T, k) <= sauer_bound(d, T, k)
    assert g_k(40, 80, 3) > 2 ** 64


def test_construct_base_cases():
    F = FunctionClass([[0], [1]], 1, "levels", k=1)
    V = cover_construct(F, Tree(1, [0]))
    assert len(V) == 2 == g_k(1, 1, 1)
    S = FunctionClass([[1, 0]], 1, "levels", k=1)
    assert len(cover_construct(S, Tree(2, [0, 1, 0]))) == 1 == g_k(0, 2, 1)
    with pytest.raises(KindError):
        cover_construct(constants([0, 1]), Tree(1, [0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2), st.integers(1, 3), st.integers(2, 3), st.integers(2, 6), st.integers(0, 10 ** 6))
def test_construct_sandwich(k, T, n, m, seed):
    F = random_class(n, m, k, seed, kind="levels", k=k)
    x = Tree(T, [(seed >> i) % n for i in range((1 << T) - 1)])
    V1, V2 = cover_construct(F, x, "fat1"), cover_construct(F, x, "fat2")
    assert is_cover(V1, F, x, 0) and is_cover(V2, F, x, Fraction(1, 2 * k), inf)
    z, _ = zero_cover_min(F, x)
    assert z <= len(V1) <= g_k(fat_dim(F, Fraction(1, k)), T, k)
    f2 = fat_dim(F, Fraction(2, k))
    assert cover_number(F, x, Fraction(1, 2 * k), inf) <= len(V2) <= g_k(f2, T, k)


def test_pointwise_entropy_examples():
    F = random_class(3, 5, 2, seed=2)
    assert pointwise_entropy(F, 0) == F.size
    assert pointwise_entropy(F, 1) == 1
    # the centre 0 is within 1 of each of -1, 0, 1
    assert pointwise_entropy(constants([-1, 0, 1]), 1) == 1 == pointwise_cover_size(constants([-1, 0, 1]), 1)


@settings(max_examples=25, deadline=None)
@given(tiny(max_n=2, max_m=4, scale=2), st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1, 2)]))
def test_pointwise_entropy_brute_force(inst, a):
    F, _ = inst
    assert pointwise_entropy(F, a) == pointwise_cover_size(F, a)


def test_compose_identity_constant_and_lipschitz_maps():
    F, x = random_class(2, 4, 2, seed=4), Tree(2, [0, 1, 0])
    V = cover(F, x, Fraction(1, 2), inf)
    ident = cover_compose([lambda u: u], V)
    assert [t.values for t in ident.trees] == [t.values for t in V.trees]
    assert ident.alpha == 1
    consts = cover_compose([lambda u: Fraction(1, 2)], V)
    assert all(set(t.values) == {Fraction(1, 2)} for t in consts.trees)
    maps = [lambda u: max(Fraction(-1, 2), min(Fraction(1, 2), u)), lambda u: abs(u) - Fraction(1, 2)]
    W = cover_compose(maps, V)
    G = FunctionClass.from_values([[g(F.value(i, p)) for p in range(2)] for g in maps for i in range(F.size)],
                                  bound=None)
    assert is_cover(W, G, x, 2 * V.alpha, inf)
    with pytest.raises(ContractError):
        cover_compose([lambda u: 2 * u], V)
