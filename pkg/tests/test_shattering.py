from fractions import Fraction
from math import log2

import pytest
from hypothesis import given, settings, strategies as st

from oracles import fat_by_trees, fat_recursive
from seqcomplex.classes import FunctionClass, constants, full_binary, thresholds
from seqcomplex.errors import DomainError, KindError
from seqcomplex.shattering import (EmptyCertificateError, ShatterCertificate, check_certificate,
                                   extract_shattered_tree, fat_dim, ldim)
from seqcomplex.trees import Tree

ALPHAS = [Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]


@st.composite
def small_class(draw, max_n=3, max_m=6):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    table = draw(st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n),
                          min_size=m, max_size=m))
    return FunctionClass(table, 2, "real")


@st.composite
def binary_class(draw, max_n=3, max_m=6):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    table = draw(st.lists(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n),
                          min_size=m, max_size=m))
    return FunctionClass(table, 1, "binary")


def test_listed_ldim_values():
    assert ldim(FunctionClass([[1, -1]], 1, "binary")) == 0
    assert ldim(full_binary(2)) == 2
    assert ldim(FunctionClass([[1], [-1]], 1, "binary")) == 1


def test_ldim_rejects_real_class():
    with pytest.raises(KindError):
        ldim(constants([0, 1]))


def test_alpha_must_be_positive():
    with pytest.raises(DomainError):
        fat_dim(constants([0]), 0)


def test_constants_anchor():
    # depth-1 certificate exists (split -1 | 0,1 at witness -1/2) but no depth-2 tree on one point
    assert fat_dim(constants([-1, 0, 1]), 1) == 1
    assert fat_by_trees(constants([-1, 0, 1]), 1) == 1


def test_constant_zero_singleton():
    assert fat_dim(constants([0]), Fraction(1, 8)) == 0


@settings(max_examples=60, deadline=None)
@given(small_class(), st.sampled_from(ALPHAS))
def test_fat_matches_recursive_oracle(F, a):
    assert fat_dim(F, a) == fat_recursive(F, a)


@settings(max_examples=25, deadline=None)
@given(small_class(max_n=2, max_m=4), st.sampled_from(ALPHAS))
def test_fat_matches_tree_enumeration(F, a):
    assert min(fat_dim(F, a), 2) == fat_by_trees(F, a, max_depth=2)


def test_depth_three_tree_enumeration_on_binary():
    for F in (full_binary(2), thresholds(2), FunctionClass([[1, 1], [-1, 1], [1, -1]], 1, "binary")):
        assert min(ldim(F), 3) == fat_by_trees(F, 2, max_depth=3)


@settings(max_examples=40, deadline=None)
@given(small_class())
def test_fat_nonincreasing_in_alpha(F):
    dims = [fat_dim(F, a) for a in ALPHAS]
    assert all(d1 >= d2 for d1, d2 in zip(dims, dims[1:]))


@settings(max_examples=40, deadline=None)
@given(small_class(), st.sampled_from(ALPHAS), st.data())
def test_subclass_monotone(F, a, data):
    idx = data.draw(st.lists(st.integers(0, F.size - 1), min_size=1, unique=True))
    assert fat_dim(F.subclass(idx), a) <= fat_dim(F, a)


@settings(max_examples=40, deadline=None)
@given(binary_class())
def test_binary_fat_equals_ldim(F):
    L = ldim(F)
    assert L <= log2(F.size)
    for a in ALPHAS:
        assert fat_dim(F, a) == L


@settings(max_examples=40, deadline=None)
@given(small_class(), st.sampled_from(ALPHAS))
def test_certificates_check(F, a):
    d = fat_dim(F, a)
    if d == 0:
        with pytest.raises(EmptyCertificateError):
            extract_shattered_tree(F, a)
        return
    cert = extract_shattered_tree(F, a)
    assert cert.depth == d
    assert check_certificate(F, cert)
    half = ShatterCertificate(cert.tree, cert.witness, a / 2)
    assert check_certificate(F, half)


def test_shifted_witness_fails():
    F = constants([-1, 1])
    cert = extract_shattered_tree(F, 2)
    assert cert.depth == 1 and cert.witness.values == (0,)
    shifted = ShatterCertificate(cert.tree, Tree(1, [cert.witness.root + 2]), cert.alpha)
    assert not check_certificate(F, shifted)


def test_full_binary_certificate_depth_two():
    cert = extract_shattered_tree(full_binary(2), 2)
    assert cert.depth == 2 and check_certificate(full_binary(2), cert)


def test_alpha_above_spread_has_no_certificate():
    with pytest.raises(EmptyCertificateError):
        extract_shattered_tree(constants([-1, 1]), Fraction(5, 2))


def test_certificate_json_round_trip():
    cert = extract_shattered_tree(full_binary(2), 2)
    again = ShatterCertificate.from_json(cert.to_json())
    assert again.tree == cert.tree and again.witness == cert.witness and again.alpha == cert.alpha
