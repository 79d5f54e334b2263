from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fppgroups.cosets import (CosetLimitExceeded, conjugate_tables, enumerate_cosets, intersect_subgroups,
                              is_normal, subgroup_contains, table_from_action)
from fppgroups.presentation import evaluate_word, free_group, parse_presentation, parse_word

from groups import MODELS, model
from oracles import perm_closure
from strategies import words


@pytest.mark.parametrize("name", sorted(MODELS))
@pytest.mark.parametrize("strategy", ["hlt", "felsch"])
def test_trivial_subgroup_index_is_group_order(name, strategy):
    P, _, order = model(name)
    assert enumerate_cosets(P, [], strategy=strategy).index == order


def test_textbook_example():
    P = parse_presentation("< a, b | a^2, b^3, (a*b)^2 >")
    T = enumerate_cosets(P, [parse_word("a", P.generators)])
    assert T.index == 3
    T.check()
    assert T.perm(1) in {(1, 2, 0), (2, 0, 1)}


def test_strategies_agree_on_standardized_tables():
    P, _, _ = model("S4")
    for w in ("a", "b", "a*b", "b*a*b^-1"):
        H = [parse_word(w, P.generators)]
        assert enumerate_cosets(P, H, strategy="hlt") == enumerate_cosets(P, H, strategy="felsch")


def test_coset_limit():
    with pytest.raises(CosetLimitExceeded):
        enumerate_cosets(free_group(2), [], limit=500)
    with pytest.raises(ValueError):
        enumerate_cosets(free_group(1), [], limit=0)


@pytest.mark.parametrize("name", ["S4", "A4", "Q8", "D4"])
@given(data=st.data())
def test_index_matches_permutation_model(name, data):
    P, imgs, order = model(name)
    H = data.draw(st.lists(words(P.rank, 8), max_size=2))
    deg = len(imgs[0])
    sub_order = len(perm_closure([evaluate_word(w, imgs, deg) for w in H], deg))
    T = enumerate_cosets(P, H)
    assert T.index * sub_order == order
    assert subgroup_contains(T, H)


@pytest.mark.parametrize("name", ["S4", "Q8", "D4"])
@given(data=st.data())
def test_intersection_index(name, data):
    P, imgs, order = model(name)
    deg = len(imgs[0])
    H = data.draw(st.lists(words(P.rank, 6), min_size=1, max_size=2))
    K = data.draw(st.lists(words(P.rank, 6), min_size=1, max_size=2))
    h = perm_closure([evaluate_word(w, imgs, deg) for w in H], deg)
    k = perm_closure([evaluate_word(w, imgs, deg) for w in K], deg)
    assert intersect_subgroups(P, H, K).index * len(h & k) == order


@pytest.mark.parametrize("name", ["S4", "A4", "D4"])
@given(data=st.data())
def test_normality_matches_model(name, data):
    P, imgs, order = model(name)
    deg = len(imgs[0])
    H = data.draw(st.lists(words(P.rank, 6), max_size=2))
    h = perm_closure([evaluate_word(w, imgs, deg) for w in H], deg)
    G = perm_closure(imgs, deg)
    normal = all(_conj(g, x) in h for g in G for x in h)
    T = enumerate_cosets(P, H)
    assert is_normal(T) == normal
    assert (len(conjugate_tables(T)) == 1) == normal


def _conj(g, x):
    from fppgroups.presentation import perm_inv, perm_mul
    return perm_mul(perm_mul(perm_inv(g), x), g)


def test_conjugate_tables_count_equals_class_size():
    P, _, _ = model("S4")
    T = enumerate_cosets(P, [parse_word("a", P.generators)])
    # a transposition: 6 conjugates
    assert T.index == 12 and len(conjugate_tables(T)) == 6


def test_table_from_action_round_trip():
    P, _, _ = model("S4")
    T = enumerate_cosets(P, [parse_word("b", P.generators)])
    U = table_from_action(P, [T.perm(g) for g in range(P.rank)])
    assert U.table == T.table


def test_schreier_generators_lie_in_subgroup():
    P, _, _ = model("S4")
    T = enumerate_cosets(P, [parse_word("a*b", P.generators)])
    assert subgroup_contains(T, T.schreier_generators())
    assert len(T.transversal()) == T.index
