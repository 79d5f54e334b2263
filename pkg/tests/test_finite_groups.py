from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fppgroups.finite_groups import (BATTERY, NILPOTENT_BATTERY, CatalogError, FiniteGroup, automorphism_count,
                                     build_catalog, classify_group, direct_product, enumerate_elements,
                                     get_entry, load_catalog, make_named_group)
from fppgroups.presentation import perm_inv, perm_mul

from oracles import brute_automorphism_count, is_nilpotent_sylow, is_solvable_derived, perm_closure

ORDERS = {"S3": 6, "A4": 12, "GL2F3": 48, "AGL1F8": 56, "D8": 16, "D9": 18, "D13": 26, "Q8": 8,
          "G27": 27, "Z13xsZ4_faithful": 52}
CATALOG = build_catalog(load_catalog())


def test_bundled_catalog_is_the_battery():
    assert tuple(load_catalog()) == BATTERY


@pytest.mark.parametrize("name", BATTERY)
def test_catalog_orders(name):
    G = CATALOG[name]
    assert G.order == ORDERS[name]
    assert set(enumerate_elements(G)) == perm_closure(G.generators, G.degree)


@pytest.mark.parametrize("name", BATTERY)
def test_automorphism_count_against_brute_force(name):
    G = CATALOG[name]
    assert automorphism_count(G) == brute_automorphism_count(G)


@pytest.mark.parametrize("name", BATTERY)
def test_solvable_and_nilpotent_flags(name):
    G = CATALOG[name]
    nil, solv = classify_group(G)
    assert solv and is_solvable_derived(G)
    assert nil == is_nilpotent_sylow(G) == (name in NILPOTENT_BATTERY)


def test_non_solvable_group_detected():
    A5 = make_named_group("A5")
    assert A5.order == 60
    assert classify_group(A5) == (False, False)
    assert not is_solvable_derived(A5)


def test_metacyclic_groups_are_non_abelian_and_faithful():
    G27, M52 = CATALOG["G27"], CATALOG["Z13xsZ4_faithful"]
    assert not G27.is_abelian() and not M52.is_abelian()
    assert max(G27.element_orders) == 9
    assert sorted(set(M52.element_orders)) == [1, 2, 4, 13]


def test_trivial_group():
    G = make_named_group("1")
    assert enumerate_elements(G) == [(0,)]
    assert automorphism_count(G) == 1


def test_unknown_group_name():
    with pytest.raises(CatalogError):
        make_named_group("M11")


GROUPS = [CATALOG[n] for n in ("S3", "A4", "Q8", "D9")]


@given(st.sampled_from(GROUPS), st.data())
def test_multiplication_table_matches_permutations(G, data):
    a = data.draw(st.integers(0, G.order - 1))
    b = data.draw(st.integers(0, G.order - 1))
    E = G.elements
    assert E[G.mul[a, b]] == perm_mul(E[a], E[b])
    assert E[G.inv[a]] == perm_inv(E[a])
    assert G.power(a, G.element_orders[a]) == 0


@pytest.mark.parametrize("name", ["S3", "A4", "D8", "Q8", "G27"])
def test_class_equation(name):
    G = CATALOG[name]
    classes = G.conjugacy_classes()
    assert sum(len(c) for c in classes) == G.order
    assert all(G.order % len(c) == 0 for c in classes)


def test_direct_product():
    G = direct_product(CATALOG["S3"], make_named_group("Z4"))
    assert G.order == 24
    assert get_entry("S3 x Z4").aut_order == automorphism_count(G)


def test_generates():
    G = CATALOG["S3"]
    assert G.generates(G.generator_indices)
    assert not G.generates([0])
