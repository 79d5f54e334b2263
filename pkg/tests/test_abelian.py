from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from fppgroups.abelian import (InfiniteAbelianization, IntegerMatrix, InvariantFactors, abelian_cover_h1,
                               abelian_kernel_table, abelianization, h1_of_subgroup, invariant_factors,
                               relation_matrix, smith_normal_form, snf_diagonal)
from fppgroups.cosets import CosetLimitExceeded, enumerate_cosets
from fppgroups.lowindex import low_index_subgroups
from fppgroups.presentation import Presentation, free_group, parse_presentation, parse_word
from fppgroups.rewriting import tietze_simplify

from groups import MODELS, model
from oracles import leibniz_det, minor_gcd_factors
from strategies import words


def _random_matrix(rng, rows, cols):
    kind = rng.random()
    if kind < 0.3:
        return [[rng.randint(-3, 3) for _ in range(cols)] for _ in range(rows)]
    if kind < 0.6:
        return [[rng.choice([0, 0, 0, rng.randint(-50, 50)]) for _ in range(cols)] for _ in range(rows)]
    base = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
    if rows > 1:
        base[-1] = [2 * v for v in base[0]]
    return base


def _check_snf(M):
    rows, cols = len(M), len(M[0])
    S, U, V = smith_normal_form(M)
    assert (U @ IntegerMatrix.from_rows(M, cols) @ V).tolist() == S.tolist()
    assert abs(U.determinant()) == 1 and abs(V.determinant()) == 1
    s = S.tolist()
    assert all(s[i][j] == 0 for i in range(rows) for j in range(cols) if i != j)
    diag = snf_diagonal(S)
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert diag[:len(nz)] == nz
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    return nz


def test_snf_on_random_matrices_with_minor_gcd_oracle():
    rng = random.Random(20240611)
    for trial in range(1000):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        M = _random_matrix(rng, rows, cols)
        nz = _check_snf(M)
        if rows <= 5 and cols <= 5:
            assert nz == minor_gcd_factors(M), M
        inv = invariant_factors(M, cols)
        assert inv == InvariantFactors.from_diagonal(nz, cols)


def test_snf_example():
    assert _check_snf([[2, 1], [0, 2]]) == [1, 4]
    assert invariant_factors([[2, 0], [0, 3]], 2).format() == "Z/6"


@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=3, max_size=3))
def test_determinant_matches_leibniz(M):
    assert IntegerMatrix.from_rows(M, 3).determinant() == leibniz_det(M)


def test_invariant_factor_validation_and_format():
    assert InvariantFactors(0).format() == "1"
    assert InvariantFactors(2, (2, 6)).format() == "Z^2 x Z/2 x Z/6"
    assert InvariantFactors(0, (3, 3)).order == 9 and InvariantFactors(1).order == 0
    with pytest.raises(ValueError):
        InvariantFactors(0, (2, 3))
    with pytest.raises(ValueError):
        InvariantFactors(0, (1, 2))
    rec = InvariantFactors(1, (4,)).to_record()
    assert InvariantFactors.from_record(rec) == InvariantFactors(1, (4,))


@pytest.mark.parametrize("name,h1", [("S3", "Z/2"), ("S4", "Z/2"), ("A4", "Z/3"), ("Q8", "Z/2 x Z/2"),
                                     ("D4", "Z/2 x Z/2"), ("Z6", "Z/6")])
def test_abelianization_examples(name, h1):
    P, _, _ = model(name)
    assert abelianization(P).format() == h1


def test_free_and_mixed_abelianization():
    assert abelianization(free_group(3)).format() == "Z^3"
    assert abelianization(parse_presentation("< a, b | a^4, [a, b] >")).format() == "Z x Z/4"


@given(st.lists(words(3, 8), max_size=4), st.permutations(range(3)), st.randoms())
def test_abelianization_invariances(rels, perm, rnd):
    P = Presentation(("a", "b", "c"), tuple(rels))
    inv = abelianization(P)
    shuffled = list(P.relators)
    rnd.shuffle(shuffled)
    assert abelianization(Presentation(P.generators, tuple(shuffled))) == inv
    relabeled = Presentation(P.generators, tuple(r.relabel(list(perm)) for r in P.relators))
    assert abelianization(relabeled) == inv
    assert abelianization(tietze_simplify(P)) == inv


@pytest.mark.parametrize("name", sorted(MODELS))
def test_h1_of_whole_group_equals_abelianization(name):
    P, _, _ = model(name)
    T = enumerate_cosets(P, [])
    whole = enumerate_cosets(P, [parse_word(g, P.generators) for g in P.generators])
    assert whole.index == 1
    assert h1_of_subgroup(whole) == abelianization(P) == h1_of_subgroup(whole, simplify=False)
    assert h1_of_subgroup(T).format() == "1"


def test_subgroup_h1_examples():
    P, _, _ = model("S3")
    sub = [c for c in low_index_subgroups(P, 2) if c.index == 2][0]
    assert h1_of_subgroup(sub.table).format() == "Z/3"
    C4 = parse_presentation("< a | a^4 >")
    assert h1_of_subgroup(enumerate_cosets(C4, [parse_word("a^2", ["a"])])).format() == "Z/2"
    F2 = free_group(2)
    for c in low_index_subgroups(F2, 3):
        assert h1_of_subgroup(c.table).format() == f"Z^{c.index + 1}"


@pytest.mark.parametrize("name,h1", [("S3", "Z/3"), ("S4", "Z/3"), ("A4", "Z/2 x Z/2"), ("Q8", "Z/2"),
                                     ("D4", "Z/2"), ("Z6", "1")])
def test_abelian_cover_examples(name, h1):
    P, _, order = model(name)
    T = abelian_kernel_table(P)
    assert T.index == abelianization(P).order
    assert abelian_cover_h1(P).format() == h1


def test_abelian_cover_of_cyclic_group_is_trivial():
    assert abelian_cover_h1(parse_presentation("< a | a^4 >")).format() == "1"


def test_abelian_cover_kernel_is_the_commutator_subgroup():
    from fppgroups.words import commutator
    P, _, _ = model("S4")
    a, b = (parse_word(g, P.generators) for g in P.generators)
    # the commutator subgroup of S4 is A4, generated by conjugates of [a, b]
    words = [commutator(a, b), b * commutator(a, b) * b.inverse(), a * commutator(a, b) * a]
    assert enumerate_cosets(P, words).table == abelian_kernel_table(P).table


def test_infinite_abelianization_rejected():
    with pytest.raises(InfiniteAbelianization):
        abelian_cover_h1(free_group(2))
    with pytest.raises(CosetLimitExceeded):
        abelian_cover_h1(parse_presentation("< a | a^50 >"), limit=10)


def test_relation_matrix_rows():
    P = parse_presentation("< a, b | a^2*b^-1*a, b^3 >")
    assert relation_matrix(P).tolist() == [[3, -1], [0, 3]]
