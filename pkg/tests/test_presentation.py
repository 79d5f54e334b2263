from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fppgroups.finite_groups import make_named_group
from fppgroups.presentation import (ParseError, Presentation, UndeclaredGenerator, dump_records,
                                    evaluate_word, free_group, load_records, parse_presentation,
                                    parse_relations, parse_word, parse_word_list, perm_inv, perm_mul,
                                    perm_pow)
from fppgroups.words import Word, commutator, free_reduce

from strategies import letter_lists, raw_syllables, words


def _naive_reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    return out


@given(letter_lists(3))
def test_free_reduce_matches_stack_cancellation(ls):
    assert Word.from_letters(ls).letters() == _naive_reduce(ls)


@given(raw_syllables(3))
def test_free_reduce_is_idempotent_and_has_no_inverse_pairs(syl):
    w = free_reduce(syl)
    assert free_reduce(w) == w
    ls = w.letters()
    assert all(ls[i] != ls[i + 1] ^ 1 for i in range(len(ls) - 1))


def test_cancellation_to_identity():
    a = Word.gen(0)
    assert a * a.inverse() == Word()
    assert len(Word()) == 0 and not Word()


@given(words(3), words(3), words(3))
def test_group_axioms_in_free_group(u, v, w):
    assert (u * v) * w == u * (v * w)
    assert u * u.inverse() == Word()
    assert (u * v).inverse() == v.inverse() * u.inverse()


@given(words(2), st.integers(-4, 4))
def test_power_matches_repeated_product(w, k):
    ref = Word()
    for _ in range(abs(k)):
        ref = ref * (w if k > 0 else w.inverse())
    assert w ** k == ref


@given(words(2))
def test_cyclic_split(w):
    u, c = w.cyclic_split()
    assert u * c * u.inverse() == w
    ls = c.letters()
    assert len(ls) < 2 or ls[0] != ls[-1] ^ 1


def test_parse_examples():
    P = parse_presentation("< a, b | a^2, b^3, (a*b)^2 >")
    assert P.generators == ("a", "b")
    assert [len(r) for r in P.relators] == [2, 3, 4]
    Q = parse_presentation("<x,y|[x,y], x^-3*y>")
    assert Q.relators[0] == commutator(Word.gen(0), Word.gen(1))
    assert Q.relators[1] == Word(((0, -3), (1, 1)))


def test_parse_drops_trivial_relators():
    P = parse_presentation("< a | a*a^-1, 1, a^5 >")
    assert P.relators == (Word.gen(0, 5),)


@pytest.mark.parametrize("text,line,col", [
    ("< a, b | a^2, c >", 1, 15),
    ("< a, b |\n  a^2,\n  b^0 >", 3, 5),
    ("< a, b | a^2 ", 1, 14),
    ("< a, a | a >", 1, 6),
    ("< | a >", 1, 3),
    ("< a | a $ >", 1, 9),
])
def test_parse_errors_report_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_presentation(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_undeclared_generator_is_parse_error():
    with pytest.raises(UndeclaredGenerator):
        parse_presentation("< a | b >")


@given(st.integers(1, 3).flatmap(lambda r: st.tuples(st.just(r), st.lists(words(r), max_size=4))))
def test_format_parse_round_trip(data):
    rank, rels = data
    P = Presentation(tuple(f"g{k}" for k in range(rank)), tuple(rels))
    Q = parse_presentation(P.format())
    assert Q == P
    assert Q.digest() == P.digest()


def test_records_round_trip():
    ps = [parse_presentation("< a, b | a^2, b^3, (a*b)^2 >", name="S3"), free_group(3)]
    back = load_records(dump_records(ps))
    assert back == ps and back[0].name == "S3"


def test_magma_relations():
    rels = parse_relations("a^2 = b^3, (a, b), a*b = 1", ["a", "b"], magma=True)
    a, b = Word.gen(0), Word.gen(1)
    assert rels == [a ** 2 * (b ** 3).inverse(), commutator(a, b), a * b]


def test_word_list():
    assert parse_word_list("a; b^2 ;", ["a", "b"]) == [Word.gen(0), Word.gen(1, 2)]
    assert parse_word("a*b^-1", ["a", "b"]) == Word(((0, 1), (1, -1)))


GROUPS = [make_named_group(n) for n in ("S3", "A4", "D8", "Q8")]


@given(st.sampled_from(GROUPS), st.data())
def test_evaluate_word_is_a_homomorphism(G, data):
    imgs = [data.draw(st.sampled_from(G.elements)) for _ in range(2)]
    u, v = data.draw(words(2)), data.draw(words(2))
    deg = len(G.elements[0])
    assert evaluate_word(u * v, imgs, deg) == perm_mul(evaluate_word(u, imgs, deg), evaluate_word(v, imgs, deg))
    assert evaluate_word(u.inverse(), imgs, deg) == perm_inv(evaluate_word(u, imgs, deg))


def test_evaluate_empty_word_is_identity():
    assert evaluate_word(Word(), [(1, 0, 2)], 3) == (0, 1, 2)


@given(st.permutations(range(5)), st.integers(-7, 7))
def test_perm_pow(p, k):
    p = tuple(p)
    ref = tuple(range(5))
    for _ in range(abs(k)):
        ref = perm_mul(ref, p if k > 0 else perm_inv(p))
    assert perm_pow(p, k) == ref
