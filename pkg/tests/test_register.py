from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from fppgroups.cosets import enumerate_cosets
from fppgroups.presentation import ParseError
from fppgroups.register import (REGISTER_LABELS, Register, RegisterError, convert_magma_register,
                                format_register, import_magma, load_register, normalize_identifier,
                                parse_register, parse_register_records)

from conftest import DATA


def test_toy_register_loads(toy_register_path):
    reg = load_register(toy_register_path)
    assert len(reg) == 9
    assert [e.j for e in reg] == list(range(1, 10))
    assert reg.by_j(1).presentation.generators == ("a", "b")
    assert reg.by_j(1).name == "S3a"
    with pytest.raises(KeyError):
        reg.by_j(10)


def test_sub_entries_carry_inclusion_words():
    reg = load_register(DATA / "ambient_register.grp")
    L = reg.ambients["L"]
    for e in list(reg) + reg.auxiliary:
        assert e.ambient == "L"
        assert len(e.inclusion) == e.presentation.rank
        # the kept generators generate the declared subgroup
        assert enumerate_cosets(L, e.inclusion).table == reg.ambient_table(e).table
        # relators of the subgroup presentation hold in the ambient group
        regular = enumerate_cosets(L, [])
        for r in e.presentation.relators:
            assert regular.act(0, r.substitute(list(e.inclusion))) == 0
    assert reg.by_j(1).presentation.rank == 2 and reg.by_j(2).presentation.rank == 1
    assert reg.by_role("kernel").name == "K"
    assert reg.by_j(1).commensurability_class == "demo"


def test_native_round_trip(toy_register_path):
    reg = load_register(toy_register_path)
    again = parse_register(format_register(reg))
    assert [e.presentation for e in again] == [e.presentation for e in reg]
    amb = load_register(DATA / "ambient_register.grp")
    again = parse_register(format_register(amb))
    assert [e.presentation for e in again] == [e.presentation for e in amb]


def test_json_records(tmp_path):
    recs = [
        {"name": "L", "is_ambient": True, "generators": "a, b", "relators": "a^2, b^3, (a*b)^2"},
        {"name": "G1", "j": 1, "generators": ["x"], "relators": ["x^5"]},
        {"name": "G2", "j": 2, "ambient": "L", "subgroup": ["b"]},
    ]
    path = tmp_path / "reg.json"
    path.write_text(json.dumps(recs))
    reg = load_register(path)
    assert [e.j for e in reg] == [1, 2]
    assert enumerate_cosets(reg.by_j(2).presentation, []).index == 3
    with pytest.raises(RegisterError):
        parse_register_records(json.dumps({"name": "x"}))


@pytest.mark.parametrize("text,exc,fragment", [
    ("G1 [j=1] := < a | a^2 >;\nG3 [j=3] := < a | a^3 >;", RegisterError, "gap"),
    ("G1 [j=1] := < a | a^2 >;\nG2 [j=1] := < a | a^3 >;", RegisterError, "duplicate j"),
    ("G1 [j=1] := < a | a^2 >;\nG1 [j=2] := < a | a^3 >;", RegisterError, "duplicate entry"),
    ('G1 [j=1, identifier="p=3,{2i}"] := < a | a^2 >;', RegisterError, "does not match"),
    ("G1 [j=1] := sub< M | a >;", RegisterError, "unknown ambient"),
    ("G1 [j=x] := < a | a >;", RegisterError, "integer"),
])
def test_register_errors(text, exc, fragment):
    with pytest.raises(exc) as info:
        parse_register(text)
    assert fragment in str(info.value)


def test_duplicate_identifiers_rejected_without_label_check():
    text = 'G1 [j=1, identifier="q"] := < a | a^2 >;\nG2 [j=2, identifier=" q "] := < a | a >;'
    with pytest.raises(RegisterError, match="duplicate identifier"):
        parse_register(text, check_labels=False)


def test_identifiers_are_checked_against_the_label_table():
    ok = parse_register('G1 [j=1, identifier="p = 5, ∅, D_3"] := < a | a^2 >;')
    assert ok.by_j(1).identifier == "p = 5, ∅, D_3"
    loose = parse_register('G1 [j=1, identifier="other"] := < a | a^2 >;', check_labels=False)
    assert loose.by_j(1).identifier == "other"
    assert len(REGISTER_LABELS) == 50
    assert normalize_identifier("p=5,\\emptyset,D_3") == normalize_identifier("p = 5, ∅, D3")


def test_full_register_gets_labels():
    text = "\n".join(f"G{j} [j={j}] := < a | a^{j + 1} >;" for j in range(1, 51))
    reg = parse_register(text)
    assert reg.by_j(32).identifier == REGISTER_LABELS[32][1]
    assert reg.by_j(47).commensurability_class == "C20"


@pytest.mark.parametrize("text,line,col", [
    ("G1 [j=1] := < a | a^2 >;\nG2 [j=2] := < a | b >;", 2, 19),
    ("G1 [j=1] := < a | a^2 >;\n\n  G2 [j=2] := < a | a^3 >", 3, 3),
    ("G1 [j=1] := < a |\n   a^2, a^ >;", 2, 12),
    ("L [ambient] := < a | a^4 >;\nH [j=1] := sub< L | a^2, z >;", 2, 26),
])
def test_parse_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_register(text)
    assert (info.value.line, info.value.column) == (line, col)


@given(st.text(alphabet="<>|,;:=[]()^*-+ab12j\n#\"", max_size=60))
def test_fuzzed_input_raises_only_input_errors(text):
    try:
        parse_register(text, limit=200)
    except (ParseError, RegisterError):
        pass


MAGMA = """
// two groups in Magma syntax
F<a,b> := FreeGroup(2);
G1 := quo< F | a^2, b^3, (a*b)^2 >;
/* a second one */
G2 := Group< x, y | x^2 = y^3, (x, y) = 1, x^4 >;
"""


def test_magma_import_and_conversion():
    groups = import_magma(MAGMA)
    assert [name for name, _ in groups] == ["G1", "G2"]
    assert enumerate_cosets(groups[0][1], []).index == 6
    native = convert_magma_register(MAGMA, [1, 2])
    reg = parse_register(native)
    assert [e.presentation for e in reg] == [P for _, P in groups]
    with pytest.raises(RegisterError):
        convert_magma_register(MAGMA, [1])
    with pytest.raises(ParseError):
        import_magma("G := SomethingElse(3);")


def test_register_is_a_sequence(toy_register_path):
    reg = load_register(toy_register_path)
    assert isinstance(reg, Register)
    assert reg[0].j == 1 and len(reg.presentations) == 9
    assert reg.by_j(3).label == "3"
