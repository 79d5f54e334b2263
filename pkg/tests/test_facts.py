from __future__ import annotations

import dataclasses

from fppgroups.facts import UNVERIFIABLE, verify_c2_facts, verify_common_cover_4750
from fppgroups.register import Register, load_register, parse_register

from conftest import DATA


def test_register_without_ambients_is_unverifiable(toy_register_path):
    reg = load_register(toy_register_path)
    for report in (verify_c2_facts(reg), verify_common_cover_4750(reg)):
        assert not report.verifiable
        assert all(f.status == UNVERIFIABLE for f in report.facts)
        assert UNVERIFIABLE in report.format()


def _renumbered(reg, mapping, roles=None):
    entries = [dataclasses.replace(e, j=mapping[e.j]) for e in reg]
    aux = [dataclasses.replace(e, role=roles.get(e.name, e.role)) for e in reg.auxiliary] if roles else reg.auxiliary
    return Register(entries, reg.ambients, aux)


def test_common_cover_on_a_toy_ambient():
    # S3 x Z6: the trivial subgroup is the unique S3 cover of S3 that is a Z/6 cover of Z6
    reg = _renumbered(load_register(DATA / "ambient_register.grp"), {1: 47, 2: 48})
    report = verify_common_cover_4750(reg)
    first, second = report.facts
    assert first.status == "pass", first.detail
    assert first.data == {"s3_covers": 1, "common": 1}
    assert second.status == UNVERIFIABLE


def test_common_cover_fails_when_the_cover_is_not_contained():
    text = """L [ambient] := < a, b, c | a^2, b^3, (a*b)^2, c^6, [a,c], [b,c] >;
    A [j=1] := sub< L | a, b >;
    B [j=2] := sub< L | c^2 >;
    """
    reg = _renumbered(parse_register(text), {1: 47, 2: 48})
    first = verify_common_cover_4750(reg).facts[0]
    assert first.status == "fail"
    assert first.data["common"] == 0


def test_index_three_facts_run_on_a_toy_ambient():
    # Z/63: the index-3 subgroup <x^3> = Z/21 has the unique Z/21 quotient and its unique
    # normal index-3 subgroup is <x^9>; the two intersections with <x^9> differ, so the
    # last fact must fail rather than be skipped
    text = """L [ambient] := < x | x^63 >;
    GB [role="C2:GammaBar"] := sub< L | x^3 >;
    G1 [j=1] := sub< L | x^9 >;
    G2 [j=2] := sub< L | x^3 >;
    G3 [j=3] := sub< L | x^7 >;
    """
    reg = _renumbered(parse_register(text), {1: 32, 2: 34, 3: 35})
    report = verify_c2_facts(reg)
    a, b, c = report.facts
    assert a.status == "pass", a.detail
    assert b.status == "pass", b.detail
    assert c.status == "fail"
    assert c.data == {"intersections_equal": False}
    assert report.verifiable and not report.passed


def test_index_three_structure_checks_in_an_abelian_ambient():
    # equal intersections, but every subgroup of an abelian group is normal
    text = """L [ambient] := < x, y | x^9, y^9, [x, y] >;
    GB [role="C2:GammaBar"] := sub< L | x^3, y >;
    G1 [j=1] := sub< L | x^3, y^3 >;
    G2 [j=2] := sub< L | x, y^3 >;
    G3 [j=3] := sub< L | x*y^3, y^3 >;
    """
    reg = _renumbered(parse_register(text), {1: 32, 2: 34, 3: 35})
    c = verify_c2_facts(reg).facts[2]
    assert c.status == "fail"
    assert c.data["intersections_equal"] and c.data["normal_in_34_35"]
    assert not c.data["not_normal_in_32"]
