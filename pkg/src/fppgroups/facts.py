"""Verifiers for subgroup-lattice facts inside an ambient group.

Both verifiers need ambient presentations and subgroup words in the register;
without them every fact is reported as unverifiable instead of guessed.

Register roles used:

* ``C2:LambdaBar`` is the name of an ambient group (``[ambient]`` entry) and
  ``C2:GammaBar`` a ``sub<...>`` entry of it; the numbered entries 32, 34
  and 35 must be ``sub<...>`` entries of the same ambient group.
* entries 47, 48 (and 49, 50) must be ``sub<...>`` entries of one ambient group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .census import count_homomorphisms
from .cosets import (DEFAULT_LIMIT, CosetTable, enumerate_cosets, intersect_tables, is_normal,
                     subgroup_contains)
from .finite_groups import FiniteGroup, cyclic_group, symmetric_group
from .lowindex import low_index_subgroups
from .presentation import Presentation
from .register import Register, RegisterEntry
from .rewriting import RewrittenPresentation, reidemeister_schreier
from .words import Word

UNVERIFIABLE = "unverifiable with provided register"


@dataclass
class FactResult:
    name: str
    status: str              # "pass", "fail" or UNVERIFIABLE
    detail: str = ""
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class FactReport:
    title: str
    facts: list[FactResult]

    @property
    def verifiable(self) -> bool:
        return all(f.status != UNVERIFIABLE for f in self.facts)

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.facts)

    def format(self) -> str:
        lines = [self.title]
        for f in self.facts:
            lines.append(f"  {f.name}: {f.status}" + (f" ({f.detail})" if f.detail else ""))
        return "\n".join(lines)


def _unverifiable(title: str, names: list[str], why: str) -> FactReport:
    return FactReport(title, [FactResult(n, UNVERIFIABLE, why) for n in names])


def _sub_table_in(parent: RewrittenPresentation, child_words: list[Word], limit: int) -> CosetTable:
    """Table of a subgroup (given by ambient words) inside ``parent``'s own presentation."""
    words = [parent.rewrite(w) for w in child_words]
    return enumerate_cosets(parent.presentation, words, limit)


def _epi_count(P: Presentation, Q: FiniteGroup):
    return count_homomorphisms(P, Q)


def _simplified(R: RewrittenPresentation) -> Presentation:
    from .rewriting import tietze_simplify
    return tietze_simplify(R.presentation)


def _entry_words(reg: Register, e: RegisterEntry | None, amb: str) -> list[Word] | None:
    if e is None or e.ambient != amb:
        return None
    return list(e.subgroup_words)


def verify_c2_facts(reg: Register, *, limit: int = DEFAULT_LIMIT) -> FactReport:
    title = "index-3 facts in the ambient lattice of entries 32, 34, 35"
    names = ["a: unique index-3 class with a Z/21 quotient",
             "b: unique normal index-3 subgroup of the middle group",
             "c: intersection subgroup and its S3 quotients"]
    amb_entry = None
    gbar = reg.by_role("C2:GammaBar")
    if gbar is not None and gbar.ambient is not None:
        amb_entry = gbar.ambient
    if amb_entry is None or amb_entry not in reg.ambients:
        return _unverifiable(title, names, "no ambient group with a C2:GammaBar subgroup")
    L = reg.ambients[amb_entry]
    results: list[FactResult] = []

    # Fact a
    z21 = cyclic_group(21)
    classes = [c for c in low_index_subgroups(L, 3) if c.index == 3]
    hits = []
    for c in classes:
        prof = _epi_count(_simplified(reidemeister_schreier(c.table)), z21)
        if prof.epi_count:
            hits.append(c)
    gbar_T = enumerate_cosets(L, gbar.subgroup_words, limit)
    same = len(hits) == 1 and _conjugate(hits[0].table, gbar_T)
    results.append(FactResult(names[0], "pass" if same else "fail",
                              f"{len(classes)} index-3 classes, {len(hits)} with a Z/21 quotient"
                              + ("" if same or len(hits) != 1 else "; it is not the declared subgroup"),
                              {"index3_classes": len(classes), "z21_classes": len(hits)}))

    # Fact b
    R_gbar = reidemeister_schreier(gbar_T)
    G_gbar = _simplified(R_gbar)
    normal3 = [c for c in low_index_subgroups(G_gbar, 3, normal_only=True) if c.index == 3]
    w32 = _entry_words(reg, _maybe(reg, 32), amb_entry)
    detail = f"{len(normal3)} normal index-3 subgroups"
    ok_b = len(normal3) == 1
    if w32 is not None and ok_b:
        T32 = _sub_table_in(R_gbar, w32, limit)
        ok_b = T32.index == 3 and is_normal(T32)
        detail += "; entry 32 is " + ("" if ok_b else "not ") + "that subgroup"
    elif w32 is None:
        detail += "; entry 32 has no inclusion words"
    results.append(FactResult(names[1], "pass" if ok_b else "fail", detail, {"normal_index3": len(normal3)}))

    # Fact c
    w34 = _entry_words(reg, _maybe(reg, 34), amb_entry)
    w35 = _entry_words(reg, _maybe(reg, 35), amb_entry)
    if w32 is None or w34 is None or w35 is None:
        results.append(FactResult(names[2], UNVERIFIABLE, "entries 32, 34, 35 need sub<> words in the ambient group"))
        return FactReport(title, results)
    T32 = enumerate_cosets(L, w32, limit)
    T34 = enumerate_cosets(L, w34, limit)
    T35 = enumerate_cosets(L, w35, limit)
    D1 = intersect_tables(T32, T34, limit)
    D2 = intersect_tables(T32, T35, limit)
    checks = {"intersections_equal": D1 == D2}
    if not checks["intersections_equal"]:
        results.append(FactResult(names[2], "fail", f"intersections have index {D1.index} and {D2.index}",
                                  checks))
        return FactReport(title, results)
    delta_words = list(D1.subgroup_words)
    R32, R34, R35 = (reidemeister_schreier(T) for T in (T32, T34, T35))
    in32, in34, in35 = (_sub_table_in(R, delta_words, limit) for R in (R32, R34, R35))
    checks["index_3_in_34_35"] = in34.index == 3 and in35.index == 3
    checks["normal_in_34_35"] = is_normal(in34) and is_normal(in35)
    checks["not_normal_in_32"] = in32.index == 3 and not is_normal(in32)
    # which index-3 classes of entry 32 carry four S3 homomorphisms, under both readings
    P32 = _simplified(R32)
    s3 = symmetric_group(3)
    classes32 = [c for c in low_index_subgroups(P32, 3) if c.index == 3]
    delta_in_P32 = _sub_table_in_presentation(P32, R32, delta_words, limit)
    epi4, quo4 = [], []
    delta_class = None
    for k, c in enumerate(classes32):
        prof = count_homomorphisms(_simplified(reidemeister_schreier(c.table)), s3)
        if prof.epi_count == 4:
            epi4.append(k)
        if prof.quotient_count == 4:
            quo4.append(k)
        if delta_in_P32 is not None and _conjugate(c.table, delta_in_P32):
            delta_class = k
    checks["unique_four_epimorphisms"] = epi4 == [delta_class]
    checks["unique_four_quotients"] = quo4 == [delta_class]
    structural = all(v for k, v in checks.items() if not k.startswith("unique_"))
    reading = ("kernel count" if checks["unique_four_quotients"] else
               "epimorphism count" if checks["unique_four_epimorphisms"] else "neither")
    ok_c = structural and reading != "neither"
    results.append(FactResult(names[2], "pass" if ok_c else "fail",
                              f"structure {'ok' if structural else 'fails'}; four-S3 uniqueness holds "
                              f"under reading: {reading}", checks))
    return FactReport(title, results)


def _sub_table_in_presentation(P: Presentation, R: RewrittenPresentation, words: list[Word],
                               limit: int) -> CosetTable | None:
    """Table of ambient-word subgroup inside the simplified presentation ``P`` of ``R``.

    ``P`` keeps a subset of ``R``'s generators by name; words are rewritten in
    ``R`` and then restated over ``P`` when every generator they use survives.
    """
    keep = {name: k for k, name in enumerate(P.generators)}
    src = R.presentation.generators
    out = []
    for w in words:
        rw = R.rewrite(w)
        syl = []
        for g, e in rw.syllables:
            k = keep.get(src[g])
            if k is None:
                return None
            syl.append((k, e))
        out.append(Word(tuple(syl)))
    return enumerate_cosets(P, out, limit)


def _conjugate(A: CosetTable, B: CosetTable) -> bool:
    from .cosets import conjugate_tables
    return A.index == B.index and B.table in conjugate_tables(A)


def _maybe(reg: Register, j: int) -> RegisterEntry | None:
    try:
        return reg.by_j(j)
    except KeyError:
        return None


def verify_common_cover_4750(reg: Register, *, limit: int = DEFAULT_LIMIT) -> FactReport:
    title = "common S3 / Z6 cover of entries 47-48 and 49-50"
    names = [f"{a}/{b}: unique S3 cover of {a} that is a Z/6 cover of {b}" for a, b in ((47, 48), (49, 50))]
    results = []
    for (a, b), name in zip(((47, 48), (49, 50)), names):
        ea, eb = _maybe(reg, a), _maybe(reg, b)
        if ea is None or eb is None or ea.ambient is None or ea.ambient != eb.ambient:
            results.append(FactResult(name, UNVERIFIABLE, f"entries {a} and {b} need a common ambient group"))
            continue
        L = reg.ambients[ea.ambient]
        Ta = enumerate_cosets(L, ea.subgroup_words, limit)
        Tb = enumerate_cosets(L, eb.subgroup_words, limit)
        Ra, Rb = reidemeister_schreier(Ta), reidemeister_schreier(Tb)
        Pa = _simplified(Ra)
        s3_normal = []
        index6 = low_index_subgroups(Pa, 6)
        for c in index6:
            if c.index == 6 and c.normal and _quotient_kind(c.table) == "S3":
                s3_normal.append(c)
        common = []
        for c in s3_normal:
            amb_words = _ambient_words(c.table, Pa, Ra)
            if amb_words is None:
                continue
            if not subgroup_contains(Tb, amb_words):
                continue
            Tin_b = _sub_table_in(Rb, amb_words, limit)
            if Tin_b.index == 6 and is_normal(Tin_b) and _quotient_kind(Tin_b) == "Z6":
                common.append(c)
        ok = len(s3_normal) >= 1 and len(common) == 1
        results.append(FactResult(name, "pass" if ok else "fail",
                                  f"{len(index6)} index<=6 classes, {len(s3_normal)} normal with quotient S3, "
                                  f"{len(common)} also normal in {b} with quotient Z/6",
                                  {"s3_covers": len(s3_normal), "common": len(common)}))
    return FactReport(title, results)


def _quotient_kind(T: CosetTable) -> str:
    """Name of the quotient for a normal subgroup of index 6 (``S3`` or ``Z6``)."""
    G = FiniteGroup("quotient", [T.perm(g) for g in range(T.presentation.rank)], T.index)
    if G.order != 6:
        return f"order {G.order}"
    return "Z6" if G.is_abelian() else "S3"


def _ambient_words(T: CosetTable, P: Presentation, R: RewrittenPresentation) -> list[Word] | None:
    """Subgroup words of ``T`` (over the simplified ``P``) restated in the ambient group."""
    index_of = {name: k for k, name in enumerate(R.presentation.generators)}
    gens = []
    for name in P.generators:
        k = index_of.get(name)
        if k is None:
            return None
        gens.append(R.generator_word(k))
    return [w.substitute(gens) for w in T.subgroup_words]
