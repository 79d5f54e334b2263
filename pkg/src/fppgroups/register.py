"""Register files: numbered presentations with labels, ambient groups and
subgroup entries given by words in an ambient group.

Native format, one statement per ``;``::

    # comment
    Gamma1 [j=1, identifier="p=5,∅,D_3", class="a=1"] := < a, b | a^3, ... >;
    LambdaBar [ambient] := < x, y | ... >;
    Gamma32 [j=32, class="C2"] := sub< LambdaBar | x*y, y^3 >;
    GammaBar [role="C2:GammaBar"] := sub< LambdaBar | ... >;

Entries carrying ``j`` are the numbered groups; they must be numbered
``1..N`` without gaps.  ``sub<...>`` entries are presented by rewriting
and remember the ambient word of each of their generators.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from .cosets import DEFAULT_LIMIT, CosetTable, enumerate_cosets
from .presentation import ParseError, Presentation, parse_presentation, parse_relations, parse_word
from .rewriting import reidemeister_schreier, tietze_reduce
from .words import Word


class RegisterError(ValueError):
    pass


# j -> (commensurability class, identifier)
REGISTER_LABELS: dict[int, tuple[str, str]] = {
    1: ("a=1", "p=5,∅,D_3"), 2: ("a=1", "p=5,{2},D_3"), 3: ("a=1", "p=5,{2i}"),
    4: ("a=2", "p=3,∅,D_3"), 5: ("a=2", "p=3,{2},D_3"), 6: ("a=2", "p=3,{2i}"),
    7: ("a=7", "p=2,∅,D_3 2_7"), 8: ("a=7", "p=2,∅,7_21"), 9: ("a=7", "p=2,∅,D_3 X_7"),
    10: ("a=7", "p=2,{7},D_3 2_7"), 11: ("a=7", "p=2,{7},D_3 7_7"), 12: ("a=7", "p=2,{7},D_3 7'_7"),
    13: ("a=7", "p=2,{7},7_21"), 14: ("a=7", "p=2,{3},D_3"), 15: ("a=7", "p=2,{3},3_3"),
    16: ("a=7", "p=2,{3,7},D_3"), 17: ("a=7", "p=2,{3,7},3_3"), 18: ("a=7", "p=2,{5}"),
    19: ("a=7", "p=2,{5,7}"),
    20: ("a=15", "p=2,∅,D_3"), 21: ("a=15", "p=2,∅,3_3"), 22: ("a=15", "p=2,{3},D_3"),
    23: ("a=15", "p=2,{3},3_3"), 24: ("a=15", "p=2,{3},(D3)_3"), 25: ("a=15", "p=2,{5},D_3"),
    26: ("a=15", "p=2,{5},3_3"), 27: ("a=15", "p=2,{3,5},D_3"), 28: ("a=15", "p=2,{3,5},3_3"),
    29: ("a=15", "p=2,{3,5},(D3)_3"),
    30: ("a=23", "p=2,∅"), 31: ("a=23", "p=2,{23}"),
    32: ("C2", "p=2,∅,d_3 D_3"), 33: ("C2", "p=2,∅,D_3 X_3"), 34: ("C2", "p=2,∅,(dD)_3 X_3"),
    35: ("C2", "p=2,∅,(d^2D)_3 X_3"), 36: ("C2", "p=2,∅,d_3 X'_3"), 37: ("C2", "p=2,∅,X_9"),
    38: ("C2", "p=2,{3},d_3 D_3"),
    39: ("C10", "p=2,∅,D_3"), 40: ("C10", "p=2,{17-},D_3"),
    41: ("C18", "p=3,∅,d_3 D_3"), 42: ("C18", "p=3,{2},D_3"), 43: ("C18", "p=3,{2},(dD)_3"),
    44: ("C18", "p=3,{2},(d^2D)_3"), 45: ("C18", "p=3,{2i}"),
    46: ("C20", "p=2,∅,D_3 2_7"), 47: ("C20", "p=2,{3+},D_3"), 48: ("C20", "p=2,{3+},(3+)_3"),
    49: ("C20", "p=2,{3-},D_3"), 50: ("C20", "p=2,{3-},(3-)_3"),
}
FULL_REGISTER_SIZE = 50


def normalize_identifier(s: str) -> str:
    """Spelling-insensitive form of a register identifier."""
    s = s.replace("\\emptyset", "∅").replace("emptyset", "∅").replace("{}", "∅")
    s = re.sub(r"\^\{?\\prime\}?|′", "'", s)
    s = re.sub(r"\\,|\\quad|\$|\s|_|\{|\}", "", s)
    return s


@dataclass(frozen=True)
class RegisterEntry:
    j: int | None
    identifier: str
    presentation: Presentation
    commensurability_class: str = ""
    name: str = ""
    ambient: str | None = None
    subgroup_words: tuple[Word, ...] = ()
    inclusion: tuple[Word, ...] = ()      # ambient word of each presentation generator
    role: str = ""
    attrs: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def label(self) -> str:
        return f"{self.j}" if not self.identifier else f"{self.j} ({self.identifier})"


class Register(Sequence[RegisterEntry]):
    """Numbered entries sorted by ``j`` plus ambient groups and auxiliary subgroups."""

    def __init__(self, entries: Sequence[RegisterEntry], ambients: dict[str, Presentation],
                 auxiliary: Sequence[RegisterEntry] = (), source: str = ""):
        self.entries = sorted(entries, key=lambda e: e.j)
        self.ambients = dict(ambients)
        self.auxiliary = list(auxiliary)
        self.source = source

    def __getitem__(self, i):
        return self.entries[i]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[RegisterEntry]:
        return iter(self.entries)

    def by_j(self, j: int) -> RegisterEntry:
        for e in self.entries:
            if e.j == j:
                return e
        raise KeyError(j)

    def by_role(self, role: str) -> RegisterEntry | None:
        for e in self.auxiliary + self.entries:
            if e.role == role:
                return e
        return None

    def ambient_table(self, entry: RegisterEntry, limit: int = DEFAULT_LIMIT) -> CosetTable:
        if entry.ambient is None:
            raise RegisterError(f"{entry.name} has no ambient group")
        return enumerate_cosets(self.ambients[entry.ambient], entry.subgroup_words, limit)

    @property
    def presentations(self) -> list[Presentation]:
        return [e.presentation for e in self.entries]


# ---------------------------------------------------------------------------
# native format

_STMT = re.compile(r"^\s*(?P<name>[A-Za-z_]\w*)\s*(?:\[(?P<attrs>[^\]]*)\])?\s*:=\s*(?P<body>.*)$", re.S)
_ATTR = re.compile(r'\s*(?P<key>[A-Za-z_]\w*)\s*(?:=\s*(?P<val>"(?:[^"\\]|\\.)*"|[^,\s]+))?\s*(?:,|$)')
_SUB = re.compile(r"^sub\s*<\s*(?P<amb>[A-Za-z_]\w*)\s*\|(?P<words>.*)>$", re.S)


def _strip_comments(text: str) -> str:
    return re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)


def _linecol(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def _split_statements(text: str) -> list[tuple[str, int]]:
    """Split on ``;`` outside brackets; returns (statement, offset) pairs."""
    out = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch in "<([":
            depth += 1
        elif ch in ">)]":
            depth -= 1
        elif ch == ";" and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    if text[start:].strip():
        lead = len(text[start:]) - len(text[start:].lstrip())
        raise ParseError("missing ';' after last entry", *_linecol(text, start + lead))
    return out


def _parse_attrs(text: str, line: int) -> dict[str, str | bool]:
    out: dict[str, str | bool] = {}
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _ATTR.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"bad attribute list {text!r}", line)
        val = m["val"]
        if val is None:
            out[m["key"]] = True
        elif val.startswith('"'):
            out[m["key"]] = json.loads(val)
        else:
            out[m["key"]] = val
        pos = m.end()
    return out


def _make_entry(name: str, attrs: dict, pres: Presentation | None, amb: str | None,
                words: Sequence[Word], ambients: dict[str, Presentation], limit: int,
                line: int) -> RegisterEntry:
    j = attrs.get("j")
    if j is not None:
        try:
            j = int(j)
        except (TypeError, ValueError):
            raise RegisterError(f"line {line}: j must be an integer, got {j!r}") from None
    inclusion: tuple[Word, ...] = ()
    if pres is None:
        if amb not in ambients:
            raise RegisterError(f"line {line}: unknown ambient group {amb!r}")
        T = enumerate_cosets(ambients[amb], words, limit)
        R = reidemeister_schreier(T)
        tz = tietze_reduce(R.presentation)
        pres = Presentation(tz.presentation.generators, tz.presentation.relators, name)
        inclusion = tuple(R.generator_word(k) for k in tz.kept)
    return RegisterEntry(j, str(attrs.get("identifier", "")), pres, str(attrs.get("class", "")),
                         name, amb, tuple(words), inclusion, str(attrs.get("role", "")), dict(attrs))


def parse_register(text: str, *, limit: int = DEFAULT_LIMIT, check_labels: bool = True,
                   source: str = "") -> Register:
    clean = _strip_comments(text)
    ambients: dict[str, Presentation] = {}
    numbered: list[RegisterEntry] = []
    aux: list[RegisterEntry] = []
    names = set()
    for stmt, off in _split_statements(clean):
        if not stmt.strip():
            continue
        lead = len(stmt) - len(stmt.lstrip())
        line, col = _linecol(clean, off + lead)
        m = _STMT.match(stmt)
        if not m:
            raise ParseError("expected 'name [attributes] := < ... >'", line, col)
        name = m["name"]
        if name in names:
            raise RegisterError(f"line {line}: duplicate entry name {name!r}")
        names.add(name)
        attrs = _parse_attrs(m["attrs"] or "", line)
        body = m["body"].strip()
        body_off = off + m.start("body") + (len(m["body"]) - len(m["body"].lstrip()))
        body_line, body_col = _linecol(clean, body_off)
        sm = _SUB.match(body)
        if sm:
            amb = sm["amb"]
            if amb not in ambients:
                raise RegisterError(f"line {line}: unknown ambient group {amb!r}")
            wl, wc = _linecol(clean, body_off + sm.start("words"))
            words = parse_relations(sm["words"], ambients[amb].generators, line=wl, column=wc)
            entry = _make_entry(name, attrs, None, amb, words, ambients, limit, line)
        else:
            pres = parse_presentation(body, name=name, line=body_line, column=body_col)
            if attrs.get("ambient"):
                ambients[name] = pres
                continue
            entry = _make_entry(name, attrs, pres, None, (), ambients, limit, line)
        (numbered if entry.j is not None else aux).append(entry)
    _validate(numbered, check_labels)
    if check_labels and len(numbered) == FULL_REGISTER_SIZE:
        numbered = [_fill_labels(e) for e in numbered]
    return Register(numbered, ambients, aux, source)


def _fill_labels(e: RegisterEntry) -> RegisterEntry:
    cls, ident = REGISTER_LABELS[e.j]
    return RegisterEntry(e.j, e.identifier or ident, e.presentation, e.commensurability_class or cls,
                         e.name, e.ambient, e.subgroup_words, e.inclusion, e.role, e.attrs)


def _validate(entries: Sequence[RegisterEntry], check_labels: bool) -> None:
    seen: dict[int, str] = {}
    for e in entries:
        if e.j in seen:
            raise RegisterError(f"duplicate j = {e.j} ({seen[e.j]} and {e.name})")
        seen[e.j] = e.name
    js = sorted(seen)
    if js and js != list(range(1, len(js) + 1)):
        missing = sorted(set(range(1, max(js) + 1)) - set(js))
        if missing:
            raise RegisterError(f"numbering gap: missing j = {missing}")
        raise RegisterError(f"numbering must start at 1, got {js[0]}")
    idents: dict[tuple[str, str], int] = {}
    for e in entries:
        if not e.identifier:
            continue
        key = (e.commensurability_class, normalize_identifier(e.identifier))
        if key in idents:
            raise RegisterError(f"duplicate identifier {e.identifier!r} (j = {idents[key]} and {e.j})")
        idents[key] = e.j
        if check_labels and e.j in REGISTER_LABELS:
            cls, ident = REGISTER_LABELS[e.j]
            if normalize_identifier(ident) != normalize_identifier(e.identifier):
                raise RegisterError(f"j = {e.j}: identifier {e.identifier!r} does not match {ident!r}")
            if e.commensurability_class and e.commensurability_class != cls:
                raise RegisterError(f"j = {e.j}: class {e.commensurability_class!r} does not match {cls!r}")


# ---------------------------------------------------------------------------
# structured records

def parse_register_records(text: str, *, limit: int = DEFAULT_LIMIT, check_labels: bool = True,
                           source: str = "") -> Register:
    """JSON list of objects with ``name`` plus either ``generators``/``relators``
    or ``ambient``/``subgroup``; optional ``j``, ``identifier``, ``class``,
    ``role`` and ``is_ambient``."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise RegisterError("register records must be a JSON list")
    ambients: dict[str, Presentation] = {}
    numbered, aux = [], []
    for k, rec in enumerate(data, 1):
        if not isinstance(rec, dict) or "name" not in rec:
            raise RegisterError(f"record {k}: expected an object with a 'name'")
        attrs = {key: rec[key] for key in ("j", "identifier", "class", "role") if key in rec}
        if "subgroup" in rec:
            amb = rec.get("ambient")
            if amb not in ambients:
                raise RegisterError(f"record {k}: unknown ambient group {amb!r}")
            words = rec["subgroup"]
            if isinstance(words, str):
                words = [words]
            ws = [parse_word(w, ambients[amb].generators) for w in words]
            entry = _make_entry(rec["name"], attrs, None, amb, ws, ambients, limit, k)
        else:
            pres = Presentation.from_record(rec)
            if rec.get("is_ambient"):
                ambients[rec["name"]] = pres
                continue
            entry = _make_entry(rec["name"], attrs, pres, None, (), ambients, limit, k)
        (numbered if entry.j is not None else aux).append(entry)
    _validate(numbered, check_labels)
    if check_labels and len(numbered) == FULL_REGISTER_SIZE:
        numbered = [_fill_labels(e) for e in numbered]
    return Register(numbered, ambients, aux, source)


def load_register(path: str | Path, **kw) -> Register:
    """Load a register file (``.json`` as records, anything else as native text)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return parse_register_records(text, source=str(path), **kw)
    return parse_register(text, source=str(path), **kw)


def format_register(reg: Register) -> str:
    """Native text for a register (subgroup entries are written as their presentations)."""
    lines = []
    for name, P in reg.ambients.items():
        lines.append(f"{name} [ambient] := {P.format()};")
    for e in list(reg.auxiliary) + list(reg.entries):
        attrs = []
        if e.j is not None:
            attrs.append(f"j={e.j}")
        if e.identifier:
            attrs.append(f"identifier={json.dumps(e.identifier, ensure_ascii=False)}")
        if e.commensurability_class:
            attrs.append(f"class={json.dumps(e.commensurability_class, ensure_ascii=False)}")
        if e.role:
            attrs.append(f"role={json.dumps(e.role, ensure_ascii=False)}")
        name = e.name or f"G{e.j}"
        head = f"{name} [{', '.join(attrs)}]" if attrs else name
        if e.ambient is not None:
            amb = reg.ambients[e.ambient]
            body = f"sub< {e.ambient} | {', '.join(amb.format_word(w) for w in e.subgroup_words)} >"
        else:
            body = e.presentation.format()
        lines.append(f"{head} := {body};")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Magma-style import

_MAGMA_FREE = re.compile(r"^(?P<var>[A-Za-z_]\w*)\s*<(?P<gens>[^>]*)>\s*:=\s*FreeGroup\s*\(\s*(?P<n>\d+)\s*\)$", re.S)
_MAGMA_QUO = re.compile(r"^(?P<var>[A-Za-z_]\w*)\s*(?:<(?P<gens>[^>]*)>)?\s*:=\s*quo\s*<\s*(?P<free>[A-Za-z_]\w*)\s*\|(?P<rels>.*)>$", re.S)
_MAGMA_GROUP = re.compile(r"^(?P<var>[A-Za-z_]\w*)\s*(?:<[^>]*>)?\s*:=\s*Group\s*<(?P<gens>[^|]*)\|(?P<rels>.*)>$", re.S)


def import_magma(text: str) -> list[tuple[str, Presentation]]:
    """Read ``F<a,b> := FreeGroup(2);``, ``G := quo< F | ... >;`` and
    ``G := Group< a, b | ... >;`` statements.  Relations may use ``u = v``
    and ``(u, v)`` commutators.  Any other statement is an error."""
    clean = re.sub(r"/\*.*?\*/", lambda m: re.sub(r"[^\n]", " ", m.group()), text, flags=re.S)
    clean = re.sub(r"//[^\n]*", lambda m: " " * len(m.group()), clean)
    free: dict[str, tuple[str, ...]] = {}
    out: list[tuple[str, Presentation]] = []
    for stmt, off in _split_statements(clean):
        s = stmt.strip()
        if not s:
            continue
        sline, _ = _linecol(clean, off + len(stmt) - len(stmt.lstrip()))
        m = _MAGMA_FREE.match(s)
        if m:
            gens = tuple(g.strip() for g in m["gens"].split(",") if g.strip())
            if len(gens) != int(m["n"]):
                raise ParseError(f"FreeGroup({m['n']}) declares {len(gens)} names", sline, 1)
            free[m["var"]] = gens
            continue
        m = _MAGMA_QUO.match(s)
        if m:
            if m["free"] not in free:
                raise ParseError(f"quo over undeclared free group {m['free']!r}", sline, 1)
            gens = free[m["free"]]
            rels = parse_relations(m["rels"], gens, magma=True, line=sline)
            out.append((m["var"], Presentation(gens, tuple(rels), m["var"])))
            continue
        m = _MAGMA_GROUP.match(s)
        if m:
            gens = tuple(g.strip() for g in m["gens"].split(",") if g.strip())
            rels = parse_relations(m["rels"], gens, magma=True, line=sline)
            out.append((m["var"], Presentation(gens, tuple(rels), m["var"])))
            continue
        raise ParseError(f"unrecognized statement {s[:40]!r}", sline, 1)
    return out


def convert_magma_register(text: str, numbering: Sequence[int] | None = None) -> str:
    """Lower imported presentations to native register text.

    ``numbering`` assigns ``j`` to the imported groups in order; without it the
    entries are numbered by order of appearance.
    """
    groups = import_magma(text)
    if numbering is not None and len(numbering) != len(groups):
        raise RegisterError(f"{len(numbering)} numbers given for {len(groups)} groups")
    lines = []
    for k, (name, P) in enumerate(groups):
        j = numbering[k] if numbering is not None else k + 1
        lines.append(f"{name} [j={j}] := {P.format()};")
    return "\n".join(lines) + "\n"
