"""Finite presentations and the native text grammar.

Grammar::

    presentation := '<' gens '|' [ word { ',' word } ] '>'
    gens         := name { ',' name }
    word         := factor { '*' factor }
    factor       := atom [ '^' int ]
    atom         := name | '1' | '(' word ')' | '[' word ',' word ']'

``[u, v]`` is the commutator ``u^-1 v^-1 u v``.  Whitespace and ``#``
comments are ignored.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .words import Word, commutator


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        loc = f"line {line}, column {column}: " if line else ""
        super().__init__(loc + message)


class UndeclaredGenerator(ParseError):
    pass


@dataclass(frozen=True)
class GeneratorSymbol:
    name: str
    index: int


@dataclass(frozen=True)
class Presentation:
    """Generators plus relator words.  Relators are stored freely reduced;
    trivial relators are dropped."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise ValueError(f"duplicate generator names in {gens}")
        rels = tuple(Word(r.syllables) for r in self.relators)
        for r in rels:
            for g in r.generators():
                if g >= len(gens):
                    raise ValueError(f"relator uses undeclared generator index {g}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(r for r in rels if r))

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def symbols(self) -> list[GeneratorSymbol]:
        return [GeneratorSymbol(n, i) for i, n in enumerate(self.generators)]

    def format_word(self, w: Word) -> str:
        return w.format(self.generators)

    def format(self) -> str:
        rels = ", ".join(self.format_word(r) for r in self.relators)
        return f"< {', '.join(self.generators)} | {rels} >"

    __str__ = format

    def parse_word(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def with_relators(self, extra: Iterable[Word], name: str | None = None) -> "Presentation":
        return Presentation(self.generators, self.relators + tuple(extra),
                            self.name if name is None else name)

    def digest(self) -> str:
        """Content hash of generators and relators (name excluded)."""
        return hashlib.sha256(self.format().encode()).hexdigest()

    def to_record(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "generators": ", ".join(self.generators),
            "relators": ", ".join(self.format_word(r) for r in self.relators),
        }

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "Presentation":
        gens = rec["generators"]
        rels = rec.get("relators", "")
        if not isinstance(gens, str):
            gens = ", ".join(gens)
        if not isinstance(rels, str):
            rels = ", ".join(rels)
        return parse_presentation(f"< {gens} | {rels} >", name=rec.get("name", ""))


def free_group(rank: int, prefix: str = "x") -> Presentation:
    if rank <= 26 and prefix == "x":
        names = [chr(ord("a") + i) for i in range(rank)]
    else:
        names = [f"{prefix}{i}" for i in range(rank)]
    return Presentation(tuple(names), (), name=f"F{rank}")


# --------------------------------------------------------------------------
# tokenizer / parser

_TOKEN = re.compile(
    r"(?P<ws>\s+|\#[^\n]*)"
    r"|(?P<int>[+-]?\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>[<>|,*^()\[\]=])"
)


def _tokenize(text: str, line0: int = 1, col0: int = 1) -> list[tuple[str, str, int, int]]:
    toks = []
    pos, line, lstart = 0, line0, -col0 + 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - lstart + 1)
        kind = m.lastgroup
        val = m.group()
        if kind == "ws":
            nl = val.count("\n")
            if nl:
                line += nl
                lstart = pos + val.rindex("\n") + 1
        else:
            toks.append((kind, val, line, pos - lstart + 1))
        pos = m.end()
    toks.append(("eof", "", line, pos - lstart + 1))
    return toks


class _Parser:
    def __init__(self, tokens, generators: Sequence[str] | None = None, magma: bool = False):
        self.toks = tokens
        self.i = 0
        self.magma = magma
        self.gen_index = {g: k for k, g in enumerate(generators or ())}

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        t = self.toks[self.i]
        if (kind and t[0] != kind) or (val is not None and t[1] != val):
            want = val if val is not None else kind
            got = t[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", t[2], t[3])
        self.i += 1
        return t

    def at(self, val):
        t = self.toks[self.i]
        return t[0] == "sym" and t[1] == val

    def presentation(self, name=""):
        self.take("sym", "<")
        gens = []
        if self.at("|"):
            t = self.peek()
            raise ParseError("empty generator list", t[2], t[3])
        while True:
            t = self.take("name")
            if t[1] in self.gen_index:
                raise ParseError(f"duplicate generator {t[1]!r}", t[2], t[3])
            self.gen_index[t[1]] = len(gens)
            gens.append(t[1])
            if self.at(","):
                self.take()
                continue
            break
        self.take("sym", "|")
        rels = []
        if not self.at(">"):
            while True:
                rels.append(self.word())
                if self.at(","):
                    self.take()
                    continue
                break
        self.take("sym", ">")
        return Presentation(tuple(gens), tuple(rels), name)

    def relation(self) -> Word:
        """A word, or ``u = v`` read as ``u * v^-1`` when equations are allowed."""
        w = self.word()
        if self.magma and self.at("="):
            self.take()
            w = w * self.word().inverse()
        return w

    def word(self) -> Word:
        w = self.factor()
        while self.at("*"):
            self.take()
            w = w * self.factor()
        return w

    def factor(self) -> Word:
        w = self.atom()
        if self.at("^"):
            self.take()
            t = self.take("int")
            k = int(t[1])
            if k == 0:
                raise ParseError("exponent must be nonzero", t[2], t[3])
            w = w ** k
        return w

    def atom(self) -> Word:
        t = self.peek()
        if t[0] == "name":
            self.take()
            if t[1] not in self.gen_index:
                raise UndeclaredGenerator(f"undeclared generator {t[1]!r}", t[2], t[3])
            return Word.gen(self.gen_index[t[1]])
        if t[0] == "int" and t[1] == "1":
            self.take()
            return Word()
        if self.at("("):
            self.take()
            w = self.word()
            if self.magma and self.at(","):
                self.take()
                v = self.word()
                self.take("sym", ")")
                return commutator(w, v)
            self.take("sym", ")")
            return w
        if self.at("["):
            self.take()
            u = self.word()
            self.take("sym", ",")
            v = self.word()
            self.take("sym", "]")
            return commutator(u, v)
        raise ParseError(f"unexpected {t[1] or 'end of input'!r}", t[2], t[3])


def parse_presentation(text: str, name: str = "", *, line: int = 1, column: int = 1) -> Presentation:
    """Parse ``< g1, g2 | w1, w2 >`` into a Presentation."""
    p = _Parser(_tokenize(text, line, column))
    pres = p.presentation(name)
    p.take("eof")
    return pres


def parse_word(text: str, generators: Sequence[str]) -> Word:
    p = _Parser(_tokenize(text), generators)
    w = p.word()
    p.take("eof")
    return w


def parse_relations(text: str, generators: Sequence[str], *, magma: bool = False,
                    line: int = 1, column: int = 1) -> list[Word]:
    """Comma-separated relators.  With ``magma`` the forms ``(u, v)`` (commutator)
    and ``u = v`` are also accepted."""
    p = _Parser(_tokenize(text, line, column), generators, magma=magma)
    rels = []
    if p.peek()[0] != "eof":
        while True:
            rels.append(p.relation())
            if p.at(","):
                p.take()
                continue
            break
    p.take("eof")
    return rels


def parse_word_list(text: str, generators: Sequence[str]) -> list[Word]:
    """Words separated by ``;`` (the CLI subgroup syntax); blank items are skipped."""
    return [parse_word(s, generators) for s in text.split(";") if s.strip()]


# --------------------------------------------------------------------------
# structured records

def dump_records(presentations: Iterable[Presentation]) -> str:
    return json.dumps([p.to_record() for p in presentations], indent=1, ensure_ascii=False)


def load_records(text: str) -> list[Presentation]:
    data = json.loads(text)
    if isinstance(data, dict):
        data = [data]
    return [Presentation.from_record(rec) for rec in data]


# --------------------------------------------------------------------------
# evaluation in permutation groups

Perm = tuple[int, ...]


def perm_mul(p: Perm, q: Perm) -> Perm:
    """``p`` then ``q`` (right action: ``x^(pq) = (x^p)^q``)."""
    return tuple(q[i] for i in p)


def perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def perm_pow(p: Perm, k: int) -> Perm:
    if k < 0:
        p, k = perm_inv(p), -k
    result = tuple(range(len(p)))
    base = p
    while k:
        if k & 1:
            result = perm_mul(result, base)
        base = perm_mul(base, base)
        k >>= 1
    return result


def evaluate_word(w: Word, images: Mapping[int, Perm] | Sequence[Perm], degree: int | None = None) -> Perm:
    """Product of generator images along ``w``; identity for the empty word.

    ``images`` may be indexed by generator position (sequence or dict).
    """
    if degree is None:
        if isinstance(images, Mapping):
            sample = next(iter(images.values()), None)
        else:
            sample = images[0] if len(images) else None
        if sample is None:
            raise KeyError("no generator images given")
        degree = len(sample)
    result: Perm = tuple(range(degree))
    for g, e in w.syllables:
        try:
            img = images[g]
        except (KeyError, IndexError):
            raise KeyError(f"missing image for generator {g}") from None
        result = perm_mul(result, perm_pow(img, e))
    return result
