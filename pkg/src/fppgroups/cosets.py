"""Todd-Coxeter coset enumeration and operations on complete coset tables.

Column ``2*g`` of a table holds the action of generator ``g`` and column
``2*g + 1`` that of its inverse.  Coset 0 is the subgroup itself.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .presentation import Perm, Presentation
from .words import Word

log = logging.getLogger(__name__)

DEFAULT_LIMIT = 1_000_000
UNDEF = -1


class CosetLimitExceeded(RuntimeError):
    """Enumeration did not close within the coset limit."""


@dataclass(frozen=True, eq=False)
class CosetTable:
    """A complete, standardized coset table.

    ``table[c][x]`` is the coset reached from ``c`` by letter ``x``.
    Two tables for the same subgroup of the same presentation are equal.
    """

    presentation: Presentation
    table: tuple[tuple[int, ...], ...]
    subgroup_words: tuple[Word, ...] = ()

    def __eq__(self, other):
        return (isinstance(other, CosetTable) and self.table == other.table
                and self.presentation == other.presentation)

    def __hash__(self):
        return hash(self.table)

    @property
    def index(self) -> int:
        return len(self.table)

    def perm(self, g: int, inverse: bool = False) -> Perm:
        col = 2 * g + (1 if inverse else 0)
        return tuple(row[col] for row in self.table)

    def act(self, coset: int, w: Word) -> int:
        t = self.table
        for x in w.letters():
            coset = t[coset][x]
        return coset

    def check(self) -> None:
        """Raise AssertionError unless the table is a valid transitive action."""
        n = self.index
        t = self.table
        for c in range(n):
            for x, d in enumerate(t[c]):
                assert 0 <= d < n and t[d][x ^ 1] == c, f"bad entry ({c}, {x})"
        for r in self.presentation.relators:
            for c in range(n):
                assert self.act(c, r) == c, f"relator fails at coset {c}"
        for w in self.subgroup_words:
            assert self.act(0, w) == 0, "subgroup word does not fix coset 0"
        seen = {0}
        stack = [0]
        while stack:
            c = stack.pop()
            for d in t[c]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        assert len(seen) == n, "action is not transitive"

    # -- transversal and Schreier generators ---------------------------------

    def tree_edges(self) -> dict[int, tuple[int, int]]:
        """coset -> (parent coset, letter) of the breadth-first spanning tree."""
        parent = {0: (UNDEF, UNDEF)}
        for c in range(self.index):
            for x, d in enumerate(self.table[c]):
                if d not in parent:
                    parent[d] = (c, x)
        return parent

    def transversal(self) -> list[Word]:
        parent = self.tree_edges()
        words: list[Word | None] = [None] * self.index
        words[0] = Word()
        for c in range(1, self.index):
            # standardized tables define cosets in increasing order of parent
            p, x = parent[c]
            words[c] = words[p] * Word.from_letters([x])
        return words  # type: ignore[return-value]

    def schreier_pairs(self) -> list[tuple[int, int]]:
        """Non-trivial Schreier generator labels ``(coset, generator)``."""
        parent = self.tree_edges()
        tree = {(p, x) for c, (p, x) in parent.items() if c != 0}
        out = []
        for c in range(self.index):
            for g in range(self.presentation.rank):
                d = self.table[c][2 * g]
                if (c, 2 * g) in tree or (d, 2 * g + 1) in tree:
                    continue
                out.append((c, g))
        return out

    def schreier_generators(self) -> list[Word]:
        tv = self.transversal()
        out = []
        for c, g in self.schreier_pairs():
            d = self.table[c][2 * g]
            out.append(tv[c] * Word.gen(g) * tv[d].inverse())
        return out


# ---------------------------------------------------------------------------
# enumeration

class _Enumerator:
    def __init__(self, pres: Presentation, subgroup: Sequence[Word], limit: int):
        self.ncols = 2 * pres.rank
        self.rels = [r.cyclically_reduced().letters() for r in pres.relators]
        self.rels = [r for r in self.rels if r]
        self.subgens = [w.letters() for w in subgroup]
        self.limit = limit
        self.table: list[list[int]] = [[UNDEF] * self.ncols]
        self.fwd: list[int] = [0]  # union-find parent; fwd[c] == c for live cosets
        self.nlive = 1
        self.queue: list[int] = []
        self.deductions: list[tuple[int, int]] = []
        self.record_deductions = False

    # union-find
    def rep(self, c: int) -> int:
        fwd = self.fwd
        r = c
        while fwd[r] != r:
            r = fwd[r]
        while fwd[c] != r:
            fwd[c], c = r, fwd[c]
        return r

    def merge(self, a: int, b: int) -> None:
        a, b = self.rep(a), self.rep(b)
        if a != b:
            if a > b:
                a, b = b, a
            self.fwd[b] = a
            self.queue.append(b)
            self.nlive -= 1

    def coincidence(self, a: int, b: int) -> None:
        self.queue = []
        self.merge(a, b)
        t = self.table
        i = 0
        while i < len(self.queue):
            g = self.queue[i]
            i += 1
            row = t[g]
            for x in range(self.ncols):
                d = row[x]
                if d == UNDEF:
                    continue
                xi = x ^ 1
                if t[d][xi] == g:
                    t[d][xi] = UNDEF
                mu, nu = self.rep(g), self.rep(d)
                if t[mu][x] != UNDEF:
                    self.merge(nu, t[mu][x])
                elif t[nu][xi] != UNDEF:
                    self.merge(mu, t[nu][xi])
                else:
                    t[mu][x] = nu
                    t[nu][xi] = mu
                    if self.record_deductions:
                        self.deductions.append((mu, x))

    def define(self, c: int, x: int) -> int:
        if self.nlive >= self.limit:
            self.lookahead()
            if self.nlive >= self.limit:
                raise CosetLimitExceeded(f"coset limit {self.limit} exceeded")
            c = self.rep(c)
            if self.table[c][x] != UNDEF:
                return self.table[c][x]
        d = len(self.table)
        self.table.append([UNDEF] * self.ncols)
        self.fwd.append(d)
        self.nlive += 1
        self.table[c][x] = d
        self.table[d][x ^ 1] = c
        if self.record_deductions:
            self.deductions.append((c, x))
        return d

    def scan(self, c: int, w: list[int], fill: bool) -> None:
        """Scan ``w`` from coset ``c``; with ``fill`` define cosets to close gaps."""
        t = self.table
        f, i = c, 0
        b, j = c, len(w) - 1
        while True:
            while i <= j and t[f][w[i]] != UNDEF:
                f = t[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][w[j] ^ 1] != UNDEF:
                b = t[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][w[i]] = b
                t[b][w[i] ^ 1] = f
                if self.record_deductions:
                    self.deductions.append((f, w[i]))
                return
            if not fill:
                return
            self.define(f, w[i])
            # a lookahead inside define() may have merged f or b
            f, b = self.rep(f), self.rep(b)

    def lookahead(self) -> None:
        log.debug("lookahead at %d live cosets", self.nlive)
        for c in range(len(self.table)):
            for r in self.rels:
                if self.fwd[c] != c:
                    break
                self.scan(c, r, fill=False)

    def hlt(self) -> None:
        for w in self.subgens:
            self.scan(self.rep(0), w, fill=True)
        c = 0
        while c < len(self.table):
            for r in self.rels:
                if self.fwd[c] != c:
                    break
                self.scan(c, r, fill=True)
            if self.fwd[c] == c:
                for x in range(self.ncols):
                    if self.table[c][x] == UNDEF:
                        self.define(c, x)
                        if self.fwd[c] != c:
                            break
            c += 1

    def felsch(self) -> None:
        self.record_deductions = True
        starts: list[list[list[int]]] = [[] for _ in range(self.ncols)]
        for r in self.rels:
            for w in (r, [x ^ 1 for x in reversed(r)]):
                for k in range(len(w)):
                    rot = w[k:] + w[:k]
                    if rot not in starts[rot[0]]:
                        starts[rot[0]].append(rot)
        for w in self.subgens:
            self.scan(self.rep(0), w, fill=True)
            self._process_deductions(starts)
        c = 0
        while c < len(self.table):
            for x in range(self.ncols):
                if self.fwd[c] != c:
                    break
                if self.table[c][x] == UNDEF:
                    self.define(c, x)
                    self._process_deductions(starts)
            c += 1

    def _process_deductions(self, starts) -> None:
        while self.deductions:
            c, x = self.deductions.pop()
            c = self.rep(c)
            for w in starts[x]:
                self.scan(c, w, fill=False)
                c = self.rep(c)
            d = self.table[c][x]
            if d != UNDEF:
                d = self.rep(d)
                for w in starts[x ^ 1]:
                    self.scan(d, w, fill=False)
                    d = self.rep(d)

    def result(self) -> list[list[int]]:
        live = [c for c in range(len(self.table)) if self.fwd[c] == c]
        newnum = {c: k for k, c in enumerate(live)}
        out = []
        for c in live:
            row = []
            for d in self.table[c]:
                if d == UNDEF:
                    raise CosetLimitExceeded("enumeration ended with an incomplete table")
                row.append(newnum[self.rep(d)])
            out.append(row)
        return out


def standardize(table: Sequence[Sequence[int]], base: int = 0) -> tuple[tuple[int, ...], ...]:
    """Renumber cosets breadth-first from ``base`` (first appearance order)."""
    new = {base: 0}
    order = [base]
    i = 0
    while i < len(order):
        for d in table[order[i]]:
            if d not in new:
                new[d] = len(order)
                order.append(d)
        i += 1
    return tuple(tuple(new[d] for d in table[c]) for c in order)


def enumerate_cosets(pres: Presentation, subgroup_words: Sequence[Word] = (),
                     limit: int = DEFAULT_LIMIT, strategy: str = "hlt") -> CosetTable:
    """Enumerate the cosets of the subgroup generated by ``subgroup_words``.

    Raises CosetLimitExceeded if the table does not close within ``limit`` rows.
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if pres.rank == 0:
        return CosetTable(pres, ((),), tuple(subgroup_words))
    e = _Enumerator(pres, subgroup_words, limit)
    if strategy == "hlt":
        e.hlt()
    elif strategy == "felsch":
        e.felsch()
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    T = CosetTable(pres, standardize(e.result()), tuple(subgroup_words))
    T.check()
    return T


def table_from_action(pres: Presentation, perms: Sequence[Perm], base: int = 0,
                      subgroup_words: Sequence[Word] | None = None) -> CosetTable:
    """Coset table of the stabilizer of ``base`` under a permutation action.

    ``perms[g]`` is the image of generator ``g``; only the orbit of ``base``
    is kept.  Without ``subgroup_words`` the Schreier generators are used.
    """
    inv = []
    for p in perms:
        q = [0] * len(p)
        for i, j in enumerate(p):
            q[j] = i
        inv.append(q)
    cols = []
    for g in range(pres.rank):
        cols.append(perms[g])
        cols.append(inv[g])
    degree = len(perms[0]) if perms else 1
    raw = [[cols[x][c] for x in range(len(cols))] for c in range(degree)]
    std = standardize(raw, base)
    T = CosetTable(pres, std, ())
    words = tuple(subgroup_words) if subgroup_words is not None else tuple(T.schreier_generators())
    T = CosetTable(pres, std, words)
    T.check()
    return T


def permutation_representation(T: CosetTable) -> dict[str, Perm]:
    return {name: T.perm(g) for g, name in enumerate(T.presentation.generators)}


def intersect_subgroups(pres: Presentation, H_words: Sequence[Word], K_words: Sequence[Word],
                        limit: int = DEFAULT_LIMIT) -> CosetTable:
    """Coset table of H n K, from the orbit of (H, K) in the product action."""
    TH = enumerate_cosets(pres, H_words, limit)
    TK = enumerate_cosets(pres, K_words, limit)
    return intersect_tables(TH, TK, limit)


def intersect_tables(TH: CosetTable, TK: CosetTable, limit: int = DEFAULT_LIMIT) -> CosetTable:
    pres = TH.presentation
    num = {(0, 0): 0}
    order = [(0, 0)]
    rows = []
    i = 0
    while i < len(order):
        a, b = order[i]
        row = []
        for x in range(2 * pres.rank):
            p = (TH.table[a][x], TK.table[b][x])
            if p not in num:
                if len(order) >= limit:
                    raise CosetLimitExceeded(f"intersection index exceeds {limit}")
                num[p] = len(order)
                order.append(p)
            row.append(num[p])
        rows.append(row)
        i += 1
    std = standardize(rows)
    T = CosetTable(pres, std, ())
    T = CosetTable(pres, std, tuple(T.schreier_generators()))
    T.check()
    return T


def normalizer_points(T: CosetTable) -> list[int]:
    """Cosets ``Hg`` with ``g`` normalizing ``H`` (the relabeling from them is trivial)."""
    return [p for p in range(T.index) if p == 0 or standardize(T.table, p) == T.table]


def is_normal(T: CosetTable) -> bool:
    return len(normalizer_points(T)) == T.index


def conjugate_tables(T: CosetTable) -> set[tuple[tuple[int, ...], ...]]:
    """Standardized tables of all conjugates of the subgroup."""
    return {standardize(T.table, p) for p in range(T.index)}


def subgroup_contains(T: CosetTable, words: Sequence[Word]) -> bool:
    return all(T.act(0, w) == 0 for w in words)
