"""Reidemeister-Schreier rewriting and Tietze simplification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .cosets import CosetTable
from .presentation import Presentation
from .words import Word

DEFAULT_EFFORT = 10**6


@dataclass(frozen=True)
class RewrittenPresentation:
    """Presentation of a finite-index subgroup on its Schreier generators.

    ``generator_origin[i] = (coset, g)`` means subgroup generator ``i`` is
    ``t_coset * g * t_(coset.g)^-1`` for the breadth-first transversal ``t``.
    """

    presentation: Presentation
    schreier_transversal: tuple[Word, ...]
    generator_origin: tuple[tuple[int, int], ...]
    table: CosetTable = field(repr=False)

    def generator_word(self, i: int) -> Word:
        """Subgroup generator ``i`` as a word in the ambient generators."""
        c, g = self.generator_origin[i]
        d = self.table.table[c][2 * g]
        tv = self.schreier_transversal
        return tv[c] * Word.gen(g) * tv[d].inverse()

    def rewrite(self, w: Word) -> Word:
        """Express an element of the subgroup (an ambient word) in Schreier generators."""
        return _rewrite(self.table, self._pair_index, w, 0, require_closed=True)

    @property
    def _pair_index(self) -> dict[tuple[int, int], int]:
        return {p: i for i, p in enumerate(self.generator_origin)}


def _rewrite(T: CosetTable, pair_index: dict[tuple[int, int], int], w: Word, start: int,
             require_closed: bool = False) -> Word:
    t = T.table
    c = start
    syl: list[tuple[int, int]] = []
    for x in w.letters():
        g = x >> 1
        if x & 1:
            d = t[c][x]
            k = pair_index.get((d, g))
            if k is not None:
                syl.append((k, -1))
            c = d
        else:
            k = pair_index.get((c, g))
            if k is not None:
                syl.append((k, 1))
            c = t[c][x]
    if require_closed and c != start:
        raise ValueError("word does not lie in the subgroup")
    return Word(tuple(syl))


def reidemeister_schreier(T: CosetTable) -> RewrittenPresentation:
    """Unsimplified subgroup presentation on the non-trivial Schreier generators."""
    P = T.presentation
    pairs = T.schreier_pairs()
    pair_index = {p: i for i, p in enumerate(pairs)}
    names = tuple(f"{P.generators[g]}_{c}" for c, g in pairs)
    rels = []
    for c in range(T.index):
        for r in P.relators:
            rels.append(_rewrite(T, pair_index, r, c))
    pres = Presentation(names, tuple(rels), name=f"{P.name}_sub{T.index}" if P.name else "")
    return RewrittenPresentation(pres, tuple(T.transversal()), tuple(pairs), T)


# ---------------------------------------------------------------------------
# Tietze transformations on relators encoded as strings (one char per letter)

_OFF = 256


def _enc(w: Word) -> str:
    return "".join(chr(x + _OFF) for x in w.letters())


def _dec(s: str) -> Word:
    return Word.from_letters(ord(ch) - _OFF for ch in s)


def _inv(s: str) -> str:
    return "".join(chr(((ord(ch) - _OFF) ^ 1) + _OFF) for ch in reversed(s))


def _free_reduce(s: str) -> str:
    out: list[str] = []
    for ch in s:
        if out and (ord(out[-1]) - _OFF) ^ 1 == ord(ch) - _OFF:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def _cyc_reduce(s: str) -> str:
    s = _free_reduce(s)
    i, j = 0, len(s) - 1
    while i < j and (ord(s[i]) - _OFF) ^ 1 == ord(s[j]) - _OFF:
        i += 1
        j -= 1
    return s[i:j + 1]


def _canonical(s: str) -> str:
    """Least rotation of s or s^-1 (relators equal up to these moves coincide)."""
    if len(s) > 256:
        return s
    best = s
    for v in (s, _inv(s)):
        for k in range(len(v)):
            r = v[k:] + v[:k]
            if r < best:
                best = r
    return best


@dataclass
class TietzeResult:
    presentation: Presentation
    kept: list[int]                      # original generator index of each new generator
    eliminated: dict[int, Word]          # original index -> word in the *new* generators
    log: list[str]


def _measure(rank: int, rels: Sequence[str]) -> int:
    return rank + sum(len(r) for r in rels)


def tietze_reduce(P: Presentation, effort: int = DEFAULT_EFFORT) -> TietzeResult:
    """Eliminate generators and shorten relators without ever exceeding the
    input's (generator count + total relator length)."""
    budget = effort
    log: list[str] = []
    gens = set(range(P.rank))
    rels = [_cyc_reduce(_enc(r)) for r in P.relators]
    limit = _measure(P.rank, rels)
    order: list[tuple[int, str]] = []  # (eliminated gen, its value as string)

    def normalize(rs):
        seen = set()
        out = []
        for r in rs:
            r = _cyc_reduce(r)
            if not r:
                continue
            key = _canonical(r)
            if key in seen:
                continue
            seen.add(key)
            out.append(r)
        out.sort(key=len)
        return out

    rels = normalize(rels)
    while budget > 0:
        budget -= sum(len(r) for r in rels) + 1
        # -- elimination of a generator that occurs exactly once in a relator
        best = None
        for ri, r in enumerate(rels):
            if best is not None and len(r) >= best[0]:
                break
            for ch in set(r):
                g = (ord(ch) - _OFF) >> 1
                pos_c, neg_c = chr(2 * g + _OFF), chr(2 * g + 1 + _OFF)
                if r.count(pos_c) + r.count(neg_c) == 1:
                    occ = sum(o.count(pos_c) + o.count(neg_c) for k, o in enumerate(rels) if k != ri)
                    cand = (len(r), occ, -g, ri)  # ties keep earlier generators
                    if best is None or cand < best:
                        best = cand
        done = False
        if best is not None:
            L, occ, g, ri = best
            g = -g
            r = rels[ri]
            pos_c, neg_c = chr(2 * g + _OFF), chr(2 * g + 1 + _OFF)
            k = r.index(pos_c) if pos_c in r else r.index(neg_c)
            rot = r[k:] + r[:k]
            rest = rot[1:]
            # rot = g^e * rest = 1  =>  g = rest^-1 (e = 1) or g = rest (e = -1)
            value = _inv(rest) if rot[0] == pos_c else rest
            trans = {ord(pos_c): value, ord(neg_c): _inv(value)}
            new_rels = normalize([o.translate(trans) for kk, o in enumerate(rels) if kk != ri])
            if _measure(len(gens) - 1, new_rels) <= limit:
                gens.discard(g)
                order.append((g, value))
                log.append(f"eliminate {P.generators[g]} using relator of length {L}")
                rels = new_rels
                done = True
        if done:
            continue
        # -- shorten a relator using more than half of another
        changed = False
        for i, r1 in enumerate(rels):
            L1 = len(r1)
            if L1 == 0 or budget <= 0:
                continue
            m = L1 // 2 + 1
            pieces = []
            for v in (r1, _inv(r1)):
                for k in range(L1):
                    rot = v[k:] + v[:k]
                    pieces.append((rot[:m], rot[m:]))
            for j, r2 in enumerate(rels):
                if j == i or len(r2) < m:
                    continue
                budget -= len(pieces)
                doubled = r2 + r2
                for u, v in pieces:
                    p = doubled.find(u)
                    if p < 0 or p >= len(r2):
                        continue
                    rot2 = doubled[p:p + len(r2)]
                    new = _cyc_reduce(_inv(v) + rot2[m:])
                    if len(new) < len(r2):
                        log.append(f"shorten relator {len(r2)} -> {len(new)}")
                        rels[j] = new
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
        if changed:
            rels = normalize(rels)
            continue
        break

    kept = sorted(gens)
    new_of = {g: k for k, g in enumerate(kept)}
    relabel = {}
    for g in kept:
        relabel[2 * g] = 2 * new_of[g]
        relabel[2 * g + 1] = 2 * new_of[g] + 1

    def to_word(s: str) -> Word:
        return Word.from_letters(relabel[ord(ch) - _OFF] for ch in s)

    # resolve eliminated generators in terms of kept ones, latest first
    resolved: dict[int, str] = {}
    for g, value in reversed(order):
        trans = {}
        for h, hv in resolved.items():
            trans[2 * h + _OFF] = hv
            trans[2 * h + 1 + _OFF] = _inv(hv)
        resolved[g] = _free_reduce(value.translate(trans))
    eliminated = {g: to_word(s) for g, s in resolved.items()}
    pres = Presentation(tuple(P.generators[g] for g in kept), tuple(to_word(r) for r in rels), P.name)
    return TietzeResult(pres, kept, eliminated, log)


def tietze_simplify(P: Presentation, effort: int = DEFAULT_EFFORT) -> Presentation:
    return tietze_reduce(P, effort).presentation
