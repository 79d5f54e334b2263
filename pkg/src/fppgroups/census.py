"""Counting homomorphisms, epimorphisms and distinct-kernel quotients onto finite groups."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .cosets import table_from_action
from .finite_groups import FiniteGroup, automorphism_count
from .presentation import Presentation

log = logging.getLogger(__name__)

DEFAULT_WORK_BUDGET = 10**9
_CHUNK = 1 << 21


class HomBudgetExceeded(RuntimeError):
    pass


class CensusError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuotientProfile:
    target: str
    hom_count: int
    epi_count: int
    quotient_count: int
    aut_order: int = 0

    def __post_init__(self):
        if not 0 <= self.epi_count <= self.hom_count:
            raise CensusError(f"inconsistent counts for {self.target}: epi {self.epi_count} > hom {self.hom_count}")
        if self.aut_order and self.quotient_count * self.aut_order != self.epi_count:
            raise CensusError(f"{self.target}: quotient_count * |Aut| != epi_count")

    def to_record(self) -> dict:
        return {"target": self.target, "hom_count": self.hom_count, "epi_count": self.epi_count,
                "quotient_count": self.quotient_count, "aut_order": self.aut_order}

    @classmethod
    def from_record(cls, rec: dict) -> "QuotientProfile":
        return cls(rec["target"], int(rec["hom_count"]), int(rec["epi_count"]),
                   int(rec["quotient_count"]), int(rec.get("aut_order", 0)))


# ---------------------------------------------------------------------------
# search plan

@dataclass
class _Plan:
    """Picklable description of one counting job."""

    n: int
    mulflat: np.ndarray
    powers: dict[int, np.ndarray]            # exponent -> x^e lookup
    order: list[int]                         # search position -> generator index
    checks: list[list[list[tuple[int, int]]]]  # level -> relators as (position, exponent)
    join: np.ndarray | None
    whole: int
    budget: int


def _power_table(Q: FiniteGroup, e: int) -> np.ndarray:
    n = Q.order
    out = np.empty(n, dtype=np.int32)
    for x in range(n):
        out[x] = Q.power(x, e)
    return out


def _make_plan(P: Presentation, Q: FiniteGroup, budget: int) -> _Plan:
    occ = [0] * P.rank
    for r in P.relators:
        for g, e in r.syllables:
            occ[g] += abs(e)
    order = sorted(range(P.rank), key=lambda g: (-occ[g], g))
    pos = {g: k for k, g in enumerate(order)}
    checks: list[list[list[tuple[int, int]]]] = [[] for _ in range(P.rank)]
    exps = set()
    for r in P.relators:
        w = r.cyclically_reduced()
        if not w:
            continue
        syl = [(pos[g], e) for g, e in w.syllables]
        exps.update(e for _, e in syl)
        checks[max(p for p, _ in syl)].append(syl)
    for lv in checks:
        lv.sort(key=len)
    jt = Q.join_table()
    join, whole = (jt if jt is not None else (None, -1))
    n = Q.order
    return _Plan(n, np.ascontiguousarray(Q.mul, dtype=np.int64).ravel(),
                 {e: _power_table(Q, e) for e in exps}, order, checks, join, whole, budget)


class _Counter:
    def __init__(self, plan: _Plan, Q: FiniteGroup | None = None):
        self.p = plan
        self.Q = Q
        self.work = 0
        self.hom = 0
        self.epi = 0

    def _eval(self, cols: list[np.ndarray], syl: list[tuple[int, int]]) -> np.ndarray:
        p = self.p
        n = p.n
        k0, e0 = syl[0]
        cur = p.powers[e0][cols[k0]].astype(np.int64)
        for k, e in syl[1:]:
            cur = p.mulflat[cur * n + p.powers[e][cols[k]]]
        self.work += len(cur) * len(syl)
        if self.work > p.budget:
            raise HomBudgetExceeded(f"homomorphism search exceeded {p.budget} relator-letter evaluations")
        return cur == 0

    def _filter(self, cols: list[np.ndarray], level: int) -> list[np.ndarray]:
        for syl in self.p.checks[level]:
            if not len(cols[0]):
                break
            keep = self._eval(cols, syl)
            if not keep.all():
                cols = [c[keep] for c in cols]
        return cols

    def _finish(self, cols: list[np.ndarray], weight: int) -> None:
        m = len(cols[0]) if cols else 0
        if not m:
            return
        self.hom += weight * m
        p = self.p
        if p.join is not None:
            s = np.zeros(m, dtype=np.int64)
            for c in cols:
                s = p.join[s, c]
            self.epi += weight * int(np.count_nonzero(s == p.whole))
        else:
            Q = self.Q
            assert Q is not None, "generation check needs the group when no join table exists"
            rows = np.stack(cols, axis=1)
            uniq, counts = np.unique(rows, axis=0, return_counts=True)
            self.epi += weight * sum(int(c) for u, c in zip(uniq, counts) if Q.generates(int(x) for x in u))

    def run(self, first: Sequence[tuple[int, int]]) -> None:
        """Count extensions of each (first image, weight) pair."""
        r = len(self.p.order)
        n = self.p.n
        for x, wgt in first:
            cols = [np.array([x], dtype=np.int32)]
            cols = self._filter(cols, 0)
            self._dfs(cols, 1, wgt, r, n)

    def _dfs(self, cols, level, wgt, r, n):
        if not len(cols[0]):
            return
        if level == r:
            self._finish(cols, wgt)
            return
        step = max(1, _CHUNK // n)
        cand = np.arange(n, dtype=np.int32)
        for lo in range(0, len(cols[0]), step):
            part = [c[lo:lo + step] for c in cols]
            m = len(part[0])
            new = [np.repeat(c, n) for c in part] + [np.tile(cand, m)]
            new = self._filter(new, level)
            self._dfs(new, level + 1, wgt, r, n)


def _worker(args):
    plan, first = args
    c = _Counter(plan)
    c.run(first)
    return c.hom, c.epi, c.work


def _first_images(Q: FiniteGroup, reduced: bool) -> list[tuple[int, int]]:
    if not reduced:
        return [(x, 1) for x in range(Q.order)]
    return [(cls[0], len(cls)) for cls in Q.conjugacy_classes()]


def _count(P: Presentation, Q: FiniteGroup, reduced: bool, budget: int, jobs: int,
           aut_order: int | None) -> QuotientProfile:
    aut = automorphism_count(Q) if aut_order is None else aut_order
    if P.rank == 0:
        hom, epi = 1, int(Q.order == 1)
    else:
        plan = _make_plan(P, Q, budget)
        first = _first_images(Q, reduced)
        # workers detect surjectivity from the join table only
        if jobs > 1 and len(first) > 1 and plan.join is not None:
            shares = [first[i::jobs] for i in range(jobs)]
            hom = epi = work = 0
            with ProcessPoolExecutor(jobs) as ex:
                for h, e, w in ex.map(_worker, [(plan, s) for s in shares if s]):
                    hom += h
                    epi += e
                    work += w
            if work > budget:
                raise HomBudgetExceeded(f"homomorphism search exceeded {budget} relator-letter evaluations")
        else:
            c = _Counter(plan, Q)
            c.run(first)
            hom, epi = c.hom, c.epi
            log.debug("hom count %s -> %s: %d evaluations", P.name, Q.name, c.work)
    if epi % aut:
        raise CensusError(f"{Q.name}: epimorphism count {epi} not divisible by |Aut| = {aut}")
    return QuotientProfile(Q.name, hom, epi, epi // aut, aut)


def count_homomorphisms(P: Presentation, Q: FiniteGroup, *, budget: int = DEFAULT_WORK_BUDGET,
                        jobs: int = 1, aut_order: int | None = None) -> QuotientProfile:
    """|Hom(P, Q)|, |Epi(P, Q)| and |Epi| / |Aut(Q)| by exhaustive search."""
    return _count(P, Q, False, budget, jobs, aut_order)


def count_homomorphisms_reduced(P: Presentation, Q: FiniteGroup, *, budget: int = DEFAULT_WORK_BUDGET,
                                jobs: int = 1, aut_order: int | None = None) -> QuotientProfile:
    """Same counts, fixing the first searched generator up to conjugacy in Q."""
    return _count(P, Q, True, budget, jobs, aut_order)


# ---------------------------------------------------------------------------
# explicit enumeration (small cases)

def enumerate_homomorphisms(P: Presentation, Q: FiniteGroup, *, epi_only: bool = False,
                            budget: int = DEFAULT_WORK_BUDGET) -> Iterator[tuple[int, ...]]:
    """Yield generator-image tuples (element indices, in generator order)."""
    if P.rank == 0:
        if not epi_only or Q.order == 1:
            yield ()
        return
    plan = _make_plan(P, Q, budget)
    c = _Counter(plan, Q)
    out: list[np.ndarray] = []
    orig_finish = c._finish

    def capture(cols, weight):
        out.append(np.stack(cols, axis=1))
        orig_finish(cols, weight)

    c._finish = capture  # type: ignore[method-assign]
    c.run(_first_images(Q, False))
    inv_order = [plan.order.index(g) for g in range(P.rank)]
    for block in out:
        for row in block:
            imgs = tuple(int(row[k]) for k in inv_order)
            if epi_only and not Q.generates(imgs):
                continue
            yield imgs


def kernel_tables(P: Presentation, Q: FiniteGroup, **kw) -> set[tuple[tuple[int, ...], ...]]:
    """Distinct kernels of epimorphisms P -> Q, as standardized coset tables."""
    mul = Q.mul
    kernels = set()
    for imgs in enumerate_homomorphisms(P, Q, epi_only=True, **kw):
        perms = [tuple(int(v) for v in mul[:, x]) for x in imgs]
        kernels.add(table_from_action(P, perms, 0).table)
    return kernels


def count_distinct_kernels(P: Presentation, Q: FiniteGroup, **kw) -> int:
    return len(kernel_tables(P, Q, **kw))
