"""Low-index subgroups: one representative per conjugacy class.

Backtracking over standardized partial coset tables.  The first undefined
entry is always filled next, so tables stay standardized; relator
consequences are propagated Felsch-style, and a branch is pruned as soon as
a relabeling from another base point is provably smaller, which leaves
exactly the lexicographically least table of each conjugacy class.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .cosets import CosetTable
from .presentation import Presentation

log = logging.getLogger(__name__)

UNDEF = -1
DEFAULT_NODE_BUDGET = 10**8


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SubgroupClass:
    table: CosetTable
    index: int
    normal: bool
    class_size: int


class _Search:
    def __init__(self, pres: Presentation, max_index: int, budget: int):
        self.pres = pres
        self.n_max = max_index
        self.ncols = 2 * pres.rank
        self.budget = budget
        self.nodes = 0
        starts: list[list[tuple[int, ...]]] = [[] for _ in range(self.ncols)]
        for r in pres.relators:
            w = r.cyclically_reduced().letters()
            if not w:
                continue
            for v in (w, [x ^ 1 for x in reversed(w)]):
                for k in range(len(v)):
                    rot = tuple(v[k:] + v[:k])
                    if rot not in starts[rot[0]]:
                        starts[rot[0]].append(rot)
        self.starts = starts
        self.rels = [r.cyclically_reduced().letters() for r in pres.relators]
        self.table = [[UNDEF] * self.ncols for _ in range(max_index)]
        self.n = 1
        self.trail: list[tuple[int, int]] = []
        self.results: list[tuple[tuple[tuple[int, ...], ...], int]] = []

    # -- assignment with consequences ----------------------------------------

    def assign(self, c: int, x: int, d: int) -> bool:
        """Set c.x = d (and d.x^-1 = c), then propagate; False on conflict."""
        t = self.table
        stack = [(c, x)]
        t[c][x] = d
        t[d][x ^ 1] = c
        self.trail.append((c, x))
        while stack:
            c0, x0 = stack.pop()
            for a, y in ((c0, x0), (t[c0][x0], x0 ^ 1)):
                for w in self.starts[y]:
                    # scan w from a
                    f, i = a, 0
                    b, j = a, len(w) - 1
                    while i <= j and t[f][w[i]] != UNDEF:
                        f = t[f][w[i]]
                        i += 1
                    if i > j:
                        if f != b:
                            return False
                        continue
                    while j >= i and t[b][w[j] ^ 1] != UNDEF:
                        b = t[b][w[j] ^ 1]
                        j -= 1
                    if j < i:
                        if f != b:
                            return False
                        continue
                    if i == j:
                        z = w[i]
                        if t[b][z ^ 1] != UNDEF:
                            return False
                        t[f][z] = b
                        t[b][z ^ 1] = f
                        self.trail.append((f, z))
                        stack.append((f, z))
        return True

    def undo(self, mark: int) -> None:
        t = self.table
        trail = self.trail
        while len(trail) > mark:
            c, x = trail.pop()
            d = t[c][x]
            t[c][x] = UNDEF
            t[d][x ^ 1] = UNDEF

    # -- canonicity -----------------------------------------------------------

    def minimality(self) -> int:
        """0 if some relabeling is smaller; else the count of base points whose
        relabeling is provably equal (only meaningful for complete tables)."""
        t = self.table
        n = self.n
        ncols = self.ncols
        equal = 1
        for base in range(1, n):
            new = {base: 0}
            old_of = [base]
            verdict = 0  # 0 equal so far, 1 larger/undecided
            k = 0
            while k < len(old_of) and verdict == 0:
                row_o = t[k]
                row_b = t[old_of[k]]
                for x in range(ncols):
                    orig = row_o[x]
                    d = row_b[x]
                    if orig == UNDEF or d == UNDEF:
                        verdict = 1
                        break
                    nd = new.get(d)
                    if nd is None:
                        nd = len(old_of)
                        new[d] = nd
                        old_of.append(d)
                    if nd < orig:
                        return 0
                    if nd > orig:
                        verdict = 1
                        break
                k += 1
            if verdict == 0:
                equal += 1
        return equal

    # -- search -----------------------------------------------------------------

    def first_undefined(self, start: int) -> tuple[int, int] | None:
        t = self.table
        for pos in range(start, self.n * self.ncols):
            c, x = divmod(pos, self.ncols)
            if t[c][x] == UNDEF:
                return c, x
        return None

    def run(self, prefix: Sequence[int] = (), depth_cut: int | None = None, collect: list | None = None):
        """Depth-first search.  ``prefix`` forces the first choices; with
        ``depth_cut`` the search stops at that depth and records the choice
        paths reached in ``collect`` (used to split work between processes)."""
        self._dfs(0, 0, list(prefix), depth_cut, collect, [])

    def _dfs(self, pos, depth, prefix, depth_cut, collect, path):
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceeded(f"low-index node budget {self.budget} exceeded")
        slot = self.first_undefined(pos)
        if slot is None:
            eq = self.minimality()
            if eq:
                n = self.n
                table = tuple(tuple(self.table[c]) for c in range(n))
                self.results.append((table, eq))
            return
        if depth_cut is not None and depth == depth_cut:
            collect.append(list(path))
            return
        c, x = slot
        t = self.table
        choices = [d for d in range(self.n) if t[d][x ^ 1] == UNDEF]
        if self.n < self.n_max:
            choices.append(self.n)
        if depth < len(prefix):
            choices = [choices[prefix[depth]]] if prefix[depth] < len(choices) else []
            ids = [prefix[depth]]
        else:
            ids = list(range(len(choices)))
        for k, d in zip(ids, choices):
            mark = len(self.trail)
            grew = d == self.n
            if grew:
                self.n += 1
            if self.assign(c, x, d) and self.minimality():
                path.append(k)
                self._dfs(c * self.ncols + x, depth + 1, prefix, depth_cut, collect, path)
                path.pop()
            self.undo(mark)
            if grew:
                self.n -= 1


def _worker(args):
    pres, max_index, budget, prefix = args
    s = _Search(pres, max_index, budget)
    s.run(prefix)
    return s.results, s.nodes


def low_index_subgroups(pres: Presentation, max_index: int, *, budget: int = DEFAULT_NODE_BUDGET,
                        normal_only: bool = False, jobs: int = 1) -> list[SubgroupClass]:
    """Conjugacy-class representatives of subgroups of index <= ``max_index``.

    Sorted by (index, standardized table).
    """
    if max_index < 1:
        raise ValueError("max_index must be at least 1")
    if pres.rank == 0:
        raw = [(((),), 1)]
    elif jobs > 1:
        s = _Search(pres, max_index, budget)
        prefixes: list[list[int]] = []
        s.run(depth_cut=4, collect=prefixes)
        raw = list(s.results)
        total = s.nodes
        with ProcessPoolExecutor(jobs) as ex:
            for res, nodes in ex.map(_worker, [(pres, max_index, budget, p) for p in prefixes]):
                raw.extend(res)
                total += nodes
        if total > budget:
            raise SearchBudgetExceeded(f"low-index node budget {budget} exceeded")
    else:
        s = _Search(pres, max_index, budget)
        s.run()
        raw = s.results
        log.debug("low-index search: %d nodes", s.nodes)
    out = []
    for table, eq in sorted(set(raw), key=lambda r: (len(r[0]), r[0])):
        n = len(table)
        T = CosetTable(pres, table, ())
        T = CosetTable(pres, table, tuple(T.schreier_generators()))
        sc = SubgroupClass(T, n, eq == n, n // eq)
        if normal_only and not sc.normal:
            continue
        out.append(sc)
    return out


def count_subgroups_total(pres: Presentation, index: int, classes: Sequence[SubgroupClass] | None = None,
                          **kw) -> int:
    """Number of subgroups (not classes) of index exactly ``index``."""
    if classes is None:
        classes = low_index_subgroups(pres, index, **kw)
    return sum(c.class_size for c in classes if c.index == index)

