"""Exact integer Smith normal form and first homology of presentations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

from .cosets import DEFAULT_LIMIT, CosetLimitExceeded, CosetTable, table_from_action
from .presentation import Presentation
from .rewriting import reidemeister_schreier, tietze_simplify


class InfiniteAbelianization(ValueError):
    pass


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ents = tuple(tuple(int(v) for v in r) for r in self.entries)
        if len(ents) != self.rows or any(len(r) != self.cols for r in ents):
            raise ValueError("matrix dimensions do not match entries")
        object.__setattr__(self, "entries", ents)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntegerMatrix(self.rows, other.cols, tuple(
            tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.entries))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return _bareiss_det(self.tolist())


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    a = [r[:] for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class InvariantFactors:
    """A finitely generated abelian group ``Z^free_rank x Z/d1 x ... x Z/dk``."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        tor = tuple(int(d) for d in self.torsion)
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        if any(d < 2 for d in tor):
            raise ValueError("torsion factors must be at least 2")
        if any(b % a for a, b in zip(tor, tor[1:])):
            raise ValueError(f"torsion {tor} is not a divisibility chain")
        object.__setattr__(self, "torsion", tor)

    @classmethod
    def from_diagonal(cls, diagonal: Iterable[int], ncols: int) -> "InvariantFactors":
        diag = [abs(d) for d in diagonal]
        nonzero = [d for d in diag if d]
        return cls(ncols - len(nonzero), tuple(d for d in nonzero if d > 1))

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int:
        """Group order, or 0 when infinite."""
        return prod(self.torsion) if self.free_rank == 0 else 0

    def format(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " x ".join(parts) if parts else "1"

    __str__ = format

    def to_record(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_record(cls, rec: dict) -> "InvariantFactors":
        return cls(int(rec["free_rank"]), tuple(rec["torsion"]))


def _as_lists(M) -> tuple[list[list[int]], int, int]:
    if isinstance(M, IntegerMatrix):
        return M.tolist(), M.rows, M.cols
    rows = [[int(v) for v in r] for r in M]
    return rows, len(rows), (len(rows[0]) if rows else 0)


def smith_normal_form(M) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Return ``(S, U, V)`` with ``U @ M @ V == S``, ``U`` and ``V`` unimodular
    and ``S`` diagonal with nonnegative entries forming a divisibility chain."""
    A, m, n = _as_lists(M)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_add(dst, src, q):  # row dst -= q * row src
        if q:
            ra, rs = A[dst], A[src]
            for k in range(n):
                ra[k] -= q * rs[k]
            ua, us = U[dst], U[src]
            for k in range(m):
                ua[k] -= q * us[k]

    def col_add(dst, src, q):  # col dst -= q * col src
        if q:
            for r in A:
                r[dst] -= q * r[src]
            for r in V:
                r[dst] -= q * r[src]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            p = A[t][t]
            moved = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, A[i][t] // p)
                    if A[i][t]:
                        row_swap(t, i)
                        moved = True
                        break
            if moved:
                continue
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, A[t][j] // p)
                    if A[t][j]:
                        col_swap(t, j)
                        moved = True
                        break
            if moved:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            U[t] = [-v for v in U[t]]
    return (IntegerMatrix.from_rows(A, n), IntegerMatrix.from_rows(U, m),
            IntegerMatrix.from_rows(V, n))


def snf_diagonal(S: IntegerMatrix) -> list[int]:
    return [S.entries[i][i] for i in range(min(S.rows, S.cols))]


def invariant_factors(M, ncols: int | None = None) -> InvariantFactors:
    """Invariant factors of the cokernel ``Z^ncols / rowspace(M)`` without
    tracking transforms.  Unit pivots are eliminated on a sparse copy first."""
    rows = [dict((j, int(v)) for j, v in enumerate(r) if v) for r in
            (M.entries if isinstance(M, IntegerMatrix) else M)]
    if ncols is None:
        ncols = M.cols if isinstance(M, IntegerMatrix) else (len(M[0]) if len(M) else 0)
    rows = [r for r in rows if r]
    units = 0
    while True:
        hit = None
        for i, r in enumerate(rows):
            for j, v in r.items():
                if v in (1, -1):
                    hit = (i, j, v)
                    break
            if hit:
                break
        if hit is None:
            break
        i, j, v = hit
        piv = rows.pop(i)
        units += 1
        for r in rows:
            c = r.get(j)
            if c:
                q = c * v  # v = +-1 so v^-1 = v
                for k, pv in piv.items():
                    nv = r.get(k, 0) - q * pv
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        # column j is now zero outside the pivot row; drop pivot row and column
        rows = [r for r in rows if r]
    cols = sorted({j for r in rows for j in r})
    colpos = {j: k for k, j in enumerate(cols)}
    dense = [[0] * len(cols) for _ in rows]
    for i, r in enumerate(rows):
        for j, v in r.items():
            dense[i][colpos[j]] = v
    rest = ncols - units - len(cols)  # untouched zero columns are free
    if dense and cols:
        S, _, _ = smith_normal_form(dense)
        inv = InvariantFactors.from_diagonal(snf_diagonal(S), len(cols))
    else:
        inv = InvariantFactors(len(cols))
    return InvariantFactors(inv.free_rank + rest, inv.torsion)


def relation_matrix(P: Presentation) -> IntegerMatrix:
    """Exponent-sum matrix: one row per relator, one column per generator."""
    return IntegerMatrix.from_rows([r.exponent_sums(P.rank) for r in P.relators], P.rank)


def abelianization(P: Presentation) -> InvariantFactors:
    return invariant_factors(relation_matrix(P), P.rank)


def h1_of_subgroup(T: CosetTable, simplify: bool = True) -> InvariantFactors:
    """First homology of the subgroup described by a complete coset table."""
    R = reidemeister_schreier(T).presentation
    if simplify:
        R = tietze_simplify(R)
    return abelianization(R)


def abelianization_map(P: Presentation) -> tuple[InvariantFactors, list[tuple[int, ...]]]:
    """Invariant factors and the image of each generator in ``Z/d1 x ... x Z/dk``.

    Requires finite abelianization.
    """
    M = relation_matrix(P)
    if M.rows == 0:
        if P.rank:
            raise InfiniteAbelianization("abelianization is infinite")
        return InvariantFactors(0), []
    S, _, V = smith_normal_form(M)
    diag = snf_diagonal(S) + [0] * max(0, P.rank - M.rows)
    diag = diag[:P.rank]
    if any(d == 0 for d in diag):
        raise InfiniteAbelianization("abelianization is infinite")
    keep = [k for k, d in enumerate(diag) if d > 1]
    moduli = [diag[k] for k in keep]
    images = [tuple(V.entries[g][k] % diag[k] for k in keep) for g in range(P.rank)]
    return InvariantFactors(0, tuple(moduli)), images


def abelian_kernel_table(P: Presentation, limit: int = DEFAULT_LIMIT) -> CosetTable:
    """Coset table of the kernel of ``P`` onto its (finite) abelianization."""
    inv, images = abelianization_map(P)
    moduli = inv.torsion
    order = prod(moduli)
    if order > limit:
        raise CosetLimitExceeded(f"abelianization order {order} exceeds coset limit {limit}")
    points = list(itertools.product(*(range(d) for d in moduli)))
    index = {p: i for i, p in enumerate(points)}
    perms = []
    for img in images:
        perms.append(tuple(index[tuple((a + b) % d for a, b, d in zip(p, img, moduli))] for p in points))
    T = table_from_action(P, perms, 0)
    if T.index != order:
        raise RuntimeError(f"kernel index {T.index} differs from |H1| = {order}")
    return T


def abelian_cover_h1(P: Presentation, limit: int = DEFAULT_LIMIT) -> InvariantFactors:
    """First homology of the kernel of ``P`` onto its abelianization."""
    return h1_of_subgroup(abelian_kernel_table(P, limit))
