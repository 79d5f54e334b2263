"""Small finite groups realized as permutation groups, and the target catalog."""

from __future__ import annotations

import itertools
import math
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .presentation import Perm, perm_inv, perm_mul

DEFAULT_CEILING = 10_000


class OrderCeilingExceeded(RuntimeError):
    pass


class CatalogError(ValueError):
    pass


class FiniteGroup:
    """A permutation group given by generators.

    Elements are enumerated on first use (guarded by a lock) and indexed so
    that element 0 is the identity.  All derived tables are read-only after
    construction.
    """

    def __init__(self, name: str, generators: Sequence[Perm], degree: int | None = None,
                 ceiling: int = DEFAULT_CEILING):
        gens = [tuple(int(i) for i in g) for g in generators]
        if degree is None:
            degree = len(gens[0]) if gens else 1
        for g in gens:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise ValueError(f"{name}: generator {g} is not a permutation of degree {degree}")
        self.name = name
        self.degree = degree
        self.generators = tuple(gens)
        self.ceiling = ceiling
        self._lock = threading.Lock()
        self._elements: list[Perm] | None = None

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, degree={self.degree}, ngens={len(self.generators)})"

    # -- enumeration -------------------------------------------------------

    def _enumerate(self) -> list[Perm]:
        ident = tuple(range(self.degree))
        elems = [ident]
        seen = {ident: 0}
        i = 0
        while i < len(elems):
            x = elems[i]
            for g in self.generators:
                y = perm_mul(x, g)
                if y not in seen:
                    if len(elems) >= self.ceiling:
                        raise OrderCeilingExceeded(
                            f"{self.name}: more than {self.ceiling} elements")
                    seen[y] = len(elems)
                    elems.append(y)
            i += 1
        return elems

    @property
    def elements(self) -> list[Perm]:
        if self._elements is None:
            with self._lock:
                if self._elements is None:
                    elems = self._enumerate()
                    self._index = {p: k for k, p in enumerate(elems)}
                    n = len(elems)
                    mul = np.empty((n, n), dtype=np.int32)
                    for a, p in enumerate(elems):
                        for b, q in enumerate(elems):
                            mul[a, b] = self._index[perm_mul(p, q)]
                    mul.setflags(write=False)
                    self._mul = mul
                    inv = np.array([self._index[perm_inv(p)] for p in elems], dtype=np.int32)
                    inv.setflags(write=False)
                    self._inv = inv
                    self._gen_idx = tuple(self._index[g] for g in self.generators)
                    self._elements = elems
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> dict[Perm, int]:
        self.elements
        return self._index

    @property
    def mul(self) -> np.ndarray:
        """Multiplication table on element indices (row then column)."""
        self.elements
        return self._mul

    @property
    def inv(self) -> np.ndarray:
        self.elements
        return self._inv

    @property
    def generator_indices(self) -> tuple[int, ...]:
        self.elements
        return self._gen_idx

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = int(self.mul[x, a])
            k += 1
        return k

    @property
    def element_orders(self) -> list[int]:
        if not hasattr(self, "_orders"):
            self._orders = [self.element_order(a) for a in range(self.order)]
        return self._orders

    def power(self, a: int, k: int) -> int:
        m = self.element_orders[a]
        k %= m
        x = 0
        for _ in range(k):
            x = int(self.mul[x, a])
        return x

    def commutator(self, a: int, b: int) -> int:
        m, i = self.mul, self.inv
        return int(m[m[i[a], i[b]], m[a, b]])

    def is_abelian(self) -> bool:
        m = self.mul
        gs = self.generator_indices
        return all(m[a, b] == m[b, a] for a in gs for b in gs)

    # -- subgroups ---------------------------------------------------------

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        gens = [g for g in set(gens) if g != 0]
        seen = {0}
        frontier = [0]
        m = self.mul
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(m[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def normal_closure(self, elems: Iterable[int]) -> frozenset[int]:
        m, inv = self.mul, self.inv
        gens = set(elems)
        gs = self.generator_indices
        sub = self.closure(gens)
        while True:
            new = {int(m[m[inv[s], x], s]) for x in gens for s in gs}
            new -= sub
            if not new:
                return sub
            gens |= new
            sub = self.closure(gens)

    def generates(self, elems: Iterable[int]) -> bool:
        return len(self.closure(elems)) == self.order

    def conjugacy_classes(self) -> list[list[int]]:
        if not hasattr(self, "_classes"):
            m, inv = self.mul, self.inv
            seen = set()
            classes = []
            for a in range(self.order):
                if a in seen:
                    continue
                cls = sorted({int(m[m[inv[g], a], g]) for g in range(self.order)})
                seen.update(cls)
                classes.append(cls)
            self._classes = classes
        return self._classes

    def small_generating_tuple(self) -> tuple[int, ...]:
        """A generating tuple of minimal length (exhaustive up to length 2, greedy beyond)."""
        if not hasattr(self, "_small_gens"):
            n = self.order
            found = None
            if n == 1:
                found = ()
            if found is None:
                for a in range(1, n):
                    if self.element_orders[a] == n:
                        found = (a,)
                        break
            if found is None and n <= 4096:
                for a in range(1, n):
                    ca = self.closure([a])
                    for b in range(a + 1, n):
                        if b in ca:
                            continue
                        if len(self.closure([a, b])) == n:
                            found = (a, b)
                            break
                    if found:
                        break
            if found is None:
                cur: list[int] = []
                sub = frozenset([0])
                for g in self.generator_indices:
                    if g not in sub:
                        cur.append(g)
                        sub = self.closure(cur)
                found = tuple(cur)
            self._small_gens = found
        return self._small_gens

    def subgroups(self, limit: int = 5000) -> list[frozenset[int]] | None:
        """All subgroups as element sets, trivial first (None if more than ``limit``)."""
        if not hasattr(self, "_subgroups"):
            trivial = frozenset([0])
            seen = {trivial}
            order = [(trivial, [])]
            i = 0
            while i < len(order):
                s, gens = order[i]
                for x in range(self.order):
                    if x in s:
                        continue
                    t = self.closure(gens + [x])
                    if t not in seen:
                        seen.add(t)
                        order.append((t, gens + [x]))
                        if len(order) > limit:
                            self._subgroups = None
                            return None
                i += 1
            self._subgroups = [s for s, _ in order]
        return self._subgroups

    def closure_gens(self, s: frozenset[int]) -> list[int]:
        cur: list[int] = []
        sub = frozenset([0])
        for x in sorted(s):
            if x not in sub:
                cur.append(x)
                sub = self.closure(cur)
                if sub == s:
                    break
        return cur

    def join_table(self) -> tuple[np.ndarray, int] | None:
        """``J[s, x]`` = id of the subgroup generated by subgroup ``s`` and element ``x``.

        Subgroup 0 is trivial; returns ``(J, id_of_whole_group)``.
        """
        if not hasattr(self, "_join"):
            subs = self.subgroups()
            if subs is None:
                self._join = None
            else:
                ids = {s: k for k, s in enumerate(subs)}
                J = np.empty((len(subs), self.order), dtype=np.int32)
                gens_of = [self.closure_gens(s) for s in subs]
                for k, s in enumerate(subs):
                    for x in range(self.order):
                        J[k, x] = k if x in s else ids[self.closure(gens_of[k] + [x])]
                J.setflags(write=False)
                self._join = (J, ids[frozenset(range(self.order))])
        return self._join


def enumerate_elements(G: FiniteGroup) -> list[Perm]:
    """All elements of ``G`` (identity first); raises past the order ceiling."""
    return list(G.elements)


# ---------------------------------------------------------------------------
# automorphisms and classification

def _extend_hom(G: FiniteGroup, gens: Sequence[int], images: Sequence[int], H: FiniteGroup | None = None):
    """Map G -> H defined on ``gens``; None if it is not a well-defined homomorphism.

    Walks the Cayley graph of G and checks phi(x g) = phi(x) phi(g) on every edge.
    """
    H = H or G
    mg, mh = G.mul, H.mul
    phi = {0: 0}
    queue = [0]
    for x in queue:
        px = phi[x]
        for g, h in zip(gens, images):
            y = int(mg[x, g])
            v = int(mh[px, h])
            got = phi.get(y)
            if got is None:
                phi[y] = v
                queue.append(y)
            elif got != v:
                return None
    return phi


def automorphism_count(G: FiniteGroup) -> int:
    """Number of automorphisms, by exhaustive search over images of a generating tuple."""
    gens = G.small_generating_tuple()
    if not gens:
        return 1
    orders = G.element_orders
    cands = [[a for a in range(G.order) if orders[a] == orders[g]] for g in gens]
    count = 0
    for images in itertools.product(*cands):
        phi = _extend_hom(G, gens, images)
        if phi is not None and len(set(phi.values())) == G.order:
            count += 1
    return count


def classify_group(G: FiniteGroup) -> tuple[bool, bool]:
    """``(is_nilpotent, is_solvable)`` via the lower central and derived series."""
    gs = G.generator_indices
    whole = frozenset(range(G.order))

    cur = whole
    cur_gens = list(gs)
    while len(cur) > 1:
        nxt = G.normal_closure(G.commutator(a, s) for a in cur_gens for s in gs)
        if nxt == cur:
            break
        cur, cur_gens = nxt, G.closure_gens(nxt)
    nilpotent = len(cur) == 1

    cur = whole
    cur_gens = list(gs)
    while len(cur) > 1:
        nxt = G.normal_closure(G.commutator(a, b) for a in cur_gens for b in cur_gens)
        if nxt == cur:
            break
        cur, cur_gens = nxt, G.closure_gens(nxt)
    solvable = len(cur) == 1
    return nilpotent, solvable


# ---------------------------------------------------------------------------
# constructors

def symmetric_group(n: int) -> FiniteGroup:
    if n <= 1:
        return FiniteGroup(f"S{n}", [(0,)], 1)
    t = tuple([1, 0] + list(range(2, n)))
    c = tuple(list(range(1, n)) + [0])
    return FiniteGroup(f"S{n}", [t, c])


def alternating_group(n: int) -> FiniteGroup:
    if n <= 2:
        return FiniteGroup(f"A{n}", [tuple(range(max(n, 1)))])
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    return FiniteGroup(f"A{n}", gens)


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise CatalogError("cyclic group order must be positive")
    return FiniteGroup(f"Z{n}", [tuple((i + 1) % n for i in range(n))])


def metacyclic_group(m: int, k: int, r: int, faithful: bool = False, name: str | None = None) -> FiniteGroup:
    """Split extension Z/m x| Z/k where the Z/k generator acts by x -> r*x."""
    if m < 1 or k < 1:
        raise CatalogError("orders must be positive")
    r %= m
    if m > 1 and math.gcd(r, m) != 1:
        raise CatalogError(f"x -> {r}x is not an automorphism of Z/{m}")
    if pow(r, k, m) != 1 % m:
        raise CatalogError(f"action x -> {r}x does not have order dividing {k} on Z/{m}")
    act_order = 1
    while pow(r, act_order, m) != 1 % m:
        act_order += 1
    if faithful and act_order != k:
        raise CatalogError(f"action x -> {r}x has order {act_order}, not {k}: not faithful")
    name = name or f"Z{m}:Z{k}[{r}]"
    if act_order == k and m > 2:
        # faithful affine action on Z/m
        t = tuple((i + 1) % m for i in range(m))
        a = tuple((r * i) % m for i in range(m))
        return FiniteGroup(name, [t, a])
    # regular action on pairs (x, j): (x, j)*(y, l) = (x + r^j y, j + l)
    pts = [(x, j) for j in range(k) for x in range(m)]
    idx = {p: i for i, p in enumerate(pts)}
    t = tuple(idx[((x + pow(r, j, m)) % m, j)] for x, j in pts)
    a = tuple(idx[(x, (j + 1) % k)] for x, j in pts)
    return FiniteGroup(name, [t, a])


def dihedral_group(n: int) -> FiniteGroup:
    """Dihedral group of order 2n."""
    if n >= 3:
        rot = tuple((i + 1) % n for i in range(n))
        ref = tuple((-i) % n for i in range(n))
        return FiniteGroup(f"D{n}", [rot, ref])
    return metacyclic_group(n, 2, -1, name=f"D{n}")


def quaternion_group() -> FiniteGroup:
    # units 1, i, j, k with signs; element (s, u) <-> index 4*s + u
    table = {(0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
             (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
             (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
             (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0)}

    def mult(x, y):
        s, u = table[(x[1], y[1])]
        return ((x[0] + y[0] + s) % 2, u)

    pts = [(s, u) for s in range(2) for u in range(4)]
    idx = {p: i for i, p in enumerate(pts)}
    gens = [tuple(idx[mult(p, (0, g))] for p in pts) for g in (1, 2)]
    return FiniteGroup("Q8", gens)


def gl2_f3() -> FiniteGroup:
    vecs = [(a, b) for a in range(3) for b in range(3) if (a, b) != (0, 0)]
    idx = {v: i for i, v in enumerate(vecs)}

    def act(M):
        return tuple(idx[((v[0] * M[0][0] + v[1] * M[1][0]) % 3,
                          (v[0] * M[0][1] + v[1] * M[1][1]) % 3)] for v in vecs)

    return FiniteGroup("GL2F3", [act(((1, 1), (0, 1))), act(((1, 0), (1, 1))), act(((2, 0), (0, 1)))])


def agl1_f8() -> FiniteGroup:
    # F8 = F2[x]/(x^3 + x + 1), elements as 3-bit masks
    def fmul(a, b):
        r = 0
        for i in range(3):
            if b >> i & 1:
                r ^= a << i
        for i in (4, 3):
            if r >> i & 1:
                r ^= 0b1011 << (i - 3)
        return r

    scale = tuple(fmul(2, x) for x in range(8))
    shift = tuple(x ^ 1 for x in range(8))
    return FiniteGroup("AGL1F8", [scale, shift])


def direct_product(*groups: FiniteGroup, name: str | None = None) -> FiniteGroup:
    degree = sum(G.degree for G in groups)
    gens = []
    off = 0
    for G in groups:
        for g in G.generators:
            p = list(range(degree))
            for i, j in enumerate(g):
                p[off + i] = off + j
            gens.append(tuple(p))
        off += G.degree
    if not gens:
        gens = [tuple(range(degree))]
    return FiniteGroup(name or " x ".join(G.name for G in groups), gens, degree)


# name -> (expected order, constructor)
BATTERY = ("S3", "A4", "GL2F3", "AGL1F8", "D8", "D9", "D13", "Q8", "G27", "Z13xsZ4_faithful")
NILPOTENT_BATTERY = ("Q8", "D8", "G27")

_NAMED = {
    "GL2F3": gl2_f3,
    "AGL1F8": agl1_f8,
    "Q8": quaternion_group,
    "G27": lambda: metacyclic_group(9, 3, 4, faithful=True, name="G27"),
    "Z13xsZ4_faithful": lambda: metacyclic_group(13, 4, 5, faithful=True, name="Z13xsZ4_faithful"),
}

_META = re.compile(r"^Z(\d+):Z(\d+)\[(-?\d+)\](!?)$")


def make_named_group(spec: str) -> FiniteGroup:
    """Build a catalog group from its name or constructor spec.

    Accepted: the battery names, ``Sn``, ``An``, ``Dn`` (order 2n), ``Zn``/``Cn``,
    ``Zm:Zk[r]`` (split metacyclic, generator acts by x -> r x; trailing ``!``
    demands a faithful action) and direct products joined by `` x ``.
    """
    spec = spec.strip()
    if not spec:
        raise CatalogError("empty group name")
    parts = [s.strip() for s in re.split(r"\s+x\s+|×", spec)]
    if len(parts) > 1:
        return direct_product(*(make_named_group(p) for p in parts), name=spec)
    if spec in _NAMED:
        return _NAMED[spec]()
    if spec in ("1", "Z1", "C1", "trivial"):
        return FiniteGroup(spec, [(0,)], 1)
    m = _META.match(spec)
    if m:
        return metacyclic_group(int(m[1]), int(m[2]), int(m[3]), faithful=bool(m[4]), name=spec)
    m = re.match(r"^([SADZC])(\d+)$", spec)
    if m:
        kind, n = m[1], int(m[2])
        G = {"S": symmetric_group, "A": alternating_group, "D": dihedral_group,
             "Z": cyclic_group, "C": cyclic_group}[kind](n)
        G.name = spec
        return G
    raise CatalogError(f"unknown group {spec!r}")


@dataclass
class GroupCatalogEntry:
    group: FiniteGroup
    aut_order: int
    is_nilpotent: bool
    is_solvable: bool

    @property
    def name(self) -> str:
        return self.group.name


def catalog_entry(G: FiniteGroup) -> GroupCatalogEntry:
    nil, solv = classify_group(G)
    return GroupCatalogEntry(G, automorphism_count(G), nil, solv)


_ENTRY_CACHE: dict[str, GroupCatalogEntry] = {}
_ENTRY_LOCK = threading.Lock()


def get_entry(spec: str) -> GroupCatalogEntry:
    """Memoized catalog entry for a constructor spec."""
    with _ENTRY_LOCK:
        e = _ENTRY_CACHE.get(spec)
    if e is None:
        e = catalog_entry(make_named_group(spec))
        with _ENTRY_LOCK:
            e = _ENTRY_CACHE.setdefault(spec, e)
    return e


def load_catalog(path: str | Path | None = None) -> dict[str, str]:
    """Read ``name: spec`` lines; returns name -> constructor spec.

    Without a path, the bundled catalog (the default battery) is used.
    """
    if path is None:
        text = (Path(__file__).parent / "data" / "catalog.txt").read_text()
    else:
        text = Path(path).read_text()
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line and not _META.match(line):
            name, _, spec = line.partition(":")
            # "Z13:Z4[5]" style specs contain a colon; split on the first ": "
            if " " not in name.strip() and spec.startswith(" "):
                name, spec = name.strip(), spec.strip()
            else:
                name = spec = line
        else:
            name = spec = line
        if name in out:
            raise CatalogError(f"line {lineno}: duplicate catalog name {name!r}")
        out[name] = spec
    return out


def build_catalog(specs: dict[str, str]) -> dict[str, FiniteGroup]:
    out = {}
    for name, spec in specs.items():
        G = make_named_group(spec)
        G.name = name
        out[name] = G
    return out
