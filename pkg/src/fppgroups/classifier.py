"""Finite-quotient fingerprints, partition refinement and distinguishing certificates."""

from __future__ import annotations

import dataclasses
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .abelian import InvariantFactors, abelian_cover_h1, abelianization
from .census import DEFAULT_WORK_BUDGET, QuotientProfile, count_homomorphisms_reduced
from .cosets import DEFAULT_LIMIT
from .finite_groups import (BATTERY, NILPOTENT_BATTERY, FiniteGroup, GroupCatalogEntry, catalog_entry,
                            get_entry, load_catalog)
from .presentation import Presentation
from .register import RegisterEntry
from .store import ENGINE_VERSION, ResultStore, content_key

log = logging.getLogger(__name__)

CERTIFICATE_ORDER_BOUND = 248

TIERS: dict[str, tuple[str, ...]] = {
    "h1": ("h1",),
    "nilpotent": ("h1",) + NILPOTENT_BATTERY,
    "full": ("h1",) + BATTERY,
    "abcover": ("h1", "abcover"),
}


class IncompleteFingerprint(ValueError):
    pass


def resolve_tier(tier: str | Iterable[str]) -> tuple[str, tuple[str, ...]]:
    """Tier name and its components (``h1``, ``abcover`` or target names)."""
    if isinstance(tier, str):
        if tier not in TIERS:
            raise ValueError(f"unknown tier {tier!r}; expected one of {sorted(TIERS)}")
        return tier, TIERS[tier]
    comps = tuple(tier)
    return "+".join(comps), comps


def resolve_targets(targets: Iterable[str] | Mapping[str, FiniteGroup] | None,
                    catalog: Mapping[str, str] | None = None) -> dict[str, GroupCatalogEntry]:
    """Map target names to catalog entries (names are looked up in the catalog,
    otherwise read as constructor specs)."""
    if targets is None:
        targets = BATTERY
    if isinstance(targets, Mapping):
        return {name: catalog_entry(G) for name, G in targets.items()}
    cat = load_catalog() if catalog is None else dict(catalog)
    return {name: get_entry(cat.get(name, name)) for name in targets}


def check_battery_solvable(entries: Mapping[str, GroupCatalogEntry]) -> bool:
    return all(e.is_solvable for e in entries.values())


@dataclass
class Fingerprint:
    group_id: Any
    h1: InvariantFactors | None
    profiles: dict[str, QuotientProfile] = field(default_factory=dict)
    abcover_h1: InvariantFactors | None = None
    incomplete: dict[str, str] = field(default_factory=dict)

    def value(self, component: str):
        """Hashable value of one component; raises if it was not computed."""
        if component == "h1":
            v = self.h1
        elif component == "abcover":
            v = self.abcover_h1
        else:
            p = self.profiles.get(component)
            v = None if p is None else p.quotient_count
        if v is None:
            why = self.incomplete.get(component, "not computed")
            raise IncompleteFingerprint(f"group {self.group_id}: component {component!r} missing ({why})")
        if isinstance(v, InvariantFactors):
            return (v.free_rank, v.torsion)
        return v

    def has(self, component: str) -> bool:
        try:
            self.value(component)
        except IncompleteFingerprint:
            return False
        return True

    def to_record(self) -> dict:
        return {
            "group_id": self.group_id,
            "h1": None if self.h1 is None else self.h1.to_record(),
            "profiles": {k: p.to_record() for k, p in self.profiles.items()},
            "abcover_h1": None if self.abcover_h1 is None else self.abcover_h1.to_record(),
            "incomplete": dict(self.incomplete),
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "Fingerprint":
        return cls(rec["group_id"],
                   None if rec.get("h1") is None else InvariantFactors.from_record(rec["h1"]),
                   {k: QuotientProfile.from_record(p) for k, p in rec.get("profiles", {}).items()},
                   None if rec.get("abcover_h1") is None else InvariantFactors.from_record(rec["abcover_h1"]),
                   dict(rec.get("incomplete", {})))


def _as_presentation(g) -> Presentation:
    return g.presentation if isinstance(g, RegisterEntry) else g


def _default_id(g, k: int):
    if isinstance(g, RegisterEntry) and g.j is not None:
        return g.j
    name = getattr(g, "name", "")
    return name or k + 1


class _Cached:
    def __init__(self, store: ResultStore | None):
        self.store = store

    def __call__(self, key_parts: tuple, compute, encode, decode):
        key = content_key(ENGINE_VERSION, *key_parts)
        if self.store is not None:
            hit = self.store.get(key)
            if hit is not None:
                return decode(hit)
        value = compute()
        if self.store is not None:
            self.store.put(key, encode(value))
        return value


def fingerprint_one(P: Presentation, group_id, targets: Mapping[str, GroupCatalogEntry], *,
                    with_abcover: bool = False, store: ResultStore | None = None,
                    budget: int = DEFAULT_WORK_BUDGET, jobs: int = 1,
                    limit: int = DEFAULT_LIMIT) -> Fingerprint:
    cached = _Cached(store)
    digest = P.digest()
    fp = Fingerprint(group_id, None)
    fp.h1 = cached(("h1", digest), lambda: abelianization(P), lambda v: v.to_record(),
                   InvariantFactors.from_record)
    for name, entry in targets.items():
        G = entry.group
        spec = (name, G.order, [list(g) for g in G.generators])

        def compute(G=G, name=name, entry=entry):
            prof = count_homomorphisms_reduced(P, G, budget=budget, jobs=jobs, aut_order=entry.aut_order)
            return dataclasses.replace(prof, target=name)

        try:
            fp.profiles[name] = cached(("hom", digest, spec), compute, lambda v: v.to_record(),
                                       QuotientProfile.from_record)
        except RuntimeError as exc:  # budget or search failures stay visible per component
            fp.incomplete[name] = f"{type(exc).__name__}: {exc}"
    if with_abcover:
        try:
            fp.abcover_h1 = cached(("abcover", digest, limit), lambda: abelian_cover_h1(P, limit),
                                   lambda v: v.to_record(), InvariantFactors.from_record)
        except (RuntimeError, ValueError) as exc:
            fp.incomplete["abcover"] = f"{type(exc).__name__}: {exc}"
    return fp


def build_fingerprints(groups: Sequence[Presentation | RegisterEntry],
                       targets: Iterable[str] | Mapping[str, FiniteGroup] | None = BATTERY,
                       with_abcover: bool = False, *, ids: Sequence | None = None,
                       store: ResultStore | None = None, budget: int = DEFAULT_WORK_BUDGET,
                       jobs: int = 1, limit: int = DEFAULT_LIMIT) -> list[Fingerprint]:
    """One fingerprint per group: H1, distinct-kernel quotient counts for each
    target and optionally H1 of the universal abelian cover."""
    entries = resolve_targets(targets if targets is not None else ())
    if ids is None:
        ids = [_default_id(g, k) for k, g in enumerate(groups)]
    if len(ids) != len(groups):
        raise ValueError("ids and groups differ in length")
    pres = [_as_presentation(g) for g in groups]

    def one(k):
        return fingerprint_one(pres[k], ids[k], entries, with_abcover=with_abcover, store=store,
                               budget=budget, jobs=1 if jobs > 1 else jobs, limit=limit)

    if jobs > 1 and len(pres) > 1:
        with ThreadPoolExecutor(jobs) as ex:
            return list(ex.map(one, range(len(pres))))
    return [one(k) for k in range(len(pres))]


def _idkey(x):
    return (0, x, "") if isinstance(x, int) else (1, 0, str(x))


@dataclass(frozen=True)
class PartitionReport:
    tier: str
    components: tuple[str, ...]
    classes: tuple[tuple, ...]
    class_count: int

    def class_of(self, group_id) -> tuple:
        for c in self.classes:
            if group_id in c:
                return c
        raise KeyError(group_id)

    def multi_member_classes(self) -> list[tuple]:
        return [c for c in self.classes if len(c) > 1]

    def merged_pairs(self) -> list[tuple]:
        return [p for c in self.classes for p in itertools.combinations(c, 2)]

    def to_record(self) -> dict:
        return {"tier": self.tier, "components": list(self.components),
                "classes": [list(c) for c in self.classes], "class_count": self.class_count}


def refine_partition(fingerprints: Sequence[Fingerprint], tier: str | Iterable[str] = "h1") -> PartitionReport:
    """Group fingerprints that agree on every component of the tier."""
    name, comps = resolve_tier(tier)
    buckets: dict[tuple, list] = {}
    for fp in fingerprints:
        key = tuple(fp.value(c) for c in comps)
        buckets.setdefault(key, []).append(fp.group_id)
    classes = sorted((tuple(sorted(v, key=_idkey)) for v in buckets.values()), key=lambda c: _idkey(c[0]))
    return PartitionReport(name, comps, tuple(classes), len(classes))


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class Certificate:
    """Why two groups differ: ``kind`` is ``h1``, ``quotient``, ``abcover_h1``
    or ``none`` (no component of the battery separates them)."""

    pair: tuple
    kind: str
    target: str | None
    values: tuple
    max_target_order: int

    def __post_init__(self):
        if self.kind not in ("h1", "quotient", "abcover_h1", "none"):
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.kind != "none" and self.values[0] == self.values[1]:
            raise ValueError("certificate values do not differ")
        if self.max_target_order > CERTIFICATE_ORDER_BOUND:
            raise ValueError(f"witness order {self.max_target_order} exceeds {CERTIFICATE_ORDER_BOUND}")

    @property
    def separated(self) -> bool:
        return self.kind != "none"

    def to_record(self) -> dict:
        return {"pair": list(self.pair), "kind": self.kind, "target": self.target,
                "values": list(self.values), "max_target_order": self.max_target_order}

    @classmethod
    def from_record(cls, rec: Mapping) -> "Certificate":
        vals = tuple(_freeze(v) for v in rec["values"])
        return cls(tuple(rec["pair"]), rec["kind"], rec.get("target"), vals, int(rec["max_target_order"]))


def _freeze(v):
    return tuple(_freeze(x) for x in v) if isinstance(v, list) else v


def _ifs_value(v: InvariantFactors) -> str:
    return v.format()


def emit_certificates(fingerprints: Sequence[Fingerprint],
                      orders: Mapping[str, int] | None = None) -> list[Certificate]:
    """One certificate per pair: the smallest-order separating witness, or a
    ``none`` record when nothing computed separates the pair."""
    targets = sorted({t for fp in fingerprints for t in fp.profiles})
    if orders is None:
        cat = load_catalog()
        orders = {t: get_entry(cat.get(t, t)).group.order for t in targets}
    by_order = sorted(targets, key=lambda t: (orders[t], t))
    fps = sorted(fingerprints, key=lambda f: _idkey(f.group_id))
    certs = []
    for a, b in itertools.combinations(fps, 2):
        pair = (a.group_id, b.group_id)
        if a.h1 is not None and b.h1 is not None and a.h1 != b.h1:
            certs.append(Certificate(pair, "h1", None, (_ifs_value(a.h1), _ifs_value(b.h1)), 0))
            continue
        for t in by_order:
            pa, pb = a.profiles.get(t), b.profiles.get(t)
            if pa is not None and pb is not None and pa.quotient_count != pb.quotient_count:
                certs.append(Certificate(pair, "quotient", t, (pa.quotient_count, pb.quotient_count), orders[t]))
                break
        else:
            if a.abcover_h1 is not None and b.abcover_h1 is not None and a.abcover_h1 != b.abcover_h1:
                certs.append(Certificate(pair, "abcover_h1", None,
                                         (_ifs_value(a.abcover_h1), _ifs_value(b.abcover_h1)),
                                         a.h1.order if a.h1 is not None else 0))
            else:
                certs.append(Certificate(pair, "none", None, (None, None), 0))
    return certs


def replay_certificate(cert: Certificate, presentations: Mapping[Any, Presentation], *,
                       targets: Iterable[str] | None = None, budget: int = DEFAULT_WORK_BUDGET,
                       limit: int = DEFAULT_LIMIT) -> tuple[bool, str]:
    """Recompute the witness from scratch (no cache).  For ``none`` records the
    battery is recomputed and must agree on every component."""
    P, Q = presentations[cert.pair[0]], presentations[cert.pair[1]]
    if cert.kind == "h1":
        vals = (abelianization(P).format(), abelianization(Q).format())
    elif cert.kind == "abcover_h1":
        vals = (abelian_cover_h1(P, limit).format(), abelian_cover_h1(Q, limit).format())
    elif cert.kind == "quotient":
        entry = resolve_targets([cert.target])[cert.target]
        vals = tuple(count_homomorphisms_reduced(X, entry.group, budget=budget,
                                                 aut_order=entry.aut_order).quotient_count for X in (P, Q))
    else:
        fa, fb = build_fingerprints([P, Q], targets if targets is not None else BATTERY, ids=list(cert.pair),
                                    budget=budget, limit=limit)
        comps = ["h1"] + list(fa.profiles)
        differ = [c for c in comps if fa.value(c) != fb.value(c)]
        if differ:
            return False, f"battery separates the pair on {differ}"
        return True, "battery agrees on every component"
    ok = tuple(vals) == tuple(cert.values) and vals[0] != vals[1]
    return ok, f"recomputed {vals[0]} vs {vals[1]}, recorded {cert.values[0]} vs {cert.values[1]}"
