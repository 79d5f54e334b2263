"""Scikit-learn style wrappers: fingerprints as a transformer, partitions as a clusterer."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .census import DEFAULT_WORK_BUDGET
from .classifier import (Fingerprint, IncompleteFingerprint, PartitionReport, build_fingerprints,
                         refine_partition, resolve_tier)
from .cosets import DEFAULT_LIMIT
from .finite_groups import BATTERY
from .presentation import Presentation, parse_presentation
from .register import RegisterEntry
from .store import ResultStore


def check_presentations(X) -> list[Presentation]:
    """Validate a batch of groups (Presentation, RegisterEntry or native text)."""
    if isinstance(X, (Presentation, RegisterEntry, str)):
        raise TypeError("expected a sequence of presentations, got a single item")
    try:
        items = list(X)
    except TypeError:
        raise TypeError(f"expected a sequence of presentations, got {type(X).__name__}") from None
    if not items:
        raise ValueError("empty batch: at least one presentation is required")
    out = []
    for k, x in enumerate(items):
        if isinstance(x, RegisterEntry):
            out.append(x.presentation)
        elif isinstance(x, Presentation):
            out.append(x)
        elif isinstance(x, str):
            out.append(parse_presentation(x))
        else:
            raise TypeError(f"item {k}: cannot interpret {type(x).__name__} as a presentation")
    return out


def _ids_for(X) -> list:
    ids = []
    for k, x in enumerate(X):
        if isinstance(x, RegisterEntry) and x.j is not None:
            ids.append(x.j)
        else:
            ids.append(getattr(x, "name", "") or k)
    return ids


def _check_targets(targets) -> tuple[str, ...]:
    if isinstance(targets, str):
        raise TypeError("targets must be a sequence of catalog names")
    t = tuple(targets)
    if len(set(t)) != len(t):
        raise ValueError("duplicate target names")
    return t


class FingerprintTransformer(TransformerMixin, BaseEstimator):
    """Map presentations to integer feature rows.

    Columns: H1 free rank, H1 torsion padded with 1 to ``torsion_width``, one
    distinct-kernel quotient count per target, and (with ``with_abcover``) the
    same H1 layout for the universal abelian cover.
    """

    def __init__(self, targets: Sequence[str] = BATTERY, with_abcover: bool = False,
                 torsion_width: int = 4, budget: int = DEFAULT_WORK_BUDGET, limit: int = DEFAULT_LIMIT,
                 jobs: int = 1, cache_dir: str | None = None):
        self.targets = targets
        self.with_abcover = with_abcover
        self.torsion_width = torsion_width
        self.budget = budget
        self.limit = limit
        self.jobs = jobs
        self.cache_dir = cache_dir

    def fit(self, X, y=None):
        check_presentations(X)
        self.targets_ = _check_targets(self.targets)
        if self.torsion_width < 1:
            raise ValueError("torsion_width must be positive")
        names = ["h1_free_rank"] + [f"h1_torsion_{k}" for k in range(self.torsion_width)]
        names += [f"quotients_{t}" for t in self.targets_]
        if self.with_abcover:
            names += ["abcover_free_rank"] + [f"abcover_torsion_{k}" for k in range(self.torsion_width)]
        self.feature_names_out_ = np.array(names, dtype=object)
        return self

    def fingerprints(self, X) -> list[Fingerprint]:
        check_is_fitted(self, "targets_")
        pres = check_presentations(X)
        store = ResultStore(self.cache_dir) if self.cache_dir else None
        return build_fingerprints(pres, self.targets_, self.with_abcover, ids=_ids_for(X), store=store,
                                  budget=self.budget, jobs=self.jobs, limit=self.limit)

    def _encode_ifs(self, v) -> list[int]:
        if len(v.torsion) > self.torsion_width:
            raise ValueError(f"H1 {v.format()} has more than {self.torsion_width} torsion factors")
        return [v.free_rank] + list(v.torsion) + [1] * (self.torsion_width - len(v.torsion))

    def transform(self, X):
        fps = self.fingerprints(X)
        self.fingerprints_ = fps
        rows = []
        for fp in fps:
            row = self._encode_ifs(fp.h1)
            for t in self.targets_:
                fp.value(t)  # raises on an incomplete component
                row.append(fp.profiles[t].quotient_count)
            if self.with_abcover:
                fp.value("abcover")
                row += self._encode_ifs(fp.abcover_h1)
            rows.append(row)
        return np.array(rows, dtype=np.int64).reshape(len(rows), len(self.feature_names_out_))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return self.feature_names_out_.copy()


class QuotientPartition(ClusterMixin, BaseEstimator):
    """Cluster presentations by agreement on a tier of invariants.

    ``labels_[i]`` is the index of the class of sample ``i`` in ``report_.classes``.
    ``predict`` assigns new presentations to a fitted class, or -1.
    """

    def __init__(self, tier: str | Iterable[str] = "full", budget: int = DEFAULT_WORK_BUDGET,
                 limit: int = DEFAULT_LIMIT, jobs: int = 1, cache_dir: str | None = None):
        self.tier = tier
        self.budget = budget
        self.limit = limit
        self.jobs = jobs
        self.cache_dir = cache_dir

    def _fingerprints(self, X) -> list[Fingerprint]:
        _, comps = resolve_tier(self.tier)
        targets = [c for c in comps if c not in ("h1", "abcover")]
        store = ResultStore(self.cache_dir) if self.cache_dir else None
        pres = check_presentations(X)
        return build_fingerprints(pres, targets, "abcover" in comps, ids=_ids_for(X), store=store,
                                  budget=self.budget, jobs=self.jobs, limit=self.limit)

    def fit(self, X, y=None):
        fps = self._fingerprints(X)
        ids = [fp.group_id for fp in fps]
        if len(set(ids)) != len(ids):
            fps = [Fingerprint(k, fp.h1, fp.profiles, fp.abcover_h1, fp.incomplete) for k, fp in enumerate(fps)]
        self.fingerprints_ = fps
        self.report_: PartitionReport = refine_partition(fps, self.tier)
        self.components_ = self.report_.components
        where = {g: k for k, c in enumerate(self.report_.classes) for g in c}
        self.labels_ = np.array([where[fp.group_id] for fp in fps], dtype=np.int64)
        self.class_keys_ = [tuple(next(fp for fp in fps if fp.group_id == c[0]).value(x)
                                  for x in self.components_) for c in self.report_.classes]
        return self

    def predict(self, X):
        check_is_fitted(self, "report_")
        fps = self._fingerprints(X)
        index = {key: k for k, key in enumerate(self.class_keys_)}
        out = []
        for fp in fps:
            try:
                key = tuple(fp.value(c) for c in self.components_)
            except IncompleteFingerprint:
                out.append(-1)
                continue
            out.append(index.get(key, -1))
        return np.array(out, dtype=np.int64)
