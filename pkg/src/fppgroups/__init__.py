"""Finite-quotient invariants of finitely presented groups.

Coset enumeration, low-index subgroups, Reidemeister-Schreier rewriting with
Tietze simplification, abelian invariants, homomorphism census against a
battery of small finite groups, and a classifier that partitions a register
of presentations by these invariants.
"""

from __future__ import annotations

__version__ = "1.0.0"

from .words import Word, commutator, free_reduce
from .presentation import (ParseError, Presentation, UndeclaredGenerator, evaluate_word, free_group,
                           parse_presentation, parse_word, perm_inv, perm_mul, perm_pow)
from .finite_groups import (BATTERY, NILPOTENT_BATTERY, CatalogError, FiniteGroup, GroupCatalogEntry,
                            OrderCeilingExceeded, automorphism_count, build_catalog, get_entry,
                            load_catalog, make_named_group)
from .cosets import (CosetLimitExceeded, CosetTable, enumerate_cosets, intersect_subgroups, is_normal,
                     table_from_action)
from .lowindex import SearchBudgetExceeded, SubgroupClass, low_index_subgroups
from .rewriting import RewrittenPresentation, TietzeResult, reidemeister_schreier, tietze_reduce
from .abelian import (InfiniteAbelianization, IntegerMatrix, InvariantFactors, abelian_cover_h1,
                      abelianization, h1_of_subgroup, invariant_factors, smith_normal_form)
from .census import (CensusError, HomBudgetExceeded, QuotientProfile, count_distinct_kernels,
                     count_homomorphisms, count_homomorphisms_reduced)
from .register import Register, RegisterEntry, RegisterError, load_register, parse_register
from .store import ResultStore
from .classifier import (Certificate, Fingerprint, PartitionReport, build_fingerprints, emit_certificates,
                         refine_partition, replay_certificate)
from .facts import verify_c2_facts, verify_common_cover_4750
from .reports import render_reports
from .estimators import FingerprintTransformer, QuotientPartition

import types as _types

__all__ = sorted(n for n, v in globals().items()
                 if not n.startswith("_") and n != "annotations" and not isinstance(v, _types.ModuleType))
