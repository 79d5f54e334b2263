from __future__ import annotations

import json

import pytest

from fppgroups.abelian import InvariantFactors
from fppgroups.classifier import (CERTIFICATE_ORDER_BOUND, TIERS, Certificate, Fingerprint,
                                  IncompleteFingerprint, build_fingerprints, check_battery_solvable,
                                  emit_certificates, refine_partition, replay_certificate, resolve_targets,
                                  resolve_tier)
from fppgroups.finite_groups import BATTERY
from fppgroups.register import load_register
from fppgroups.reports import hierarchy_line, load_certificates, render_reports
from fppgroups.store import ResultStore


@pytest.fixture(scope="module")
def toy():
    from conftest import DATA
    reg = load_register(DATA / "toy_register.grp")
    fps = build_fingerprints(reg, BATTERY, with_abcover=True)
    return reg, fps


def test_tiers_refine_each_other(toy):
    reg, fps = toy
    parts = {t: refine_partition(fps, t) for t in TIERS}
    assert [parts[t].class_count for t in ("h1", "nilpotent", "full")] == [5, 6, 7]
    assert parts["full"].multi_member_classes() == [(1, 2), (3, 4)]
    assert parts["abcover"].merged_pairs() == [(1, 2), (3, 4), (5, 6)]
    for fine, coarse in (("full", "nilpotent"), ("nilpotent", "h1")):
        for c in parts[fine].classes:
            assert set(c) <= set(parts[coarse].class_of(c[0]))


def test_partition_is_deterministic_and_order_free(toy):
    reg, fps = toy
    a = refine_partition(fps, "full")
    b = refine_partition(list(reversed(fps)), "full")
    assert a == b


def test_certificates(toy):
    reg, fps = toy
    certs = emit_certificates(fps)
    assert len(certs) == len(fps) * (len(fps) - 1) // 2
    by_pair = {c.pair: c for c in certs}
    assert by_pair[(1, 2)].kind == "none" and by_pair[(3, 4)].kind == "none"
    assert by_pair[(5, 6)].kind == "quotient" and by_pair[(5, 6)].target == "Q8"
    assert by_pair[(8, 9)].kind == "quotient" and by_pair[(8, 9)].target == "A4"
    assert all(c.max_target_order <= CERTIFICATE_ORDER_BOUND for c in certs)
    pres = {e.j: e.presentation for e in reg}
    for c in certs:
        ok, detail = replay_certificate(c, pres)
        assert ok, detail


def test_abcover_certificate_when_battery_is_only_h1():
    fa = Fingerprint(1, InvariantFactors(0, (3,)), abcover_h1=InvariantFactors(0, (2, 2)))
    fb = Fingerprint(2, InvariantFactors(0, (3,)), abcover_h1=InvariantFactors(0))
    (c,) = emit_certificates([fa, fb], {})
    assert c.kind == "abcover_h1" and c.values == ("Z/2 x Z/2", "1")


def test_tampered_certificate_fails_replay(toy):
    reg, _ = toy
    pres = {e.j: e.presentation for e in reg}
    bad = Certificate((8, 9), "quotient", "A4", (2, 0), 12)
    ok, _ = replay_certificate(bad, pres)
    assert not ok
    fake = Certificate((1, 2), "h1", None, ("Z/2", "Z/3"), 0)
    assert not replay_certificate(fake, pres)[0]


def test_certificate_validation():
    with pytest.raises(ValueError):
        Certificate((1, 2), "quotient", "S3", (1, 1), 6)
    with pytest.raises(ValueError):
        Certificate((1, 2), "quotient", "X", (1, 2), CERTIFICATE_ORDER_BOUND + 1)
    with pytest.raises(ValueError):
        Certificate((1, 2), "guess", None, (1, 2), 0)
    c = Certificate((1, 2), "h1", None, ("Z/2", "Z/3"), 0)
    assert Certificate.from_record(json.loads(json.dumps(c.to_record()))) == c


def test_fingerprint_records_and_missing_components(toy):
    _, fps = toy
    for fp in fps:
        assert Fingerprint.from_record(json.loads(json.dumps(fp.to_record()))) == fp
    partial = Fingerprint(1, InvariantFactors(0, (2,)), incomplete={"S3": "HomBudgetExceeded"})
    assert not partial.has("S3")
    with pytest.raises(IncompleteFingerprint, match="HomBudgetExceeded"):
        refine_partition([partial], "full")


def test_budget_exhaustion_is_recorded_per_component(toy):
    reg, _ = toy
    (fp,) = build_fingerprints([reg.by_j(5)], ["AGL1F8", "S3"], budget=5)
    assert "AGL1F8" in fp.incomplete and "S3" in fp.incomplete
    assert fp.h1 is not None


def test_cache_is_used_and_matches(tmp_path, toy):
    reg, fps = toy
    store = ResultStore(tmp_path)
    first = build_fingerprints(reg, BATTERY, with_abcover=True, store=store)
    assert first == fps
    assert list(tmp_path.rglob("*.json"))
    again = build_fingerprints(reg, BATTERY, with_abcover=True, store=store, jobs=2)
    assert again == fps


def test_tier_and_target_resolution():
    assert resolve_tier("nilpotent") == ("nilpotent", ("h1", "Q8", "D8", "G27"))
    assert resolve_tier(["h1", "S3"]) == ("h1+S3", ("h1", "S3"))
    with pytest.raises(ValueError):
        resolve_tier("everything")
    entries = resolve_targets(None)
    assert tuple(entries) == BATTERY and check_battery_solvable(entries)
    assert not check_battery_solvable(resolve_targets(["A5"]))


def test_reports_are_deterministic(tmp_path, toy):
    reg, fps = toy
    parts = {t: refine_partition(fps, t) for t in ("h1", "nilpotent", "full")}
    certs = emit_certificates(fps)
    for fmt, name in (("text", "report.txt"), ("csv", "report.csv"), ("records", "report.json")):
        a = render_reports(parts, certs, fmt, tmp_path / fmt, fingerprints=fps)
        b = render_reports(dict(reversed(list(parts.items()))), certs, fmt, fingerprints=fps)
        assert a == b
        assert (tmp_path / fmt / name).read_text() == a[name]
    text = render_reports(parts, certs, "text", fingerprints=fps)["report.txt"]
    assert "1 vs 2: no witness in battery" in text
    assert "hierarchy: 9 → 7 → 6 → 5" in text
    assert load_certificates(tmp_path / "text" / "certificates.json") == certs
    assert hierarchy_line(parts) == "9 → 7 → 6 → 5"


def test_empty_certificate_list_renders():
    from fppgroups.reports import render_text
    p = refine_partition([Fingerprint(1, InvariantFactors(0))], "h1")
    out = render_reports(p, [], "text")
    assert "certificates: 0" in out["report.txt"]
    assert json.loads(out["certificates.json"]) == []
    assert render_text({"h1": p}, []) == out["report.txt"]
