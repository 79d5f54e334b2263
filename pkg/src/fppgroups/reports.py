"""Deterministic text, CSV and JSON renderings of partitions and certificates."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Mapping, Sequence

from .classifier import Certificate, Fingerprint, PartitionReport

# a full register of 50 groups stands for 100 surfaces (conjugate pairs)
FULL_REGISTER_HEAD = (100, 50)
HIERARCHY_ORDER = ("full", "nilpotent", "h1")


def hierarchy_line(partitions: Mapping[str, PartitionReport]) -> str:
    """Class counts from the number of groups down to the coarsest tier."""
    n = sum(len(c) for c in next(iter(partitions.values())).classes)
    counts = [str(c) for c in (FULL_REGISTER_HEAD if n == FULL_REGISTER_HEAD[1] else (n,))]
    counts += [str(partitions[t].class_count) for t in HIERARCHY_ORDER if t in partitions]
    return " → ".join(counts)


def h1_cells(fingerprints: Sequence[Fingerprint], partition: PartitionReport) -> list[tuple[str, tuple]]:
    """Multi-member H1 classes as (H1 text, members), in member order."""
    by_id = {fp.group_id: fp for fp in fingerprints}
    return [(by_id[c[0]].h1.format(), c) for c in partition.multi_member_classes()]


def _label(gid, labels: Mapping | None) -> str:
    if labels and gid in labels and labels[gid]:
        return f"{gid} [{labels[gid]}]"
    return str(gid)


def render_text(partitions: Mapping[str, PartitionReport], certs: Sequence[Certificate],
                fingerprints: Sequence[Fingerprint] = (), labels: Mapping | None = None) -> str:
    out = []
    if fingerprints and "h1" in partitions:
        out.append("H1 cells with more than one member")
        for h1, members in h1_cells(fingerprints, partitions["h1"]):
            out.append(f"  {h1:<24} {', '.join(str(m) for m in members)}")
        out.append("")
    for name in sorted(partitions, key=lambda t: (t not in HIERARCHY_ORDER,
                                                   HIERARCHY_ORDER.index(t) if t in HIERARCHY_ORDER else 0, t)):
        p = partitions[name]
        out.append(f"tier {p.tier}: {p.class_count} classes ({', '.join(p.components)})")
        for c in p.multi_member_classes():
            out.append("  " + " ~ ".join(_label(g, labels) for g in c))
    if any(t in partitions for t in HIERARCHY_ORDER):
        out.append("")
        out.append("hierarchy: " + hierarchy_line(partitions))
    out.append("")
    out.append(f"certificates: {len(certs)}")
    for c in certs:
        out.append("  " + _cert_text(c))
    return "\n".join(out) + "\n"


def _cert_text(c: Certificate) -> str:
    a, b = c.pair
    if c.kind == "none":
        return f"{a} vs {b}: no witness in battery"
    if c.kind == "quotient":
        return f"{a} vs {b}: {c.target} quotients {c.values[0]} vs {c.values[1]} (order {c.max_target_order})"
    what = "H1" if c.kind == "h1" else "abelian cover H1"
    return f"{a} vs {b}: {what} {c.values[0]} vs {c.values[1]}"


def render_csv(partitions: Mapping[str, PartitionReport], certs: Sequence[Certificate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "tier_or_kind", "class_or_pair", "target", "value_a", "value_b", "order"])
    for name in sorted(partitions):
        p = partitions[name]
        for k, c in enumerate(p.classes):
            w.writerow(["class", p.tier, " ".join(str(g) for g in c), "", k, "", ""])
    for c in certs:
        va, vb = ("", "") if c.kind == "none" else c.values
        w.writerow(["certificate", c.kind, f"{c.pair[0]} {c.pair[1]}", c.target or "", va, vb,
                    c.max_target_order])
    return buf.getvalue()


def render_records(partitions: Mapping[str, PartitionReport], certs: Sequence[Certificate],
                   fingerprints: Sequence[Fingerprint] = ()) -> str:
    data = {
        "partitions": {k: partitions[k].to_record() for k in sorted(partitions)},
        "certificates": [c.to_record() for c in certs],
        "fingerprints": [fp.to_record() for fp in fingerprints],
    }
    if any(t in partitions for t in HIERARCHY_ORDER):
        data["hierarchy"] = hierarchy_line(partitions)
    return json.dumps(data, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def render_reports(partitions: PartitionReport | Mapping[str, PartitionReport], certs: Sequence[Certificate],
                   fmt: str = "text", out_dir: str | Path | None = None, *,
                   fingerprints: Sequence[Fingerprint] = (), labels: Mapping | None = None) -> dict[str, str]:
    """Render reports; returns ``{filename: content}`` and writes them when ``out_dir`` is given."""
    if isinstance(partitions, PartitionReport):
        partitions = {partitions.tier: partitions}
    if fmt == "text":
        files = {"report.txt": render_text(partitions, certs, fingerprints, labels)}
    elif fmt == "csv":
        files = {"report.csv": render_csv(partitions, certs)}
    elif fmt == "records":
        files = {"report.json": render_records(partitions, certs, fingerprints)}
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    files["certificates.json"] = json.dumps([c.to_record() for c in certs], indent=1,
                                            ensure_ascii=False) + "\n"
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, content in files.items():
            (out / name).write_text(content, encoding="utf-8")
    return files


def load_certificates(path: str | Path) -> list[Certificate]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = [data]
    return [Certificate.from_record(r) for r in data]
