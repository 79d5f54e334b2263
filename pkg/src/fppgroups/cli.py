"""Command-line interface."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .abelian import InfiniteAbelianization, abelian_cover_h1, abelianization, h1_of_subgroup
from .census import DEFAULT_WORK_BUDGET, CensusError, HomBudgetExceeded, count_homomorphisms, \
    count_homomorphisms_reduced
from .classifier import (TIERS, build_fingerprints, emit_certificates, refine_partition, replay_certificate,
                         resolve_targets)
from .cosets import DEFAULT_LIMIT, CosetLimitExceeded, enumerate_cosets
from .facts import verify_c2_facts, verify_common_cover_4750
from .finite_groups import BATTERY, CatalogError, OrderCeilingExceeded, load_catalog
from .lowindex import DEFAULT_NODE_BUDGET, SearchBudgetExceeded, low_index_subgroups
from .presentation import ParseError, Presentation, load_records, parse_presentation, parse_word_list
from .register import Register, RegisterError, convert_magma_register, load_register
from .reports import load_certificates, render_reports
from .rewriting import reidemeister_schreier, tietze_reduce
from .store import ResultStore


EXIT_OK, EXIT_COMPUTE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# input helpers

def read_presentation(path: str, entry: str | None = None, *, limit: int = DEFAULT_LIMIT) -> Presentation:
    """A single presentation from a native file, a JSON record file or a register entry."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if p.suffix.lower() == ".json":
        data = json.loads(text)
        if isinstance(data, list) and data and ("subgroup" in data[0] or "j" in data[0] or "is_ambient" in data[0]):
            return _pick(load_register(p, limit=limit, check_labels=False), entry)
        pres = load_records(text)
        return _pick_plain(pres, entry)
    if stripped.startswith("<"):
        if entry is not None:
            raise InputError("--entry given but the file holds a single presentation")
        return parse_presentation(text, name=p.stem)
    return _pick(load_register(p, limit=limit, check_labels=False), entry)


def _pick_plain(pres: list[Presentation], entry: str | None) -> Presentation:
    if entry is None:
        if len(pres) != 1:
            raise InputError(f"file holds {len(pres)} presentations; choose one with --entry")
        return pres[0]
    for k, P in enumerate(pres):
        if P.name == entry or str(k + 1) == entry:
            return P
    raise InputError(f"no presentation named {entry!r}")


def _pick(reg: Register, entry: str | None) -> Presentation:
    everything = list(reg.entries) + list(reg.auxiliary)
    if entry is None:
        if len(everything) != 1:
            raise InputError(f"register holds {len(everything)} entries; choose one with --entry")
        return everything[0].presentation
    for e in everything:
        if e.name == entry or (e.j is not None and str(e.j) == entry):
            return e.presentation
    if entry in reg.ambients:
        return reg.ambients[entry]
    raise InputError(f"no register entry {entry!r}")


def _catalog(path: str | None) -> dict[str, str]:
    return load_catalog(path) if path else load_catalog()


# ---------------------------------------------------------------------------
# output helpers

def emit(args, record: Any, text: str) -> None:
    fmt = args.format
    if fmt == "records":
        sys.stdout.write(json.dumps(record, indent=1, ensure_ascii=False, sort_keys=True) + "\n")
    elif fmt == "csv":
        rows = record if isinstance(record, list) else [record]
        rows = [r if isinstance(r, dict) else {"value": r} for r in rows]
        buf = io.StringIO()
        keys: list[str] = []
        for r in rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v, ensure_ascii=False) if isinstance(v, (list, dict)) else v
                        for k, v in r.items()})
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cycles(perm: Sequence[int]) -> str:
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            seen.add(i)
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = perm[j]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "()"


# ---------------------------------------------------------------------------
# commands

def cmd_targets(args) -> int:
    cat = _catalog(args.catalog)
    entries = resolve_targets(list(cat), cat)
    rows = []
    lines = [f"{'name':<18} {'order':>5} {'|Aut|':>6}  nilpotent  solvable"]
    for name, e in entries.items():
        rows.append({"name": name, "spec": cat[name], "order": e.group.order, "aut_order": e.aut_order,
                     "nilpotent": e.is_nilpotent, "solvable": e.is_solvable})
        lines.append(f"{name:<18} {e.group.order:>5} {e.aut_order:>6}  {str(e.is_nilpotent):<9}  {e.is_solvable}")
    emit(args, rows, "\n".join(lines))
    return EXIT_OK


def cmd_cosets(args) -> int:
    P = read_presentation(args.file, args.entry, limit=args.limit)
    words = parse_word_list(args.subgroup or "", P.generators)
    T = enumerate_cosets(P, words, args.limit, strategy=args.strategy)
    rec: dict[str, Any] = {"index": T.index}
    text = [f"index {T.index}"]
    if args.perm:
        perms = {name: _cycles(T.perm(g)) for g, name in enumerate(P.generators)}
        rec["permutations"] = perms
        text += [f"{name} -> {c}" for name, c in perms.items()]
    emit(args, rec, "\n".join(text))
    return EXIT_OK


def cmd_lowindex(args) -> int:
    P = read_presentation(args.file, args.entry, limit=args.limit)
    classes = low_index_subgroups(P, args.max, budget=args.budget or DEFAULT_NODE_BUDGET,
                                  normal_only=args.normal_only, jobs=args.jobs)
    rows, lines = [], []
    for c in classes:
        words = [P.format_word(w) for w in c.table.schreier_generators()]
        rows.append({"index": c.index, "normal": c.normal, "class_size": c.class_size, "generators": words})
        lines.append(f"index {c.index:>3}  {'normal' if c.normal else 'class size ' + str(c.class_size):<14}"
                     f"  < {', '.join(words)} >")
    lines.append(f"{len(classes)} classes")
    emit(args, rows, "\n".join(lines))
    return EXIT_OK


def cmd_rewrite(args) -> int:
    P = read_presentation(args.file, args.entry, limit=args.limit)
    words = parse_word_list(args.subgroup or "", P.generators)
    T = enumerate_cosets(P, words, args.limit)
    R = reidemeister_schreier(T)
    out = R.presentation
    log_lines: list[str] = []
    if not args.raw:
        res = tietze_reduce(out)
        out, log_lines = res.presentation, res.log
    rec = {"index": T.index, "presentation": out.format(), "schreier_generators": R.presentation.rank,
           "tietze_log": log_lines}
    emit(args, rec, out.format())
    return EXIT_OK


def cmd_abelianize(args) -> int:
    P = read_presentation(args.file, args.entry, limit=args.limit)
    if args.subgroup:
        T = enumerate_cosets(P, parse_word_list(args.subgroup, P.generators), args.limit)
        inv = h1_of_subgroup(T)
    else:
        inv = abelianization(P)
    emit(args, inv.to_record() | {"text": inv.format()}, inv.format())
    return EXIT_OK


def cmd_abcover(args) -> int:
    P = read_presentation(args.file, args.entry, limit=args.limit)
    inv = abelian_cover_h1(P, args.limit)
    emit(args, inv.to_record() | {"text": inv.format()}, inv.format())
    return EXIT_OK


def cmd_homcount(args) -> int:
    P = read_presentation(args.file, args.entry, limit=args.limit)
    entry = resolve_targets([args.target], _catalog(args.catalog))[args.target]
    fn = count_homomorphisms_reduced if args.reduced else count_homomorphisms
    prof = fn(P, entry.group, budget=args.budget or DEFAULT_WORK_BUDGET, jobs=args.jobs, aut_order=entry.aut_order)
    rec = prof.to_record() | {"target": args.target}
    emit(args, rec, f"{args.target}: hom {prof.hom_count}  epi {prof.epi_count}  quotients {prof.quotient_count}")
    return EXIT_OK


def _load_reg(args) -> Register:
    return load_register(args.register, limit=args.limit, check_labels=not args.no_label_check)


def cmd_census(args) -> int:
    reg = _load_reg(args)
    cat = _catalog(args.targets)
    store = ResultStore(args.cache_dir) if args.cache_dir else None
    groups = {n: e.group for n, e in resolve_targets(list(cat), cat).items()}
    fps = build_fingerprints(reg, groups, False, store=store, budget=args.budget or DEFAULT_WORK_BUDGET,
                             jobs=args.jobs, limit=args.limit)
    rows = []
    for fp in fps:
        for t in cat:
            p = fp.profiles.get(t)
            rows.append({"group": fp.group_id, "target": t,
                         "hom_count": "" if p is None else p.hom_count,
                         "epi_count": "" if p is None else p.epi_count,
                         "quotient_count": "" if p is None else p.quotient_count,
                         "incomplete": fp.incomplete.get(t, "")})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["group"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK if not any(fp.incomplete for fp in fps) else EXIT_BUDGET


def cmd_classify(args) -> int:
    reg = _load_reg(args)
    tiers = args.tier or ["h1", "nilpotent", "full"]
    if args.battery != "default":
        cat = load_catalog(args.battery)
        targets = list(cat)
    else:
        cat = None
        targets = list(BATTERY)
    needed = sorted({c for t in tiers for c in TIERS[t] if c not in ("h1", "abcover")} & set(targets),
                    key=targets.index)
    with_ab = any("abcover" in TIERS[t] for t in tiers)
    store = ResultStore(args.cache_dir) if args.cache_dir else None
    entries = resolve_targets(needed, cat)
    fps = build_fingerprints(reg, {n: e.group for n, e in entries.items()} if cat else needed, with_ab,
                             store=store, budget=args.budget or DEFAULT_WORK_BUDGET, jobs=args.jobs,
                             limit=args.limit)
    incomplete = {fp.group_id: fp.incomplete for fp in fps if fp.incomplete}
    if incomplete:
        for gid, why in incomplete.items():
            parts = "; ".join(f"{c}: {msg}" for c, msg in why.items())
            print(f"group {gid} incomplete: {parts}", file=sys.stderr)
        return EXIT_BUDGET
    parts = {t: refine_partition(fps, t) for t in tiers}
    certs = emit_certificates(fps, {n: e.group.order for n, e in entries.items()})
    labels = {e.j: e.identifier for e in reg}
    files = render_reports(parts, certs, args.format, args.out, fingerprints=fps, labels=labels)
    if not args.out:
        main_file = next(iter(files))
        sys.stdout.write(files[main_file])
    return EXIT_OK


def cmd_verify_cert(args) -> int:
    reg = _load_reg(args)
    certs = load_certificates(args.cert)
    pres = {e.j: e.presentation for e in reg}
    bad = 0
    rows = []
    for c in certs:
        ok, detail = replay_certificate(c, pres, budget=args.budget or DEFAULT_WORK_BUDGET, limit=args.limit)
        bad += not ok
        rows.append({"pair": list(c.pair), "kind": c.kind, "ok": ok, "detail": detail})
    emit(args, rows, "\n".join(f"{r['pair'][0]} vs {r['pair'][1]} [{r['kind']}]: "
                               f"{'ok' if r['ok'] else 'FAILED'} ({r['detail']})" for r in rows))
    return EXIT_OK if not bad else EXIT_COMPUTE


def cmd_facts(args) -> int:
    reg = _load_reg(args)
    reports = [verify_c2_facts(reg, limit=args.limit), verify_common_cover_4750(reg, limit=args.limit)]
    rec = [{"title": r.title, "facts": [{"name": f.name, "status": f.status, "detail": f.detail}
                                        for f in r.facts]} for r in reports]
    emit(args, rec, "\n".join(r.format() for r in reports))
    failed = any(f.status == "fail" for r in reports for f in r.facts)
    return EXIT_COMPUTE if failed else EXIT_OK


def cmd_convert(args) -> int:
    text = Path(args.source).read_text(encoding="utf-8")
    numbering = [int(x) for x in args.numbering.split(",")] if args.numbering else None
    out = convert_magma_register(text, numbering)
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--budget", type=int, default=d(None),
                   help=f"work budget (homomorphism letters, default {DEFAULT_WORK_BUDGET}; "
                        f"low-index nodes, default {DEFAULT_NODE_BUDGET})")
    p.add_argument("--limit", type=int, default=d(DEFAULT_LIMIT), help="coset limit")
    p.add_argument("--cache-dir", default=d(None), help="directory for cached results")
    p.add_argument("--jobs", type=int, default=d(1), help="worker processes")
    p.add_argument("--format", choices=("text", "csv", "records"), default=d("text"))
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fppgroups", description="Finite-quotient invariants of finitely presented groups")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(ap, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    def pres_args(p):
        p.add_argument("file", help="presentation file (native, JSON records or register)")
        p.add_argument("--entry", help="register entry name or number")

    p = add("targets", cmd_targets, "list catalog target groups")
    p.add_argument("action", nargs="?", default="list", choices=["list"])
    p.add_argument("--catalog", help="catalog file (name: spec per line)")

    p = add("cosets", cmd_cosets, "coset enumeration")
    pres_args(p)
    p.add_argument("--subgroup", default="", help="subgroup words separated by ';'")
    p.add_argument("--perm", action="store_true", help="print generator permutations")
    p.add_argument("--strategy", choices=["hlt", "felsch"], default="hlt")

    p = add("lowindex", cmd_lowindex, "subgroup classes of small index")
    pres_args(p)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--normal-only", action="store_true")

    p = add("rewrite", cmd_rewrite, "presentation of a finite-index subgroup")
    pres_args(p)
    p.add_argument("--subgroup", default="")
    p.add_argument("--raw", action="store_true", help="skip Tietze simplification")

    p = add("abelianize", cmd_abelianize, "abelian invariants")
    pres_args(p)
    p.add_argument("--subgroup", default="", help="H1 of this finite-index subgroup instead")

    p = add("abcover", cmd_abcover, "H1 of the universal abelian cover")
    pres_args(p)

    p = add("homcount", cmd_homcount, "count homomorphisms onto a target")
    pres_args(p)
    p.add_argument("--target", required=True)
    p.add_argument("--reduced", action="store_true", help="fix the first image up to conjugacy")
    p.add_argument("--catalog")

    def reg_args(p):
        p.add_argument("register")
        p.add_argument("--no-label-check", action="store_true", help="skip identifier validation")

    p = add("census", cmd_census, "quotient counts for every register group and target")
    reg_args(p)
    p.add_argument("--targets", help="catalog file (default: bundled battery)")
    p.add_argument("--out", help="CSV output file")

    p = add("classify", cmd_classify, "partition a register by invariant tiers")
    reg_args(p)
    p.add_argument("--battery", default="default", help="'default' or a catalog file")
    p.add_argument("--tier", action="append", choices=sorted(TIERS))
    p.add_argument("--out", help="report directory")

    p = add("verify-cert", cmd_verify_cert, "replay certificates from scratch")
    p.add_argument("cert")
    reg_args(p)

    p = add("facts", cmd_facts, "check subgroup-lattice facts that need ambient groups")
    reg_args(p)

    p = add("convert-register", cmd_convert, "convert a Magma-style register to native format")
    p.add_argument("source")
    p.add_argument("--numbering", help="comma-separated j for the imported groups, in order")
    p.add_argument("--out")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CosetLimitExceeded, SearchBudgetExceeded, HomBudgetExceeded, OrderCeilingExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, RegisterError, CatalogError, InputError, FileNotFoundError, IsADirectoryError,
            json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InfiniteAbelianization, CensusError, RuntimeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
