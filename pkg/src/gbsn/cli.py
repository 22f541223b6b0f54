"""Command-line interface.

Commands: validate, presentation, holonomy, classify, compare, distortion,
compression; every command takes ``--format text|json``. Exit codes: 0 for
decided verdicts, 2 for undetermined ones, 1 for input errors. The JSON
reports are deterministic (sorted keys, exact rationals as strings) and
carry the certificate data needed to re-verify every decided verdict.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction

from . import britton, gog, gogfile, holonomy
from .classify import classify, compression_report, qi_compare
from .linalg import ProjPoint, QMat, QuadraticNumber, ZMat
from .matgroups import INF, ProjInterval
from .words import Word, parse_word


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if obj is INF:
        return "inf"
    if isinstance(obj, QuadraticNumber):
        return {"a": str(obj.a), "b": str(obj.b), "d": obj.d}
    if isinstance(obj, QMat):
        return [[str(x) for x in row] for row in obj.rows]
    if isinstance(obj, ZMat):
        return [list(row) for row in obj.rows]
    if isinstance(obj, Word):
        return str(obj)
    if isinstance(obj, ProjPoint):
        return {"x": _jsonable(obj.x), "y": _jsonable(obj.y)}
    if isinstance(obj, ProjInterval):
        return {"lo": _jsonable(obj.lo), "hi": _jsonable(obj.hi)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {"type": type(obj).__name__}
        for f in dataclasses.fields(obj):
            out[f.name] = _jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(x) for x in obj]
    return str(obj)


def _emit(payload: dict, lines: list[str], fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(_jsonable(payload), sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)


def _load_spec(path: str) -> gog.GoGSpec:
    with open(path, "r", encoding="utf-8") as fh:
        doc = gogfile.parse(fh.read())
    return doc.to_spec()


def _tri(value) -> str:
    return {True: "yes", False: "no", None: "undetermined"}[value]


def _cmd_validate(args) -> int:
    with open(args.file, "r", encoding="utf-8") as fh:
        doc = gogfile.parse(fh.read())
    problems = gog.validate(doc.to_spec())
    payload = {"command": "validate", "file": args.file, "ok": not problems, "violations": problems}
    lines = ["OK"] if not problems else [f"violation: {p}" for p in problems]
    _emit(payload, lines, args.format)
    return 0 if not problems else 1


def _cmd_presentation(args) -> int:
    spec = _load_spec(args.file)
    pres = gog.presentation(spec)
    payload = {
        "command": "presentation",
        "generators": list(pres.generators),
        "relators": [str(r) for r in pres.relators],
        "relations": [[str(a), str(b)] for a, b in pres.relations],
    }
    lines = [str(pres)]
    _emit(payload, lines, args.format)
    return 0


def _cmd_holonomy(args) -> int:
    spec = _load_spec(args.file)
    hd = holonomy.compute_holonomy(spec)
    payload = {
        "command": "holonomy",
        "base_vertex": hd.base_vertex,
        "vertex_letters": sorted(hd.vertex_letter_names),
        "stable": {name: _jsonable(m) for name, m in sorted(hd.stable.items())},
    }
    lines = [f"base vertex: {hd.base_vertex}"]
    lines.append("vertex letters map to the identity")
    for name, m in sorted(hd.stable.items()):
        rows = "; ".join(", ".join(str(x) for x in row) for row in m.rows)
        lines.append(f"hol({name}) = [{rows}]")
    _emit(payload, lines, args.format)
    return 0


def _cmd_classify(args) -> int:
    spec = _load_spec(args.file)
    report = classify(spec)
    payload = {
        "command": "classify",
        "file": args.file,
        "ends": report.ends,
        "amenable": _tri(report.amenable),
        "amenable_reason": report.amenable_reason,
        "whyte_case": report.whyte_case,
        "haagerup": _tri(report.haagerup),
        "weakly_amenable": _tri(report.weakly_amenable),
        "cowling_haagerup": report.cowling_haagerup,
        "evidence": report.evidence,
    }
    lines = [f"ends: {report.ends}"]
    lines.append(f"amenable: {_tri(report.amenable)} ({report.amenable_reason})")
    for ev in report.evidence:
        lines.append(f"evidence [{ev.label}]: {ev.detail}")
    lcb = "Λ_cb = 1" if report.cowling_haagerup == "1" else (
        "Λ_cb = ∞ (not weakly amenable)"
        if report.cowling_haagerup == "not-weakly-amenable"
        else "Λ_cb undetermined"
    )
    lines.append(
        f"Whyte case: {report.whyte_case}; Haagerup: {_tri(report.haagerup)}; "
        f"weakly amenable: {_tri(report.weakly_amenable)}; {lcb}"
    )
    _emit(payload, lines, args.format)
    return 0 if report.decided() else 2


def _cmd_compare(args) -> int:
    spec_a = _load_spec(args.file1)
    spec_b = _load_spec(args.file2)
    verdict = qi_compare(spec_a, spec_b)
    payload = {
        "command": "compare",
        "files": [args.file1, args.file2],
        "verdict": verdict.verdict,
        "sampled": verdict.sampled,
        "reasons": list(verdict.reasons),
        "evidence": verdict.evidence,
    }
    lines = list(verdict.reasons) + [verdict.verdict]
    _emit(payload, lines, args.format)
    return 0 if verdict.verdict != "undetermined" else 2


def _cmd_distortion(args) -> int:
    spec = _load_spec(args.file)
    element = parse_word(args.element)
    profile = britton.distortion_profile(
        spec, element, range(1, args.max_power + 1), bfs_cap=args.bfs_cap
    )
    payload = {
        "command": "distortion",
        "element": str(element),
        "note": profile.note,
        "max_ratio": profile.max_ratio,
        "analytic_constant": profile.analytic_constant,
        "entries": profile.entries,
    }
    lines = [f"element: {element}; {profile.note}"]
    lines.append("power  upper  exact  ratio/log")
    for e in profile.entries:
        exact = "-" if e.exact_length is None else str(e.exact_length)
        ratio = "-" if e.ratio_to_log is None else f"{e.ratio_to_log:.3f}"
        lines.append(f"{e.power:5d}  {e.upper_bound:5d}  {exact:>5}  {ratio:>9}")
    if profile.max_ratio is not None:
        lines.append(f"max ratio over the window: {profile.max_ratio:.3f} (limsup estimate)")
    lines.append(
        "analytic lower bound: |m v| >= log(m)/log(%.3g), labeled analytic"
        % profile.analytic_constant
    )
    _emit(payload, lines, args.format)
    return 0


def _cmd_compression(args) -> int:
    spec = _load_spec(args.file)
    report = compression_report(spec, Fraction(args.p))
    payload = {
        "command": "compression",
        "p": report.p,
        "alpha_kind": report.alpha_kind,
        "alpha": report.alpha,
        "checklist": [list(item) for item in report.checklist],
        "detail": report.detail,
    }
    lines = []
    for key, value in report.checklist:
        lines.append(f"condition [{key}]: {value}")
    if report.alpha_kind == "undetermined":
        lines.append(f"α_{report.p} undetermined" + (f" ({report.detail})" if report.detail else ""))
    else:
        lines.append(f"α_{report.p} = {report.alpha}")
    _emit(payload, lines, args.format)
    return 0 if report.alpha_kind != "undetermined" else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbsn",
        description="Analyze generalized Baumslag-Solitar groups given as graphs of Z^n-groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=("text", "json"), default="text")
        return p

    p = add("validate", _cmd_validate, "check a .gog file")
    p.add_argument("file")
    p = add("presentation", _cmd_presentation, "print the group presentation")
    p.add_argument("file")
    p = add("holonomy", _cmd_holonomy, "print the holonomy matrices")
    p.add_argument("file")
    p = add("classify", _cmd_classify, "quasi-isometry class and analytic properties")
    p.add_argument("file")
    p = add("compare", _cmd_compare, "compare two groups up to quasi-isometry")
    p.add_argument("file1")
    p.add_argument("file2")
    p = add("distortion", _cmd_distortion, "distortion profile of a vertex element")
    p.add_argument("file")
    p.add_argument("--element", required=True, help="vertex letter, e.g. a")
    p.add_argument("--max-power", type=int, default=64)
    p.add_argument("--bfs-cap", type=int, default=15, help="exact BFS length budget")
    p = add("compression", _cmd_compression, "equivariant Lp-compression exponent")
    p.add_argument("file")
    p.add_argument("--p", required=True, help="exponent p >= 1 (rational, e.g. 3/2)")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (gogfile.GoGParseError, gog.InvalidSpecError, britton.UnsupportedSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
