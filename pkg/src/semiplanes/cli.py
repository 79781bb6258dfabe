"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 missing input, 4 data error,
5 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import search as S
from .binmat import EncodingError, decode_matrix, format_tuple_line, parse_tuple_line, write_tuple_file
from .classify import (
    ClassRecord,
    ConsistencyError,
    classify_plane,
    format_profile,
    hexagons_of,
    summarize_hexagons,
)
from .semifield import SemifieldTable

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_DATA = 4
EXIT_INTERNAL = 5

log = logging.getLogger("semiplanes")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[Path]
    output: Path | None
    d: int
    a2_policy: str
    workers: int
    checkpoint_dir: Path | None
    verbosity: int

    def __post_init__(self):
        if self.workers < 1:
            raise CliError(EXIT_USAGE, "--workers must be at least 1")
        for p in self.inputs:
            if not p.exists():
                raise CliError(EXIT_MISSING, f"input not found: {p}")


def _emit(text: str = "") -> None:
    sys.stdout.write(text + "\n")


def _grid(m) -> str:
    return "\n".join(" ".join(str(v) for v in row) for row in m.to_lists())


# -- decode ----------------------------------------------------------------


def cmd_decode(args) -> int:
    line = " ".join(args.values)
    try:
        codes = parse_tuple_line(line, args.dim)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    if codes is None:
        raise CliError(EXIT_USAGE, "empty tuple line")
    mats = [decode_matrix(c, args.dim, i) for i, c in enumerate(codes, 2)]
    from .binmat import BitMatrix
    mats.insert(0, BitMatrix.identity(args.dim))
    for i, m in enumerate(mats, 1):
        _emit(f"A{i}")
        _emit(_grid(m))
        _emit()
    return EXIT_OK


# -- verify ----------------------------------------------------------------


@dataclass
class Check:
    group: str
    plane: str
    status: str  # PASS, FAIL or INFO
    detail: str = ""

    def line(self) -> str:
        return f"{self.status:4} {self.group:8} {self.plane:6} {self.detail}".rstrip()


# orbit entries known to be misprinted in the reference tables
ORBIT_INFO = {"I"}


def _check_row(group, rec, t) -> list[Check]:
    out = []
    got = classify_plane(t, rec.plane, with_hexagon=False)
    fails = []
    if got.at_order != rec.at_order:
        fails.append(f"|At| {got.at_order} != {rec.at_order}")
    if tuple(got.sa) != rec.sa_sorted():
        fails.append(f"S/A {list(got.sa)} != {list(rec.sa_sorted())}")
    if tuple(got.zn) != rec.zn:
        fails.append(f"ZN {tuple(got.zn)} != {rec.zn}")
    if rec.aut is not None and got.aut != rec.aut:
        fails.append(f"Aut {got.aut} != {rec.aut}")
    orbits_ok = tuple(got.orbits) == rec.orbits_sorted()
    if not orbits_ok and rec.plane not in ORBIT_INFO:
        fails.append("orbits " + " ; ".join(format_profile(p) for p in got.orbits))
    out.append(Check(group, rec.plane, "FAIL" if fails else "PASS", "; ".join(fails)))
    if not orbits_ok and rec.plane in ORBIT_INFO:
        sound = all(sum(n * ln for n, ln in p) == 65 and rec.at_order % ln == 0 for p in got.orbits for n, ln in p)
        out.append(Check(group, rec.plane, "INFO" if sound else "FAIL",
                         "printed orbits inconsistent; computed " + " ; ".join(format_profile(p) for p in got.orbits)))
    return out


def verify_tables(which: str) -> list[Check]:
    from .fixtures import plane_records
    recs = plane_records()
    want = {"table1": lambda r: r.known, "table5": lambda r: not r.known}[which]
    checks = []
    for rec in recs.values():
        if want(rec):
            checks += _check_row(which, rec, SemifieldTable.from_codes(list(rec.tuple)))
    return checks


def verify_appendix(labels=None) -> list[Check]:
    from .presentations import appendix_rules, verify_appendix_entry
    rules = appendix_rules()
    out = []
    for label in (labels or list(rules)):
        r = verify_appendix_entry(label, rules)
        out.append(Check("appendix", label, "PASS" if r.ok else "FAIL", r.message))
    return out


def cmd_verify(args) -> int:
    from .fixtures import data_path
    needed = {"table1": ["planes.json", "known.tuples"], "table5": ["planes.json", "new.tuples"],
              "appendix": ["rules.txt", "planes.json"]}
    groups = ["table1", "table5", "appendix"] if args.fixtures == "all" else [args.fixtures]
    for g in groups:
        for name in needed[g]:
            if not data_path(name).is_file():
                raise CliError(EXIT_MISSING, f"fixture missing: {name}")
    checks: list[Check] = []
    for g in groups:
        checks += verify_appendix() if g == "appendix" else verify_tables(g)
    for c in checks:
        _emit(c.line())
    n_fail = sum(c.status == "FAIL" for c in checks)
    n_pass = sum(c.status == "PASS" for c in checks)
    n_info = sum(c.status == "INFO" for c in checks)
    _emit(f"{n_pass} passed, {n_fail} failed, {n_info} info")
    if args.json:
        Path(args.json).write_text(json.dumps([c.__dict__ for c in checks], indent=1) + "\n")
    return EXIT_OK if n_fail == 0 else EXIT_DATA


# -- search ----------------------------------------------------------------


def cmd_search(args) -> int:
    out = Path(args.output or f"search-d{args.dim}.tuples")
    manifest = Path(args.manifest or str(out) + ".manifest.json")
    if args.oracle:
        if args.dim > S.ORACLE_MAX_DIM:
            raise CliError(EXIT_USAGE, f"--oracle supports d <= {S.ORACLE_MAX_DIM}")
        res = S.oracle_search(args.dim)
        write_tuple_file(out, [tuple(r) for r in res.tuples.tolist()], header=f"all standard bases, d={args.dim}")
        data = {"d": args.dim, "tuples": len(res.tuples),
                "classes": [{"label": lab.hex(), "size": n} for lab, n in res.classes]}
        manifest.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
        _emit(f"{len(res.tuples)} tuples in {len(res.classes)} isotopy classes")
        return EXIT_OK
    if args.resume and not args.checkpoint:
        raise CliError(EXIT_USAGE, "--resume needs --checkpoint")
    cfg = S.SearchConfig(args.dim, args.a2_policy, S.default_workers() if args.workers is None else args.workers,
                         Path(args.checkpoint) if args.checkpoint else None, args.resume)
    res = S.full_search(cfg)
    write_tuple_file(out, res.tuples, header=f"standard bases, d={args.dim}")
    summary = None
    if args.classify:
        summary = summarize_hexagons(hexagons_of(S.tuple_tables(res.tuples, args.dim)))
    S.write_manifest(manifest, res, summary)
    _emit(f"{len(res.prefixes)} partial bases, {len(res.tuples)} tuples")
    if summary is not None:
        _emit("summary {} {} {}".format(*summary.as_tuple()))
    return EXIT_OK


# -- classify --------------------------------------------------------------


def read_tuples_strict(path: Path, d: int) -> list[tuple[int, ...]]:
    out = []
    for n, line in enumerate(path.read_text().splitlines(), 1):
        try:
            t = parse_tuple_line(line, d)
        except ValueError as exc:
            raise CliError(EXIT_DATA, f"{path}: line {n}: {exc}") from None
        if t is None:
            continue
        try:
            SemifieldTable.from_codes(list(t), d)
        except (EncodingError, ValueError) as exc:
            raise CliError(EXIT_DATA, f"{path}: line {n}: {exc}") from None
        out.append(t)
    return out


def cmd_classify(args) -> int:
    path = Path(args.tuples)
    if not path.is_file():
        raise CliError(EXIT_MISSING, f"input not found: {path}")
    tuples = read_tuples_strict(path, args.dim)
    seen: set[bytes] = set()
    cache: dict[bytes, object] = {}
    hexagons = []
    records = []
    for t in tuples:
        tab = SemifieldTable.from_codes(list(t), args.dim)
        h = next(hexagons_of([tab], cache))
        hexagons.append(h)
        if h.class_label in seen:
            continue
        seen.add(h.class_label)
        rec = classify_plane(tab, format_tuple_line(t), with_hexagon=True)
        records.append(rec)
    summary = summarize_hexagons(hexagons)
    lines = [rec.to_json() for rec in records]
    if args.output:
        Path(args.output).write_text("".join(x + "\n" for x in lines))
    else:
        for x in lines:
            _emit(x)
    _emit("summary {} {} {}".format(*summary.as_tuple()))
    if args.summary:
        Path(args.summary).write_text(json.dumps({
            "s3_classes": summary.s3_classes, "planes": summary.planes, "iso_classes": summary.iso_classes,
            "iso_classes_all_planes": summary.iso_classes_all_planes}, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


# -- report ----------------------------------------------------------------


def cmd_report(args) -> int:
    path = Path(args.records)
    if not path.is_file():
        raise CliError(EXIT_MISSING, f"input not found: {path}")
    for n, line in enumerate(path.read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = ClassRecord.from_dict(json.loads(line))
        except (ValueError, KeyError, TypeError) as exc:
            raise CliError(EXIT_DATA, f"{path}: line {n}: {exc}") from None
        _emit(f"tuple  {rec.plane}")
        _emit(f"  |At| {rec.at_order}   ZN {tuple(rec.zn)}   {rec.primitivity}")
        _emit("  S/A  " + " + ".join(f"{c}/{a}" for c, a in rec.sa))
        for name, prof in zip(("L_x", "L_inf", "L_y"), rec.orbits):
            _emit(f"  {name:5} {format_profile(prof)}")
        if rec.hexagon:
            _emit("  planes " + " | ".join(" ".join(g) for g in rec.hexagon))
    return EXIT_OK


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semiplanes", description="Order-64 semifield search and classification.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decode", help="print the matrices of one tuple line")
    d.add_argument("values", nargs="+", help="the encoded integers of A2..Ad")
    d.add_argument("--dim", type=int, default=6)
    d.set_defaults(func=cmd_decode)

    v = sub.add_parser("verify", help="check packaged reference data")
    v.add_argument("--fixtures", choices=["table1", "table5", "appendix", "all"], default="all")
    v.add_argument("--json", help="also write the checks as JSON")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="enumerate standard bases")
    s.add_argument("-d", "--dim", type=int, choices=S.SEARCH_DIMS, required=True)
    s.add_argument("--oracle", action="store_true", help="exhaustive enumeration (d <= 4)")
    s.add_argument("--resume", action="store_true")
    s.add_argument("--checkpoint", help="checkpoint directory")
    s.add_argument("--a2-policy", choices=["fixed", "primitive"], default="fixed")
    s.add_argument("--workers", type=int, default=None, help=f"default from ${S.WORKERS_ENV} or 1")
    s.add_argument("--classify", action="store_true", help="add the classification summary to the manifest")
    s.add_argument("-o", "--output")
    s.add_argument("--manifest")
    s.set_defaults(func=cmd_search)

    c = sub.add_parser("classify", help="classify the tuples of a file")
    c.add_argument("tuples")
    c.add_argument("--dim", type=int, default=6)
    c.add_argument("-o", "--output", help="write ClassRecord JSON lines here instead of stdout")
    c.add_argument("--summary", help="write the summary triple as JSON")
    c.set_defaults(func=cmd_classify)

    r = sub.add_parser("report", help="render ClassRecord JSON lines as text")
    r.add_argument("records")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        RunConfig(
            subcommand=args.command,
            inputs=[Path(getattr(args, k)) for k in ("tuples", "records") if getattr(args, k, None)],
            output=Path(args.output) if getattr(args, "output", None) else None,
            d=getattr(args, "dim", 6),
            a2_policy=getattr(args, "a2_policy", "fixed"),
            workers=1 if getattr(args, "workers", None) is None else args.workers,
            checkpoint_dir=Path(args.checkpoint) if getattr(args, "checkpoint", None) else None,
            verbosity=args.verbose,
        )
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except ConsistencyError as exc:
        sys.stderr.write(f"consistency failure: {exc}\n")
        return EXIT_INTERNAL
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_MISSING


if __name__ == "__main__":
    raise SystemExit(main())
