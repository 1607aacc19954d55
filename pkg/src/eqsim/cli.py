"""Command-line interface: ``eqsim merge|check-unsat|validate|score|report|init-workspace``.

Exit codes: 0 success (or clean validation), 1 I/O or usage error, 2 validation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import statistics
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .annotations import clean_set, is_clean, load_annotation_dir, scaffold_workspace, validate
from .annotations.workspace import WorkspaceExistsError
from .metrics import METRICS, aggregate, score_sets
from .obo import OboParseError, load_obo, merge, serialize_obo, write_merge_log
from .reasoner import Reasoner, check_unsat

logger = logging.getLogger("eqsim")

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2

SUMMARY_FIELDS = ("curator", "metric", "mean", "sd", "ci_low", "ci_high", "n")
STATE_FIELDS = ("character_number", "state_symbol", "simj", "nic", "pp", "pr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_range(text: str) -> tuple:
    try:
        lo, hi = (int(x) for x in text.split("-", 1))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A-B, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def load_ontology(paths, strip_disjoints: bool = False, log: Optional[list] = None):
    return merge([load_obo(p) for p in paths], strip_disjoints=strip_disjoints, log=log)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# -- subcommands -----------------------------------------------------------


def cmd_merge(args) -> int:
    log: list = []
    ont = load_ontology(args.files, args.strip_disjoints, log)
    _write(args.out, serialize_obo(ont))
    log_path = args.log or (f"{args.out}.log.jsonl" if args.out and args.out != "-" else None)
    if log_path:
        with open(log_path, "w", encoding="utf-8") as fh:
            write_merge_log(log, fh)
    else:
        write_merge_log(log, sys.stderr)
    return EXIT_OK


def cmd_check_unsat(args) -> int:
    ont = load_ontology(args.files)
    unsat = sorted(check_unsat(ont))
    _write(args.out, "".join(f"{tid}\n" for tid in unsat))
    logger.info("%d unsatisfiable classes", len(unsat))
    return EXIT_OK


def _validate_dir(path, ont, column_map=None):
    aset, _ = load_annotation_dir(path, ont, column_map)
    return aset, validate(aset, ont)


def _load_columns(path: Optional[str]):
    if not path:
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_validate(args) -> int:
    ont = load_ontology(args.ontology)
    root = Path(args.input)
    if not root.exists():
        raise FileNotFoundError(f"no such input: {root}")
    aset, findings = _validate_dir(root, ont, _load_columns(args.columns))
    if not aset.files:
        logger.warning("no files under %s", root)
    _write(args.out, json.dumps([f.to_dict() for f in findings], indent=2) + "\n")
    return EXIT_OK if is_clean(findings) else EXIT_INVALID


def _fmt(x) -> str:
    return "" if x is None else repr(x)


def _summary_rows(name: str, summary: dict) -> list:
    return [
        {"curator": name, "metric": m, "mean": s.mean, "sd": s.sd,
         "ci_low": s.ci95_low, "ci_high": s.ci95_high, "n": s.n}
        for m, s in ((m, summary[m]) for m in METRICS)
    ]


def _csv(fields, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (_fmt(v) if isinstance(v, float) or v is None else v) for k, v in row.items()})
    return buf.getvalue()


def cmd_score(args) -> int:
    ont = load_ontology(args.ontology, args.strip_disjoints)
    columns = _load_columns(args.columns)
    for p in (args.gold, args.test):
        if not Path(p).exists():
            raise FileNotFoundError(f"no such input: {p}")
    gold, gold_findings = _validate_dir(args.gold, ont, columns)
    test, test_findings = _validate_dir(args.test, ont, columns)
    bad = [f for f in gold_findings + test_findings if f.severity == "error"]
    if bad:
        for f in bad:
            print(f"{f.file}:{f.line}: {f.code} {f.message}", file=sys.stderr)
        return EXIT_INVALID
    gold = clean_set(gold, gold_findings, ont)
    test = clean_set(test, test_findings, ont)
    name = args.name or Path(args.test).stem

    reasoner = Reasoner(ont, cache=args.cache)
    reasoner.register(gold.expressions() | test.expressions())
    scores = score_sets(test, gold, reasoner.store, reasoner.registry, keep_helpers=args.keep_helpers)
    summary = aggregate(scores, args.restrict, ci=args.ci, seed=args.seed)
    kept = [s for s in scores if args.restrict is None or args.restrict[0] <= s.key[0] <= args.restrict[1]]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    state_rows = [
        {"character_number": s.key[0], "state_symbol": s.key[1],
         "simj": s.simj, "nic": s.nic, "pp": s.pp, "pr": s.pr}
        for s in kept
    ]
    summary_rows = _summary_rows(name, summary)
    if args.format == "json":
        (out / "states.json").write_text(json.dumps({"curator": name, "states": state_rows}, indent=2) + "\n",
                                         encoding="utf-8")
        (out / "summary.json").write_text(
            json.dumps({"curator": name, "restrict": list(args.restrict) if args.restrict else None,
                        "metrics": summary_rows}, indent=2) + "\n",
            encoding="utf-8")
    else:
        (out / "states.csv").write_text(_csv(STATE_FIELDS, state_rows), encoding="utf-8")
        (out / "summary.csv").write_text(_csv(SUMMARY_FIELDS, summary_rows), encoding="utf-8")
    return EXIT_OK


def read_summary(path: Path) -> list:
    """Summary rows from a ``score`` output file (JSON or CSV)."""
    if path.suffix == ".json":
        data = json.loads(path.read_text(encoding="utf-8"))
        return [{k: row.get(k) for k in SUMMARY_FIELDS} for row in data["metrics"]]
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            row = {k: row.get(k) for k in SUMMARY_FIELDS}
            for k in ("mean", "sd", "ci_low", "ci_high"):
                row[k] = float(row[k]) if row[k] else None
            row["n"] = int(row["n"])
            rows.append(row)
    return rows


def band_rows(rows: list, curators: Optional[list] = None) -> list:
    """Cross-curator mean ± 1 SD of the per-curator means, one row per metric."""
    out = []
    label = "band" if not curators else "band:" + "+".join(curators)
    for m in METRICS:
        means = [r["mean"] for r in rows
                 if r["metric"] == m and r["mean"] is not None and (not curators or r["curator"] in curators)]
        if not means:
            out.append({"curator": label, "metric": m, "mean": None, "sd": None,
                        "ci_low": None, "ci_high": None, "n": 0})
            continue
        mean = math.fsum(means) / len(means)
        sd = statistics.stdev(means) if len(means) > 1 else 0.0
        out.append({"curator": label, "metric": m, "mean": mean, "sd": sd,
                    "ci_low": mean - sd, "ci_high": mean + sd, "n": len(means)})
    return out


def cmd_report(args) -> int:
    if not args.files:
        raise UsageError("report needs at least one score file")
    rows = []
    for p in args.files:
        rows.extend(read_summary(Path(p)))
    curators = args.band.split(",") if args.band else None
    _write(args.out, _csv(SUMMARY_FIELDS, rows + band_rows(rows, curators)))
    return EXIT_OK


def cmd_init_workspace(args) -> int:
    manifest = scaffold_workspace(args.characters, args.guide, args.ontologies, args.out)
    logger.info("workspace with %d characters at %s", manifest["characters"], args.out)
    return EXIT_OK


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eqsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("merge", help="merge OBO files into one")
    p.add_argument("files", nargs="+")
    p.add_argument("--strip-disjoints", action="store_true")
    p.add_argument("--out", help="merged OBO output (default stdout)")
    p.add_argument("--log", help="merge log, JSON lines (default OUT.log.jsonl)")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("check-unsat", help="list classes made unsatisfiable by disjointness")
    p.add_argument("files", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_unsat)

    p = sub.add_parser("validate", help="validate annotation TSVs")
    p.add_argument("--ontology", action="append", required=True)
    p.add_argument("--input", required=True, help="TSV file or directory")
    p.add_argument("--columns", help="JSON column map for non-standard layouts")
    p.add_argument("--out", help="findings JSON (default stdout)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="score a test annotation set against gold")
    p.add_argument("--ontology", action="append", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--name", help="curator name (default: test path stem)")
    p.add_argument("--restrict", type=parse_range, help="inclusive character range A-B")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--ci", choices=("normal", "bootstrap"), default="normal")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    p.add_argument("--strip-disjoints", action="store_true")
    p.add_argument("--cache", help="closure cache file")
    p.add_argument("--keep-helpers", action="store_true",
                   help="count classes materialized for subexpressions as ancestors")
    p.add_argument("--columns", help="JSON column map for non-standard layouts")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("report", help="combine score summaries")
    p.add_argument("files", nargs="*")
    p.add_argument("--band", help="comma-separated curators for the mean ± SD band (default all)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("init-workspace", help="scaffold an annotation workspace")
    p.add_argument("--characters", nargs="*", default=[])
    p.add_argument("--guide")
    p.add_argument("--ontologies", nargs="*", default=[])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_init_workspace)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"eqsim: error: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"eqsim: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, OboParseError, WorkspaceExistsError) as exc:
        print(f"eqsim: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
