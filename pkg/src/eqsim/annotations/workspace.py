"""Scaffolding for a self-contained annotation workspace.

Layout of the working tree::

    <out>/
      input/characters/   one TSV per character to annotate
      ontologies/         the OBO files
      guide/              the annotation guide
      output/             where annotated TSVs go (empty)
      validate_annotations.py
      MANIFEST.json
"""

from __future__ import annotations

import hashlib
import json
import shutil
from pathlib import Path
from typing import Iterable, Optional, Union

from .tsv import CHARACTER_COLUMNS

PathLike = Union[str, Path]

VALIDATOR_SCRIPT = '''#!/usr/bin/env python3
"""Validate every annotation TSV under output/ against the workspace ontologies.

Exit status: 0 clean, 2 errors found, 1 I/O problem.
"""
import sys
from pathlib import Path

from eqsim.cli import main

here = Path(__file__).resolve().parent
ontologies = sorted(str(p) for p in (here / "ontologies").glob("*.obo"))
args = ["validate", "--input", str(here / "output")]
for path in ontologies:
    args += ["--ontology", path]
sys.exit(main(args + sys.argv[1:]))
'''


class WorkspaceExistsError(FileExistsError):
    pass


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def read_character_rows(paths: Iterable[PathLike]) -> list:
    """Rows of one or more character TSVs as ``(source_stem, fields)`` pairs."""
    rows = []
    for path in paths:
        path = Path(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines:
            continue
        for line in lines[1:]:
            if line.strip():
                fields = line.split("\t")
                fields += [""] * (len(CHARACTER_COLUMNS) - len(fields))
                rows.append((path.stem, fields[: len(CHARACTER_COLUMNS)]))
    return rows


def scaffold_workspace(
    characters: Iterable[PathLike],
    guide: Optional[PathLike],
    ontologies: Iterable[PathLike],
    out: PathLike,
) -> dict:
    """Create the workspace tree under ``out`` and return its manifest.

    Character rows are regrouped so that each character gets its own file
    under ``input/characters/``. Refuses to touch a non-empty ``out``.
    """
    out = Path(out)
    if out.exists() and any(out.iterdir()):
        raise WorkspaceExistsError(f"refusing to scaffold into non-empty directory {out}")
    char_dir = out / "input" / "characters"
    for d in (char_dir, out / "ontologies", out / "guide", out / "output"):
        d.mkdir(parents=True, exist_ok=True)

    entries = []
    grouped: dict = {}
    for stem, fields in read_character_rows(characters):
        grouped.setdefault((stem, fields[0].strip()), []).append(fields)
    for (stem, number), rows in sorted(grouped.items(), key=lambda kv: (kv[0][0], _num(kv[0][1]))):
        name = f"{stem}_char{number.zfill(3)}.tsv"
        target = char_dir / name
        body = ["\t".join(CHARACTER_COLUMNS)] + ["\t".join(r) for r in rows]
        target.write_text("\n".join(body) + "\n", encoding="utf-8")
        entries.append(("character", target))
    for src in ontologies:
        target = out / "ontologies" / Path(src).name
        shutil.copyfile(src, target)
        entries.append(("ontology", target))
    if guide is not None:
        target = out / "guide" / Path(guide).name
        shutil.copyfile(guide, target)
        entries.append(("guide", target))
    validator = out / "validate_annotations.py"
    validator.write_text(VALIDATOR_SCRIPT, encoding="utf-8")
    validator.chmod(0o755)
    entries.append(("validator", validator))

    manifest = {
        "characters": sum(1 for kind, _ in entries if kind == "character"),
        "files": [
            {"kind": kind, "path": p.relative_to(out).as_posix(), "sha256": _sha256(p)}
            for kind, p in entries
        ],
    }
    (out / "MANIFEST.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def _num(text: str):
    try:
        return (0, int(text))
    except ValueError:
        return (1, text)
