"""The 10-column EQ annotation TSV.

Columns, in order::

    character_number  character_text  state_symbol  state_text
    entity_id  entity_label  quality_id  quality_label
    related_entity_id  related_entity_label

Each ``*_id`` column holds an identifier-form Manchester expression and the
``*_label`` column next to it the same expression written with labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping, Optional, Union

from ..manchester import ID_FORM, ClassExpression, ExpressionError, parse_expression

COLUMNS = (
    "character_number",
    "character_text",
    "state_symbol",
    "state_text",
    "entity_id",
    "entity_label",
    "quality_id",
    "quality_label",
    "related_entity_id",
    "related_entity_label",
)
HEADER = "\t".join(COLUMNS)
CHARACTER_COLUMNS = COLUMNS[:4]

TERM_SLOTS = (("entity", 4, 5), ("quality", 6, 7), ("related_entity", 8, 9))

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True, order=True)
class ValidationFinding:
    file: str
    line: int
    code: str
    severity: str = field(compare=False)
    message: str = field(compare=False)

    def to_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code, "file": self.file,
                "line": self.line, "message": self.message}


@dataclass(frozen=True)
class CharacterState:
    character_number: int
    character_text: str
    state_symbol: str
    state_text: str

    @property
    def key(self) -> tuple:
        return (self.character_number, self.state_symbol)


@dataclass(frozen=True)
class EQAnnotation:
    entity: ClassExpression
    quality: ClassExpression
    related_entity: Optional[ClassExpression] = None
    entity_text: tuple = field(default=("", ""), compare=False)
    quality_text: tuple = field(default=("", ""), compare=False)
    related_text: tuple = field(default=("", ""), compare=False)

    @property
    def sort_key(self) -> tuple:
        rel = self.related_entity.text if self.related_entity is not None else ""
        return (self.entity.text, self.quality.text, rel)

    def expressions(self) -> list:
        out = [self.entity, self.quality]
        if self.related_entity is not None:
            out.append(self.related_entity)
        return out


@dataclass
class AnnotationRow:
    file: str
    line: int
    fields: list
    state: Optional[CharacterState] = None
    eq: Optional[EQAnnotation] = None
    problems: list = field(default_factory=list)  # structural, as messages

    @property
    def key(self) -> Optional[tuple]:
        return self.state.key if self.state else None


@dataclass
class AnnotationSet:
    annotations: dict = field(default_factory=dict)  # (char, state) -> set of EQAnnotation
    states: dict = field(default_factory=dict)       # (char, state) -> CharacterState
    rows: list = field(default_factory=list)
    quarantine: list = field(default_factory=list)
    name: str = ""
    files: list = field(default_factory=list)
    headers: dict = field(default_factory=dict)      # file -> header line as read

    def add(self, row: AnnotationRow) -> None:
        self.annotations.setdefault(row.key, set()).add(row.eq)
        self.states.setdefault(row.key, row.state)

    def keys(self) -> list:
        return sorted(self.annotations)

    def __len__(self) -> int:
        return len(self.annotations)

    def eq_count(self) -> int:
        return sum(len(v) for v in self.annotations.values())

    def expressions(self) -> set:
        return {e for eqs in self.annotations.values() for eq in eqs for e in eq.expressions()}

    def restricted(self, lo: int, hi: int) -> AnnotationSet:
        keep = {k: v for k, v in self.annotations.items() if lo <= k[0] <= hi}
        return AnnotationSet(keep, {k: self.states[k] for k in keep}, name=self.name, files=list(self.files))


def _structural_problems(fields: list) -> list:
    if len(fields) != len(COLUMNS):
        return [f"expected {len(COLUMNS)} columns, found {len(fields)}"]
    problems = []
    try:
        int(fields[0].strip())
    except ValueError:
        problems.append(f"character number {fields[0]!r} is not an integer")
    if not fields[2].strip():
        problems.append("empty state symbol")
    for slot, i, j in TERM_SLOTS[:2]:
        if not fields[i].strip():
            problems.append(f"empty {slot} identifier")
        if not fields[j].strip():
            problems.append(f"empty {slot} label")
    if bool(fields[8].strip()) != bool(fields[9].strip()):
        problems.append("related entity identifier and label must both be present or both empty")
    return problems


def _apply_column_map(header: list, column_map: Mapping) -> list:
    """Source column index for each of our columns (``None`` when unmapped)."""
    positions = []
    for col in COLUMNS:
        src = column_map.get(col)
        if src is None:
            positions.append(None)
        elif isinstance(src, int):
            positions.append(src)
        else:
            positions.append(header.index(src))
    return positions


def parse_annotation_tsv(
    source: Union[str, IO[str]],
    file: str = "<tsv>",
    ont=None,
    column_map: Optional[Mapping] = None,
) -> tuple:
    """Read one annotation TSV.

    Returns ``(annotation_set, findings)``. Only structural (``V1``) findings
    are produced here; rows whose identifier-form expressions do not resolve
    stay in ``rows`` but are left out of the annotation mapping for
    :func:`~eqsim.annotations.validate.validate` to report on.
    ``column_map`` maps our column names to source header names or indexes,
    for files that use another layout.
    """
    text = source if isinstance(source, str) else source.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    aset = AnnotationSet(files=[file])
    findings = []
    if not lines:
        return aset, findings
    header = lines[0].rstrip("\r")
    aset.headers[file] = header
    positions = None
    if column_map:
        positions = _apply_column_map(header.split("\t"), column_map)
    elif header.split("\t") != list(COLUMNS):
        findings.append(ValidationFinding(file, 1, "V1", WARNING, "header does not match the standard column names"))

    for lineno, raw in enumerate(lines[1:], start=2):
        raw = raw.rstrip("\r")
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if positions is not None:
            fields = [fields[p] if p is not None and p < len(fields) else "" for p in positions]
        row = AnnotationRow(file, lineno, fields, problems=_structural_problems(fields))
        aset.rows.append(row)
        for msg in row.problems:
            findings.append(ValidationFinding(file, lineno, "V1", ERROR, msg))
        if row.problems:
            continue
        row.state = CharacterState(int(fields[0].strip()), fields[1], fields[2].strip(), fields[3])
        try:
            row.eq = build_eq(fields, ont)
        except ExpressionError:
            continue
        aset.add(row)
    return aset, findings


def build_eq(fields: list, ont=None) -> EQAnnotation:
    def expr(i: int) -> Optional[ClassExpression]:
        text = fields[i].strip()
        return parse_expression(text, ont, ID_FORM) if text else None

    return EQAnnotation(
        entity=expr(4),
        quality=expr(6),
        related_entity=expr(8),
        entity_text=(fields[4], fields[5]),
        quality_text=(fields[6], fields[7]),
        related_text=(fields[8], fields[9]),
    )


def serialize_annotation_tsv(aset: AnnotationSet, file: Optional[str] = None) -> str:
    """Write rows back out, one header line and exactly one trailing newline."""
    rows = [r for r in aset.rows if file is None or r.file == file]
    header = aset.headers.get(file, HEADER) if file is not None else HEADER
    out = [header] + ["\t".join(r.fields) for r in rows]
    return "\n".join(out) + "\n"


def rows_to_tsv(rows: Iterable[Iterable[str]]) -> str:
    return "\n".join([HEADER] + ["\t".join(r) for r in rows]) + "\n"


def merge_sets(sets: Iterable[AnnotationSet], name: str = "") -> AnnotationSet:
    merged = AnnotationSet(name=name)
    for s in sets:
        merged.rows.extend(s.rows)
        merged.files.extend(s.files)
        merged.headers.update(s.headers)
        merged.quarantine.extend(s.quarantine)
        for key, eqs in s.annotations.items():
            merged.annotations.setdefault(key, set()).update(eqs)
            merged.states.setdefault(key, s.states[key])
    return merged


def load_annotation_dir(path: Union[str, Path], ont=None, column_map: Optional[Mapping] = None,
                        name: Optional[str] = None) -> tuple:
    """Load every ``*.tsv`` under ``path`` (or the single file ``path``)."""
    path = Path(path)
    files = [path] if path.is_file() else sorted(path.rglob("*.tsv"))
    sets, findings = [], []
    for f in files:
        rel = str(f.relative_to(path)) if path.is_dir() else f.name
        with open(f, encoding="utf-8", newline="") as fh:
            s, found = parse_annotation_tsv(fh, rel, ont, column_map)
        sets.append(s)
        findings.extend(found)
    return merge_sets(sets, name or path.stem), findings


