"""EQ annotation files: reading, writing, validation and workspaces."""

from .tsv import (
    COLUMNS,
    ERROR,
    HEADER,
    WARNING,
    AnnotationRow,
    AnnotationSet,
    CharacterState,
    EQAnnotation,
    ValidationFinding,
    load_annotation_dir,
    merge_sets,
    parse_annotation_tsv,
    rows_to_tsv,
    serialize_annotation_tsv,
)
from .validate import clean_set, is_clean, validate
from .workspace import WorkspaceExistsError, scaffold_workspace

__all__ = [
    "COLUMNS",
    "ERROR",
    "HEADER",
    "WARNING",
    "AnnotationRow",
    "AnnotationSet",
    "CharacterState",
    "EQAnnotation",
    "ValidationFinding",
    "WorkspaceExistsError",
    "clean_set",
    "is_clean",
    "load_annotation_dir",
    "merge_sets",
    "parse_annotation_tsv",
    "rows_to_tsv",
    "scaffold_workspace",
    "serialize_annotation_tsv",
    "validate",
]
