"""Checks applied to annotation rows against the merged ontology.

=====  ========  ===========================================================
code   severity  meaning
=====  ========  ===========================================================
V1     error     structural problem (column count, empty required field)
V2     error     identifier that does not resolve to a declared term
V3     error     label column disagrees with the identifier column
V4     error     obsolete class used
V5     error     expression syntax error (including unbalanced parentheses)
V6     error     ``some`` used with an identifier that is not a property
V7     warning   the same EQ given twice for one character state
V8     warning   quality with no PATO term
=====  ========  ===========================================================
"""

from __future__ import annotations

from ..manchester import (
    ID_FORM,
    LABEL_FORM,
    ExpressionError,
    Named,
    SynAtom,
    normalize_label,
    parse_syntax,
    same_shape,
    syntax_atoms,
)
from ..terms import TermId, is_curie
from .tsv import ERROR, TERM_SLOTS, WARNING, AnnotationSet, ValidationFinding, build_eq

QUALITY_PREFIX = "PATO"


def _expected_names(kind: str, tid: TermId, ont) -> set:
    if kind == "class":
        return {normalize_label(ont.classes[tid].label)}
    prop = ont.properties[tid]
    names = {str(tid), *prop.aliases}
    if prop.label:
        names.add(prop.label)
    return {normalize_label(n) for n in names}


def _check_atom(kind: str, atom: SynAtom, ont, report) -> TermId | None:
    """Resolve one identifier-form atom; report V2/V4/V6 and return the id if usable."""
    if atom.quoted or not is_curie(atom.text):
        if kind == "property" and not atom.quoted:
            hits = ont.property_ids_for_name(atom.text)
            if len(hits) == 1:
                return hits[0]
        report("V2", ERROR, f"unresolvable identifier {atom.text!r}")
        return None
    tid = TermId.parse(atom.text)
    cls = ont.classes.get(tid)
    if kind == "property":
        if tid in ont.properties:
            return tid
        if cls is not None and not cls.dangling:
            report("V6", ERROR, f"{tid} is used with 'some' but is not a property")
        else:
            report("V2", ERROR, f"unresolvable identifier {tid}")
        return None
    if cls is None or cls.dangling:
        report("V2", ERROR, f"unresolvable identifier {tid}")
        return None
    if cls.obsolete:
        report("V4", ERROR, f"obsolete class {tid} ({cls.label!r})")
    return tid


def _check_pair(slot: str, id_text: str, label_text: str, ont, report) -> None:
    try:
        id_tree = parse_syntax(id_text, ID_FORM)
    except ExpressionError as exc:
        report("V5", ERROR, f"{slot} identifier expression: {exc}")
        id_tree = None
    try:
        label_tree = parse_syntax(label_text, LABEL_FORM)
    except ExpressionError as exc:
        report("V5", ERROR, f"{slot} label expression: {exc}")
        label_tree = None
    if id_tree is None:
        return
    resolved = [(kind, atom, _check_atom(kind, atom, ont, report)) for kind, atom in syntax_atoms(id_tree)]
    if label_tree is None:
        return
    if not same_shape(id_tree, label_tree):
        report("V3", ERROR, f"{slot} label expression {label_text!r} does not match the shape of {id_text!r}")
        return
    for (kind, _, tid), (_, label_atom) in zip(resolved, syntax_atoms(label_tree)):
        if tid is None:
            continue
        if normalize_label(label_atom.text) not in _expected_names(kind, tid, ont):
            want = ont.classes[tid].label if kind == "class" else ont.properties[tid].label
            report("V3", ERROR, f"{tid} is labelled {want!r} in the ontology, not {label_atom.text!r}")


def _has_quality_term(expr) -> bool:
    ops = expr.operands if hasattr(expr, "operands") else (expr,)
    return any(isinstance(op, Named) and op.id.prefix == QUALITY_PREFIX for op in ops)


def validate(aset: AnnotationSet, ont) -> list:
    """Run every check over the rows of ``aset``; findings come back sorted."""
    findings = []
    seen_eqs = {}
    for row in aset.rows:
        def report(code, severity, message, row=row):
            findings.append(ValidationFinding(row.file, row.line, code, severity, message))

        for msg in row.problems:
            report("V1", ERROR, msg)
        if len(row.fields) != 10:
            continue
        for slot, i, j in TERM_SLOTS:
            id_text, label_text = row.fields[i].strip(), row.fields[j].strip()
            if id_text and label_text:
                _check_pair(slot, id_text, label_text, ont, report)
        if row.problems:
            continue
        try:
            eq = build_eq(row.fields, ont)
        except ExpressionError:
            continue
        if not _has_quality_term(eq.quality):
            report("V8", WARNING, f"quality {eq.quality.text} has no {QUALITY_PREFIX} term")
        key = (int(row.fields[0].strip()), row.fields[2].strip())
        first = seen_eqs.setdefault((key, eq), row)
        if first is not row:
            report("V7", WARNING, f"duplicate of the EQ at {first.file}:{first.line}")
    return sorted(findings)


def is_clean(findings) -> bool:
    return not any(f.severity == ERROR for f in findings)


def clean_set(aset: AnnotationSet, findings, ont=None) -> AnnotationSet:
    """Annotation set restricted to rows without error findings; the rest are quarantined."""
    bad = {(f.file, f.line) for f in findings if f.severity == ERROR}
    out = AnnotationSet(name=aset.name, files=list(aset.files), headers=dict(aset.headers))
    for row in aset.rows:
        out.rows.append(row)
        if (row.file, row.line) in bad or row.problems:
            out.quarantine.append(row)
            continue
        if row.eq is None or ont is not None:
            try:
                row.eq = build_eq(row.fields, ont)
            except ExpressionError:
                out.quarantine.append(row)
                continue
        out.add(row)
    return out
