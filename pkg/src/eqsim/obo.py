"""Reading, writing and merging OBO flat files.

Only the tags that feed subsumption and validation are interpreted:
``id``, ``name``, ``is_a``, ``relationship``, ``intersection_of``,
``is_obsolete`` and ``disjoint_from`` on terms, and ``id``, ``name``,
``is_transitive``, ``is_a`` (plus ``xref`` for the CURIE of a shorthand
relation id) on typedefs. Everything else is kept verbatim as opaque
metadata and counted.
"""

from __future__ import annotations

import io
import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from .manchester import ClassExpression, Intersection, Named, SomeValuesFrom, conjoin, normalize_label, signature
from .terms import TermId, is_curie

logger = logging.getLogger(__name__)

# relation ids without a prefix ("part_of") and no CURIE xref live under this one
LOCAL_RELATION_PREFIX = "obo"

TERM_TAGS = frozenset({"id", "name", "is_a", "relationship", "intersection_of", "is_obsolete", "disjoint_from"})
TYPEDEF_TAGS = frozenset({"id", "name", "is_transitive", "is_a"})


class OboParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "") -> None:
        where = f"{source}:{line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.source = source


@dataclass(eq=True)
class PropertyInfo:
    id: TermId
    label: str = ""
    transitive: bool = False
    super_properties: set = field(default_factory=set)
    aliases: tuple = ()
    metadata: list = field(default_factory=list)


@dataclass(eq=True)
class OntologyClass:
    id: TermId
    label: str = ""
    obsolete: bool = False
    superclasses: list = field(default_factory=list)
    equivalents: list = field(default_factory=list)
    disjoint_with: list = field(default_factory=list)
    metadata: list = field(default_factory=list)
    dangling: bool = False


@dataclass
class Ontology:
    classes: dict = field(default_factory=dict)
    properties: dict = field(default_factory=dict)
    provenance: list = field(default_factory=list)
    header: list = field(default_factory=list)
    unknown_tags: Counter = field(default_factory=Counter)

    def __len__(self) -> int:
        return len(self.classes)

    @cached_property
    def _label_index(self) -> dict:
        index = defaultdict(list)
        for cls in self.classes.values():
            if cls.label:
                index[normalize_label(cls.label)].append(cls.id)
        return index

    @cached_property
    def _property_index(self) -> dict:
        index = defaultdict(list)
        for prop in self.properties.values():
            names = {str(prop.id), *prop.aliases}
            if prop.label:
                names.add(prop.label)
            for name in names:
                index[normalize_label(name)].append(prop.id)
        return index

    def class_ids_for_label(self, label: str) -> list:
        return sorted(self._label_index.get(normalize_label(label), ()))

    def property_ids_for_name(self, name: str) -> list:
        return sorted(set(self._property_index.get(normalize_label(name), ())))

    def dangling_ids(self) -> set:
        return {tid for tid, cls in self.classes.items() if cls.dangling}


def lookup(ont: Ontology, tid: TermId) -> Optional[OntologyClass]:
    return ont.classes.get(tid)


# -- parsing ---------------------------------------------------------------


def strip_comment(value: str) -> str:
    """Drop a trailing ``! comment`` that is outside quotes and not escaped."""
    in_quote = False
    i = 0
    while i < len(value):
        c = value[i]
        if c == "\\":
            i += 2
            continue
        if c == '"':
            in_quote = not in_quote
        elif c == "!" and not in_quote:
            return value[:i].rstrip()
        i += 1
    return value.strip()


def _strip_qualifiers(value: str) -> str:
    # trailing {source="..."} style modifiers on interpreted tags
    if value.endswith("}") and "{" in value:
        return value[: value.rindex("{")].rstrip()
    return value


@dataclass
class _Stanza:
    kind: str
    line: int
    tags: list = field(default_factory=list)  # (tag, value, line)


def _read_stanzas(lines: Iterable[str]):
    header = []
    stanzas = []
    current = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("!"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = _Stanza(stripped[1:-1], lineno)
            stanzas.append(current)
            continue
        tag, sep, value = line.partition(":")
        if not sep:
            raise OboParseError(f"expected 'tag: value', got {stripped!r}", lineno)
        item = (tag.strip(), value.strip(), lineno)
        if current is None:
            header.append(item)
        else:
            current.tags.append(item)
    return header, stanzas


def _parse_bool(value: str) -> bool:
    return value.strip().lower() == "true"


def parse_obo(source: Union[str, IO[str]], name: str = "<obo>") -> Ontology:
    """Parse OBO text (a string or a text stream) into an :class:`Ontology`."""
    text = source if isinstance(source, str) else source.read()
    header, stanzas = _read_stanzas(io.StringIO(text))
    ont = Ontology(provenance=[name], header=[(t, v) for t, v, _ in header])

    # typedefs first so relationship lines can use shorthand relation ids
    raw_props = {}
    prop_alias = {}
    for st in stanzas:
        if st.kind != "Typedef":
            continue
        ids = [v for t, v, _ in st.tags if t == "id"]
        if not ids:
            raise OboParseError("typedef stanza without id", st.line, name)
        raw_id = strip_comment(ids[0])
        xrefs = [strip_comment(v) for t, v, _ in st.tags if t == "xref"]
        if is_curie(raw_id):
            tid, aliases = TermId.parse(raw_id), ()
        else:
            curie_xrefs = [x for x in xrefs if is_curie(x)]
            tid = TermId.parse(curie_xrefs[0]) if curie_xrefs else TermId(LOCAL_RELATION_PREFIX, raw_id)
            aliases = (raw_id,)
        if tid in raw_props:
            raise OboParseError(
                f"duplicate typedef id {tid} (first at line {raw_props[tid][1].line})", st.line, name
            )
        raw_props[tid] = (aliases, st)
        for alias in aliases:
            prop_alias[alias] = tid

    def rel_id(token: str, lineno: int) -> TermId:
        if token in prop_alias:
            return prop_alias[token]
        if is_curie(token):
            return TermId.parse(token)
        return TermId(LOCAL_RELATION_PREFIX, token)

    for tid, (aliases, st) in raw_props.items():
        prop = PropertyInfo(id=tid, aliases=aliases)
        for tag, value, lineno in st.tags:
            v = strip_comment(value)
            if tag == "id":
                continue
            if tag == "name":
                prop.label = v
            elif tag == "is_transitive":
                prop.transitive = _parse_bool(v)
            elif tag == "is_a":
                prop.super_properties.add(rel_id(_strip_qualifiers(v).split()[0], lineno))
            elif tag == "xref" and aliases and is_curie(v) and TermId.parse(v) == tid:
                continue  # consumed as the property's CURIE
            else:
                prop.metadata.append((tag, value))
                ont.unknown_tags[tag] += 1
        ont.properties[tid] = prop

    first_seen = {}
    for st in stanzas:
        if st.kind == "Typedef":
            continue
        if st.kind != "Term":
            ont.unknown_tags[f"[{st.kind}]"] += 1
            continue
        ids = [(v, ln) for t, v, ln in st.tags if t == "id"]
        if not ids:
            raise OboParseError("term stanza without id", st.line, name)
        try:
            tid = TermId.parse(strip_comment(ids[0][0]))
        except ValueError as exc:
            raise OboParseError(str(exc), ids[0][1], name) from None
        if tid in first_seen:
            raise OboParseError(f"duplicate term id {tid} (first defined at line {first_seen[tid]})", st.line, name)
        first_seen[tid] = st.line
        ont.classes[tid] = _parse_term(tid, st, rel_id, ont.unknown_tags, name)

    _add_dangling(ont)
    return ont


def _parse_term(tid, st: _Stanza, rel_id, unknown: Counter, name: str) -> OntologyClass:
    cls = OntologyClass(id=tid)
    genus = []
    differentia = []
    for tag, value, lineno in st.tags:
        if tag == "id":
            continue
        v = _strip_qualifiers(strip_comment(value)) if tag in TERM_TAGS else value
        try:
            if tag == "name":
                cls.label = strip_comment(value)
            elif tag == "is_a":
                cls.superclasses.append(Named(TermId.parse(v.split()[0])))
            elif tag == "relationship":
                rel, target = v.split()[:2]
                cls.superclasses.append(SomeValuesFrom(rel_id(rel, lineno), Named(TermId.parse(target))))
            elif tag == "intersection_of":
                parts = v.split()
                if len(parts) == 1:
                    genus.append(Named(TermId.parse(parts[0])))
                else:
                    differentia.append(SomeValuesFrom(rel_id(parts[0], lineno), Named(TermId.parse(parts[1]))))
            elif tag == "is_obsolete":
                cls.obsolete = _parse_bool(v)
            elif tag == "disjoint_from":
                cls.disjoint_with.append(TermId.parse(v.split()[0]))
            else:
                cls.metadata.append((tag, value))
                unknown[tag] += 1
        except ValueError as exc:
            raise OboParseError(f"bad {tag} value {value!r}: {exc}", lineno, name) from None
    if genus or differentia:
        cls.equivalents.append(conjoin(genus + differentia))
    return cls


def referenced_ids(ont: Ontology) -> set:
    refs = set()
    for cls in ont.classes.values():
        for expr in (*cls.superclasses, *cls.equivalents):
            refs.update(tid for kind, tid in signature(expr) if kind == "class")
        refs.update(cls.disjoint_with)
    return refs


def _add_dangling(ont: Ontology) -> None:
    for tid in sorted(referenced_ids(ont) - ont.classes.keys()):
        ont.classes[tid] = OntologyClass(id=tid, dangling=True)
    for prop in list(ont.properties.values()):
        for sup in prop.super_properties:
            ont.properties.setdefault(sup, PropertyInfo(id=sup))
    for cls in ont.classes.values():
        for expr in (*cls.superclasses, *cls.equivalents):
            for kind, tid in signature(expr):
                if kind == "property":
                    ont.properties.setdefault(tid, PropertyInfo(id=tid))


def load_obo(path: Union[str, Path]) -> Ontology:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_obo(fh, name=path.name)


# -- serialization ---------------------------------------------------------


def _relationship_lines(expr: ClassExpression, tag: str) -> list:
    if isinstance(expr, Named):
        return [f"{tag}: {expr.id}"]
    if isinstance(expr, SomeValuesFrom) and isinstance(expr.filler, Named):
        return [f"{tag}: {expr.property} {expr.filler.id}"]
    raise ValueError(f"cannot write {expr.text!r} as an OBO {tag} line")


def serialize_obo(ont: Ontology) -> str:
    out = []
    for tag, value in ont.header:
        out.append(f"{tag}: {value}")
    if out:
        out.append("")
    for tid in sorted(ont.classes):
        cls = ont.classes[tid]
        if cls.dangling:
            continue
        out.append("[Term]")
        out.append(f"id: {tid}")
        if cls.label:
            out.append(f"name: {cls.label}")
        for tag, value in cls.metadata:
            out.append(f"{tag}: {value}")
        for sup in cls.superclasses:
            if isinstance(sup, Named):
                out.append(f"is_a: {sup.id}")
            else:
                out.extend(_relationship_lines(sup, "relationship"))
        for eq in cls.equivalents:
            for op in eq.operands if isinstance(eq, Intersection) else (eq,):
                out.extend(_relationship_lines(op, "intersection_of"))
        for other in cls.disjoint_with:
            out.append(f"disjoint_from: {other}")
        if cls.obsolete:
            out.append("is_obsolete: true")
        out.append("")
    for pid in sorted(ont.properties):
        prop = ont.properties[pid]
        out.append("[Typedef]")
        if prop.aliases:
            out.append(f"id: {prop.aliases[0]}")
            if pid.prefix != LOCAL_RELATION_PREFIX:
                out.append(f"xref: {pid}")
        else:
            out.append(f"id: {pid}")
        if prop.label:
            out.append(f"name: {prop.label}")
        for tag, value in prop.metadata:
            out.append(f"{tag}: {value}")
        for sup in sorted(prop.super_properties):
            out.append(f"is_a: {sup}")
        if prop.transitive:
            out.append("is_transitive: true")
        out.append("")
    return "\n".join(out).rstrip("\n") + "\n"


# -- merging ---------------------------------------------------------------


def _union(a: list, b: list) -> list:
    seen = set(a)
    return a + [x for x in b if not (x in seen or seen.add(x))]


def _rewrite_properties(expr: ClassExpression, mapping: dict) -> ClassExpression:
    if isinstance(expr, Named):
        return expr
    if isinstance(expr, SomeValuesFrom):
        return SomeValuesFrom(mapping.get(expr.property, expr.property), _rewrite_properties(expr.filler, mapping))
    return conjoin(_rewrite_properties(op, mapping) for op in expr.operands)


def merge(ontologies: list, strip_disjoints: bool = False, log: Optional[list] = None) -> Ontology:
    """Union several ontologies into a new one.

    Classes defined in more than one input are merged tag-wise: axioms are
    unioned, the first non-empty label wins and a ``label_conflict`` entry is
    appended to ``log``. With ``strip_disjoints`` every disjointness axiom is
    dropped after being counted.
    """
    if not ontologies:
        raise ValueError("merge needs at least one ontology")
    if log is None:
        log = []
    merged = Ontology()

    for ont in ontologies:
        merged.provenance.extend(ont.provenance)
        merged.unknown_tags.update(ont.unknown_tags)
        for tag, value in ont.header:
            if (tag, value) not in merged.header:
                merged.header.append((tag, value))
        for pid, prop in ont.properties.items():
            have = merged.properties.get(pid)
            if have is None:
                merged.properties[pid] = replace(prop, super_properties=set(prop.super_properties),
                                                 metadata=list(prop.metadata))
                continue
            if not have.label:
                have.label = prop.label
            have.transitive = have.transitive or prop.transitive
            have.super_properties |= prop.super_properties
            have.aliases = tuple(dict.fromkeys(have.aliases + prop.aliases))
            have.metadata = _union(have.metadata, prop.metadata)
        for tid, cls in ont.classes.items():
            have = merged.classes.get(tid)
            if have is None:
                merged.classes[tid] = replace(
                    cls,
                    superclasses=list(cls.superclasses),
                    equivalents=list(cls.equivalents),
                    disjoint_with=list(cls.disjoint_with),
                    metadata=list(cls.metadata),
                )
                continue
            if cls.label and have.label and cls.label != have.label:
                log.append({"kind": "label_conflict", "id": str(tid),
                            "detail": f"kept {have.label!r}, dropped {cls.label!r}"})
                logger.warning("label conflict on %s: %r vs %r", tid, have.label, cls.label)
            elif not have.label:
                have.label = cls.label
            have.obsolete = have.obsolete or cls.obsolete
            have.dangling = have.dangling and cls.dangling
            have.superclasses = _union(have.superclasses, cls.superclasses)
            have.equivalents = _union(have.equivalents, cls.equivalents)
            have.disjoint_with = _union(have.disjoint_with, cls.disjoint_with)
            have.metadata = _union(have.metadata, cls.metadata)

    _unify_local_relations(merged, log)

    if strip_disjoints:
        count = 0
        for cls in merged.classes.values():
            count += len(cls.disjoint_with)
            cls.disjoint_with = []
        log.append({"kind": "disjoint_stripped", "id": None, "detail": {"count": count}})
    return merged


def _unify_local_relations(ont: Ontology, log: list) -> None:
    # "obo:part_of" from a file lacking the xref becomes the CURIE another file declared
    alias_to_id = {}
    for pid, prop in ont.properties.items():
        if pid.prefix != LOCAL_RELATION_PREFIX:
            for alias in prop.aliases:
                alias_to_id.setdefault(alias, pid)
    mapping = {}
    for pid in list(ont.properties):
        if pid.prefix == LOCAL_RELATION_PREFIX and pid.local in alias_to_id:
            target = alias_to_id[pid.local]
            mapping[pid] = target
            local = ont.properties.pop(pid)
            have = ont.properties[target]
            have.transitive = have.transitive or local.transitive
            have.super_properties |= local.super_properties
            if not have.label:
                have.label = local.label
            log.append({"kind": "relation_unified", "id": str(pid), "detail": str(target)})
    if not mapping:
        return
    for prop in ont.properties.values():
        prop.super_properties = {mapping.get(s, s) for s in prop.super_properties}
    for cls in ont.classes.values():
        cls.superclasses = list(dict.fromkeys(_rewrite_properties(e, mapping) for e in cls.superclasses))
        cls.equivalents = list(dict.fromkeys(_rewrite_properties(e, mapping) for e in cls.equivalents))


def write_merge_log(log: list, fh: IO[str]) -> None:
    for entry in log:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")
