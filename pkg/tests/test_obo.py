import io
import json
import random

import pytest

from eqsim.manchester import Intersection, Named, SomeValuesFrom, parse_expression
from eqsim.obo import (
    OboParseError,
    Ontology,
    load_obo,
    lookup,
    merge,
    parse_obo,
    serialize_obo,
    strip_comment,
    write_merge_log,
)
from eqsim.terms import TermId

from conftest import DATA, FIXTURE_FILES

T = TermId.parse


def axioms(ont: Ontology) -> dict:
    return {
        tid: (sorted(e.text for e in c.superclasses), sorted(e.text for e in c.equivalents),
              sorted(map(str, c.disjoint_with)))
        for tid, c in ont.classes.items()
    }


def snapshot(ont: Ontology) -> dict:
    return {
        "classes": {tid: (c.label, c.obsolete, c.dangling) for tid, c in ont.classes.items()},
        "axioms": axioms(ont),
        "properties": {pid: (p.label, p.transitive, frozenset(p.super_properties))
                       for pid, p in ont.properties.items()},
    }


def test_recurved_stanza():
    ont = parse_obo("[Term]\nid: PATO:0002211\nname: recurved\n")
    cls = ont.classes[T("PATO:0002211")]
    assert cls.label == "recurved"
    assert len(ont) == 1


def test_empty_input():
    ont = parse_obo("")
    assert len(ont) == 0 and not ont.properties


def test_is_a_and_relationship():
    text = (
        "[Term]\nid: X:1\nname: one\n\n[Term]\nid: X:2\nname: two\n\n"
        "[Term]\nid: X:3\nname: three\nis_a: X:1 ! one\nrelationship: part_of X:2 ! two\n\n"
        "[Typedef]\nid: part_of\nname: part of\nxref: BFO:0000050\nis_transitive: true\n"
    )
    ont = parse_obo(text)
    part_of = T("BFO:0000050")
    assert ont.classes[T("X:3")].superclasses == [Named(T("X:1")), SomeValuesFrom(part_of, Named(T("X:2")))]
    prop = ont.properties[part_of]
    assert prop.transitive and prop.label == "part of" and prop.aliases == ("part_of",)


def test_relationship_without_typedef_uses_local_prefix():
    ont = parse_obo("[Term]\nid: X:1\nrelationship: develops_from X:2\n")
    (sup,) = ont.classes[T("X:1")].superclasses
    assert sup.property == TermId("obo", "develops_from")
    assert ont.classes[T("X:2")].dangling


def test_comments_and_qualifiers_stripped():
    ont = parse_obo('[Term]\nid: X:1 ! the id\nname: thing ! note\nis_a: X:2 {source="x"} ! two\n')
    cls = ont.classes[T("X:1")]
    assert cls.label == "thing"
    assert cls.superclasses == [Named(T("X:2"))]


def test_escaped_bang_is_not_a_comment():
    assert strip_comment(r"a \! b ! c") == r"a \! b"


def test_intersection_of_becomes_equivalence():
    ont = parse_obo(
        "[Term]\nid: X:3\nintersection_of: X:1\nintersection_of: BFO:0000050 X:2\n"
        "[Typedef]\nid: BFO:0000050\nname: part_of\n"
    )
    (eq,) = ont.classes[T("X:3")].equivalents
    assert eq == parse_expression("X:1 and BFO:0000050 some X:2")


def test_obsolete_and_disjoint():
    ont = parse_obo("[Term]\nid: X:1\nis_obsolete: true\ndisjoint_from: X:2\n")
    cls = ont.classes[T("X:1")]
    assert cls.obsolete and cls.disjoint_with == [T("X:2")]


def test_missing_id_reports_line():
    with pytest.raises(OboParseError) as err:
        parse_obo("[Term]\nid: X:1\n\n[Term]\nname: no id\n", "f.obo")
    assert err.value.line == 4
    assert "f.obo:4" in str(err.value)


def test_duplicate_id_names_both_occurrences():
    with pytest.raises(OboParseError) as err:
        parse_obo("[Term]\nid: X:1\n\n[Term]\nid: X:1\n")
    assert err.value.line == 4
    assert "line 1" in str(err.value)


def test_unknown_tags_counted_and_kept():
    ont = parse_obo('[Term]\nid: X:1\ndef: "d" []\nsynonym: "s" EXACT []\nsynonym: "t" EXACT []\n'
                    "\n[Instance]\nid: I:1\n")
    assert ont.unknown_tags["synonym"] == 2
    assert ont.unknown_tags["def"] == 1
    assert ont.unknown_tags["[Instance]"] == 1
    assert ("def", '"d" []') in ont.classes[T("X:1")].metadata


def test_crlf_input():
    ont = parse_obo("[Term]\r\nid: X:1\r\nname: one\r\n")
    assert ont.classes[T("X:1")].label == "one"


def test_lookup(fixture_ont):
    assert lookup(fixture_ont, T("PATO:0002211")).label == "recurved"
    assert lookup(fixture_ont, T("PATO:7777777")) is None
    obsolete = lookup(fixture_ont, T("UBERON:0000000"))
    assert obsolete is not None and obsolete.obsolete


# -- merge -----------------------------------------------------------------


def test_merge_identity(tooth_ont):
    merged = merge([tooth_ont])
    assert snapshot(merged) == snapshot(tooth_ont)


def test_merge_distinct_classes():
    a = parse_obo("[Term]\nid: X:1\nname: a\n")
    b = parse_obo("[Term]\nid: X:2\nname: b\n")
    assert set(merge([a, b]).classes) == {T("X:1"), T("X:2")}


def test_label_conflict_first_seen_wins():
    a = parse_obo("[Term]\nid: X:1\nname: a\nis_a: X:5\n")
    b = parse_obo("[Term]\nid: X:1\nname: b\nis_a: X:6\n")
    log = []
    merged = merge([a, b], log=log)
    cls = merged.classes[T("X:1")]
    assert cls.label == "a"
    assert [e["kind"] for e in log] == ["label_conflict"]
    assert cls.superclasses == [Named(T("X:5")), Named(T("X:6"))]


def test_merge_order_insensitive():
    onts = [load_obo(DATA / f) for f in FIXTURE_FILES]
    base = merge(onts)
    rng = random.Random(7)
    for _ in range(5):
        perm = onts[:]
        rng.shuffle(perm)
        other = merge(perm)
        assert set(other.classes) == set(base.classes)
        assert axioms(other) == axioms(base)
        assert set(other.properties) == set(base.properties)


def test_relation_shorthand_unified_across_files():
    a = parse_obo("[Term]\nid: X:1\nrelationship: part_of X:2\n")
    b = parse_obo("[Typedef]\nid: part_of\nxref: BFO:0000050\n")
    log = []
    merged = merge([a, b], log=log)
    (sup,) = merged.classes[T("X:1")].superclasses
    assert sup.property == T("BFO:0000050")
    assert TermId("obo", "part_of") not in merged.properties
    assert any(e["kind"] == "relation_unified" for e in log)


def test_strip_disjoints_removes_only_disjoints(fixture_ont, obo_paths):
    log = []
    stripped = merge([load_obo(p) for p in obo_paths], strip_disjoints=True, log=log)
    assert all(not c.disjoint_with for c in stripped.classes.values())
    n = sum(len(c.disjoint_with) for c in fixture_ont.classes.values())
    assert n > 0
    assert log[-1] == {"kind": "disjoint_stripped", "id": None, "detail": {"count": n}}
    for tid, cls in fixture_ont.classes.items():
        other = stripped.classes[tid]
        assert (other.superclasses, other.equivalents, other.label) == (cls.superclasses, cls.equivalents, cls.label)


def test_merge_log_is_json_lines():
    buf = io.StringIO()
    write_merge_log([{"kind": "label_conflict", "id": "X:1", "detail": "d"}], buf)
    assert json.loads(buf.getvalue()) == {"kind": "label_conflict", "id": "X:1", "detail": "d"}


def test_merge_requires_input():
    with pytest.raises(ValueError):
        merge([])


# -- serialization ---------------------------------------------------------


@pytest.mark.parametrize("name", ["tooth.obo", *FIXTURE_FILES])
def test_serialize_round_trip(name):
    ont = load_obo(DATA / name)
    again = parse_obo(serialize_obo(ont))
    assert snapshot(again) == snapshot(ont)
    assert serialize_obo(again) == serialize_obo(ont)


def test_merged_round_trip(fixture_ont):
    again = parse_obo(serialize_obo(fixture_ont))
    assert snapshot(again) == snapshot(fixture_ont)


def test_dangling_reference_kept():
    ont = parse_obo("[Term]\nid: X:1\nis_a: Y:9\n")
    cls = ont.classes[T("Y:9")]
    assert cls.dangling and cls.label == ""
    assert ont.dangling_ids() == {T("Y:9")}
    assert isinstance(ont.classes[T("X:1")].superclasses[0], Named)
    assert not isinstance(ont.classes[T("X:1")].superclasses[0], Intersection)
