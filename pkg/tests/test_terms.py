import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqsim.terms import TermId, is_curie

prefixes = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True)
locals_ = st.from_regex(r"[A-Za-z0-9_.#-]{1,12}", fullmatch=True)


@given(prefixes, locals_)
def test_curie_round_trip(prefix, local):
    tid = TermId(prefix, local)
    assert TermId.parse(str(tid)) == tid
    assert is_curie(str(tid))


def test_parse_splits_on_first_colon():
    tid = TermId.parse("PATO:0002211")
    assert (tid.prefix, tid.local) == ("PATO", "0002211")
    assert repr(tid) == "TermId('PATO:0002211')"


@pytest.mark.parametrize("bad", ["", "PATO", ":1", "A:", "A B:1", "A:1 2", "'x':1"])
def test_rejects_malformed(bad):
    assert not is_curie(bad)
    with pytest.raises(ValueError):
        TermId.parse(bad)


def test_hashable_and_ordered():
    a, b = TermId("A", "1"), TermId("A", "2")
    assert {a, TermId.parse("A:1")} == {a}
    assert sorted([b, a]) == [a, b]
