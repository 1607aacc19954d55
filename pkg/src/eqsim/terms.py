"""Compact identifiers (CURIEs) for ontology classes and properties."""

from __future__ import annotations

import re
from collections import namedtuple

CURIE_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_.\-]*):([^\s()'{}\[\],]+)$")


class TermId(namedtuple("_TermId", "prefix local")):
    """A ``PREFIX:LOCAL`` identifier.

    A tuple underneath: hashing and ordering stay cheap for the millions of
    lookups the reasoner and metrics do.
    """

    __slots__ = ()

    def __new__(cls, prefix: str, local: str) -> TermId:
        if not prefix or ":" in prefix or any(c.isspace() for c in prefix):
            raise ValueError(f"invalid CURIE prefix: {prefix!r}")
        if not local or any(c.isspace() for c in local):
            raise ValueError(f"invalid CURIE local part: {local!r}")
        return super().__new__(cls, prefix, local)

    @classmethod
    def parse(cls, text: str) -> TermId:
        m = CURIE_RE.match(text.strip())
        if m is None:
            raise ValueError(f"not a CURIE: {text!r}")
        return cls(m.group(1), m.group(2))

    def __str__(self) -> str:
        return f"{self.prefix}:{self.local}"

    def __repr__(self) -> str:
        return f"TermId({str(self)!r})"


def is_curie(text: str) -> bool:
    return CURIE_RE.match(text) is not None
