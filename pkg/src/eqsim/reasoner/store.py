"""The in-memory ancestor store produced by saturation."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import IO, Mapping

from ..manchester import ClassExpression, ExpressionError, Named
from ..terms import TermId


class UnregisteredExpressionError(ExpressionError):
    pass


@dataclass(frozen=True)
class AncestorStore:
    ancestors: Mapping
    unsat: frozenset = frozenset()

    def __post_init__(self) -> None:
        if isinstance(self.ancestors, dict):
            object.__setattr__(self, "ancestors", MappingProxyType(self.ancestors))

    def __contains__(self, tid: TermId) -> bool:
        return tid in self.ancestors

    def __getitem__(self, tid: TermId) -> frozenset:
        return self.ancestors[tid]

    def __len__(self) -> int:
        return len(self.ancestors)

    def pairs(self):
        for tid in sorted(self.ancestors):
            for anc in sorted(self.ancestors[tid]):
                yield tid, anc

    def write_tsv(self, fh: IO[str], key: str = "") -> None:
        """Line-oriented dump: a ``#key`` header, ``class<TAB>ancestor`` lines, ``#unsat`` lines."""
        fh.write(f"#key\t{key}\n")
        for tid, anc in self.pairs():
            fh.write(f"{tid}\t{anc}\n")
        for tid in sorted(self.unsat):
            fh.write(f"#unsat\t{tid}\n")

    @classmethod
    def read_tsv(cls, fh: IO[str], key: str = "") -> "AncestorStore | None":
        first = fh.readline().rstrip("\n").split("\t")
        if first[0] != "#key" or (first[1] if len(first) > 1 else "") != key:
            return None
        ancestors: dict = {}
        unsat = set()
        for line in fh:
            a, b = line.rstrip("\n").split("\t")
            if a == "#unsat":
                unsat.add(TermId.parse(b))
            else:
                ancestors.setdefault(TermId.parse(a), set()).add(TermId.parse(b))
        return cls({k: frozenset(v) for k, v in ancestors.items()}, frozenset(unsat))


def ancestors_of(store: AncestorStore, expr: ClassExpression, registry, keep_helpers: bool = False) -> frozenset:
    """Named ancestors of ``expr``.

    Helper classes introduced by normalization are dropped unless
    ``keep_helpers``; the expression's own materialized class is always kept
    so that an expression compared with itself still matches exactly.
    """
    if isinstance(expr, Named):
        own = expr.id
    else:
        own = registry.get(expr)
        if own is None:
            raise UnregisteredExpressionError(f"unregistered expression: {expr.text}")
    if own not in store:
        raise UnregisteredExpressionError(f"unregistered expression: {expr.text}")
    found = store[own]
    if keep_helpers:
        return found
    return frozenset(t for t in found if t == own or not registry.is_materialized(t))
