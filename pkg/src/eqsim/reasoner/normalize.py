"""Structural normalization of EL axioms.

Every complex subexpression is given a fresh named class that is made
logically equivalent to it, so the saturation rules only ever see the five
normalized axiom shapes below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from ..manchester import ClassExpression, ExpressionError, Intersection, Named, SomeValuesFrom, conjoin
from ..obo import Ontology
from ..terms import TermId

DEFAULT_PREFIX = "EXP"


class SubNamed(NamedTuple):
    sub: TermId
    sup: TermId


class SubConj(NamedTuple):
    left: TermId
    right: TermId
    sup: TermId


class SubExists(NamedTuple):
    sub: TermId
    prop: TermId
    filler: TermId


class ExistsSub(NamedTuple):
    prop: TermId
    filler: TermId
    sup: TermId


class SubBottom(NamedTuple):
    left: TermId
    right: TermId


NormalizedAxiom = (SubNamed, SubConj, SubExists, ExistsSub, SubBottom)


class UnsupportedExpressionError(ExpressionError):
    pass


@dataclass(frozen=True)
class MaterializedClass:
    id: TermId
    source: ClassExpression


@dataclass
class Registry:
    """Materialized classes, one per distinct canonical expression."""

    prefix: str = DEFAULT_PREFIX
    by_expression: dict = field(default_factory=dict)
    by_id: dict = field(default_factory=dict)
    # non-obsolete named classes that take part in saturation
    classes: set = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.by_expression)

    def __iter__(self):
        for expr, tid in self.by_expression.items():
            yield MaterializedClass(tid, expr)

    def __contains__(self, expr) -> bool:
        return expr in self.by_expression

    def get(self, expr: ClassExpression) -> Optional[TermId]:
        return self.by_expression.get(expr)

    def is_materialized(self, tid: TermId) -> bool:
        return tid in self.by_id


class Normalizer:
    """Accumulates normalized axioms; reusable for incremental registration."""

    def __init__(self, registry: Optional[Registry] = None) -> None:
        self.registry = registry if registry is not None else Registry()
        self.axioms: list = []

    def take(self) -> list:
        out, self.axioms = self.axioms, []
        return out

    def name(self, expr: ClassExpression) -> TermId:
        if isinstance(expr, Named):
            return expr.id
        return self.materialize(expr)

    def materialize(self, expr: ClassExpression) -> TermId:
        if isinstance(expr, Named):
            raise ValueError("named classes are not materialized")
        reg = self.registry
        tid = reg.by_expression.get(expr)
        if tid is not None:
            return tid
        if isinstance(expr, SomeValuesFrom):
            filler = self.name(expr.filler)
            tid = self._fresh(expr)
            self.axioms.append(SubExists(tid, expr.property, filler))
            self.axioms.append(ExistsSub(expr.property, filler, tid))
        elif isinstance(expr, Intersection):
            ops = expr.operands
            names = [self.name(op) for op in ops]
            left = names[0] if len(ops) == 2 else self.materialize(conjoin(ops[:-1]))
            tid = self._fresh(expr)
            for n in names:
                self.axioms.append(SubNamed(tid, n))
            self.axioms.append(SubConj(left, names[-1], tid))
        else:
            raise UnsupportedExpressionError(f"unsupported construct {type(expr).__name__}")
        return tid

    def _fresh(self, expr: ClassExpression) -> TermId:
        reg = self.registry
        tid = TermId(reg.prefix, str(len(reg.by_expression) + 1))
        reg.by_expression[expr] = tid
        reg.by_id[tid] = expr
        return tid

    def subclass(self, sub: TermId, sup: ClassExpression) -> None:
        if isinstance(sup, Intersection):
            for op in sup.operands:
                self.subclass(sub, op)
        elif isinstance(sup, SomeValuesFrom):
            self.axioms.append(SubExists(sub, sup.property, self.name(sup.filler)))
        else:
            self.axioms.append(SubNamed(sub, sup.id))

    def equivalent(self, tid: TermId, expr: ClassExpression) -> None:
        self.subclass(tid, expr)
        if isinstance(expr, Named):
            self.axioms.append(SubNamed(expr.id, tid))
        else:
            self.axioms.append(SubNamed(self.materialize(expr), tid))

    def register(self, exprs: Iterable[ClassExpression]) -> None:
        for expr in sorted(set(exprs), key=lambda e: e.text):
            if not isinstance(expr, Named):
                self.materialize(expr)


def _free_prefix(ont: Ontology) -> str:
    used = {tid.prefix for tid in ont.classes} | {tid.prefix for tid in ont.properties}
    prefix = DEFAULT_PREFIX
    while prefix in used:
        prefix += "_"
    return prefix


def normalize(ont: Ontology, extra_expressions: Iterable[ClassExpression] = ()) -> tuple:
    """Return ``(axioms, registry)`` for the non-obsolete part of ``ont``.

    Superclass axioms are split directly; equivalences are split into both
    inclusion directions with complex sides materialized; each disjointness
    pair becomes a ``SubBottom``. ``extra_expressions`` (annotation
    expressions) are materialized too, so they get their own place in the
    hierarchy.
    """
    norm = Normalizer(Registry(prefix=_free_prefix(ont)))
    obsolete = {tid for tid, cls in ont.classes.items() if cls.obsolete}
    for tid in sorted(ont.classes):
        cls = ont.classes[tid]
        if cls.obsolete:
            continue
        norm.registry.classes.add(tid)
        for sup in cls.superclasses:
            norm.subclass(tid, sup)
        for eq in cls.equivalents:
            norm.equivalent(tid, eq)
        for other in cls.disjoint_with:
            if other not in obsolete:
                norm.axioms.append(SubBottom(tid, other))
    norm.register(extra_expressions)
    axioms = set(norm.take())
    return axioms, norm.registry
