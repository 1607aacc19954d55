"""EL fragment of OWL Manchester syntax: ``and``, ``some`` and parentheses.

Expressions are held as immutable trees. Intersections are flattened,
deduplicated and sorted by their identifier-form text on construction, so
structurally equal expressions compare (and hash) equal.

Text comes in two flavours:

* identifier form, ``UBERON:0003675 and BFO:0000050 some UBERON:0011593``
* label form, ``'tooth crown' and part_of some 'maxillary tooth'``
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Iterator, Optional, Union

from .terms import TermId, is_curie

if TYPE_CHECKING:
    from .obo import Ontology

ID_FORM = "id"
LABEL_FORM = "label"

UNSUPPORTED_KEYWORDS = frozenset(
    {"or", "not", "only", "value", "min", "max", "exactly", "that", "inverse", "self", "xor"}
)
UNSUPPORTED_CHARS = frozenset("{}[],")


class ExpressionError(ValueError):
    """Base class for expression parsing and printing problems."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnbalancedParenthesesError(ExpressionSyntaxError):
    pass


class UnsupportedConstructError(ExpressionSyntaxError):
    def __init__(self, construct: str, position: int) -> None:
        super().__init__(f"unsupported construct {construct!r}", position)
        self.construct = construct


class ResolutionError(ExpressionError):
    def __init__(self, atom: str, reason: str = "unresolvable") -> None:
        super().__init__(f"{reason}: {atom!r}")
        self.atom = atom


# -- expression trees ------------------------------------------------------


@dataclass(frozen=True)
class Named:
    id: TermId

    @cached_property
    def text(self) -> str:
        return str(self.id)


@dataclass(frozen=True)
class SomeValuesFrom:
    property: TermId
    filler: ClassExpression

    @cached_property
    def text(self) -> str:
        return f"{self.property} some {_wrap_filler(self.filler, self.filler.text)}"


@dataclass(frozen=True)
class Intersection:
    operands: tuple

    def __post_init__(self) -> None:
        flat = _flatten(self.operands)
        if len(flat) < 2:
            raise ValueError("an intersection needs at least two distinct operands")
        object.__setattr__(self, "operands", flat)

    @cached_property
    def text(self) -> str:
        return " and ".join(op.text for op in self.operands)


ClassExpression = Union[Named, SomeValuesFrom, Intersection]


def _flatten(operands) -> tuple:
    seen = {}
    for op in operands:
        if isinstance(op, Intersection):
            for inner in op.operands:
                seen.setdefault(inner.text, inner)
        else:
            seen.setdefault(op.text, op)
    return tuple(seen[k] for k in sorted(seen))


def _wrap_filler(filler: ClassExpression, text: str) -> str:
    return f"({text})" if isinstance(filler, Intersection) else text


def conjoin(operands) -> ClassExpression:
    """Canonical intersection of ``operands``; a single distinct operand is returned as is."""
    flat = _flatten(operands)
    if not flat:
        raise ValueError("empty intersection")
    if len(flat) == 1:
        return flat[0]
    return Intersection(flat)


def canonical(expr: ClassExpression) -> ClassExpression:
    if isinstance(expr, Named):
        return expr
    if isinstance(expr, SomeValuesFrom):
        return SomeValuesFrom(expr.property, canonical(expr.filler))
    return conjoin(canonical(op) for op in expr.operands)


def signature(expr: ClassExpression) -> Iterator[tuple[str, TermId]]:
    """Yield ``("class", id)`` and ``("property", id)`` for every identifier in ``expr``."""
    if isinstance(expr, Named):
        yield "class", expr.id
    elif isinstance(expr, SomeValuesFrom):
        yield "property", expr.property
        yield from signature(expr.filler)
    else:
        for op in expr.operands:
            yield from signature(op)


def subexpressions(expr: ClassExpression) -> Iterator[ClassExpression]:
    yield expr
    if isinstance(expr, SomeValuesFrom):
        yield from subexpressions(expr.filler)
    elif isinstance(expr, Intersection):
        for op in expr.operands:
            yield from subexpressions(op)


# -- tokens and raw syntax trees ------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # "(" | ")" | "word" | "quoted"
    text: str
    pos: int


@dataclass(frozen=True)
class SynAtom:
    text: str
    quoted: bool
    pos: int


@dataclass(frozen=True)
class SynSome:
    prop: SynAtom
    filler: "Syntax"


@dataclass(frozen=True)
class SynAnd:
    operands: tuple


Syntax = Union[SynAtom, SynSome, SynAnd]

_WORD_BREAK = re.compile(r"[\s()']")


def check_parentheses(text: str) -> None:
    """Raise :class:`UnbalancedParenthesesError` unless parentheses outside quotes balance."""
    stack = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "'":
            end = _quote_end(text, i)
            if end < 0:
                raise ExpressionSyntaxError("unterminated quoted label", i)
            i = end + 1
            continue
        if c == "(":
            stack.append(i)
        elif c == ")":
            if not stack:
                raise UnbalancedParenthesesError("unbalanced parenthesis ')'", i)
            stack.pop()
        i += 1
    if stack:
        raise UnbalancedParenthesesError("unbalanced parenthesis '('", stack[-1])


def _quote_end(text: str, start: int) -> int:
    i = start + 1
    while i < len(text):
        if text[i] == "\\":
            i += 2
            continue
        if text[i] == "'":
            return i
        i += 1
    return -1


def tokenize(text: str) -> list[Token]:
    check_parentheses(text)
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            tokens.append(Token(c, c, i))
            i += 1
        elif c == "'":
            end = _quote_end(text, i)
            raw = text[i + 1 : end]
            tokens.append(Token("quoted", re.sub(r"\\(.)", r"\1", raw), i))
            i = end + 1
        else:
            m = _WORD_BREAK.search(text, i)
            end = m.start() if m else n
            word = text[i:end]
            for j, ch in enumerate(word):
                if ch in UNSUPPORTED_CHARS:
                    raise UnsupportedConstructError(ch, i + j)
            if word.lower() in UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstructError(word, i)
            tokens.append(Token("word", word, i))
            i = end
    return tokens


def _is_keyword(tok: Token, kw: str) -> bool:
    return tok.kind == "word" and tok.text == kw


class _Parser:
    def __init__(self, tokens: list[Token], length: int) -> None:
        self.tokens = tokens
        self.i = 0
        self.length = length

    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def parse(self) -> Syntax:
        if not self.tokens:
            raise ExpressionSyntaxError("empty expression", 0)
        tree = self.conj()
        tok = self.peek()
        if tok is not None:
            raise ExpressionSyntaxError(f"unexpected {tok.text!r}", tok.pos)
        return tree

    def conj(self) -> Syntax:
        ops = [self.prim()]
        while (tok := self.peek()) is not None and _is_keyword(tok, "and"):
            self.i += 1
            ops.append(self.prim())
        return ops[0] if len(ops) == 1 else SynAnd(tuple(ops))

    def prim(self) -> Syntax:
        tok = self.peek()
        if tok is None:
            raise ExpressionSyntaxError("unexpected end of expression", self.length)
        if tok.kind == "(":
            self.i += 1
            inner = self.conj()
            close = self.peek()
            if close is None or close.kind != ")":
                pos = close.pos if close else self.length
                raise ExpressionSyntaxError("expected ')'", pos)
            self.i += 1
            return inner
        if tok.kind == ")" or _is_keyword(tok, "and") or _is_keyword(tok, "some"):
            raise ExpressionSyntaxError(f"unexpected {tok.text!r}", tok.pos)
        self.i += 1
        atom = SynAtom(tok.text, tok.kind == "quoted", tok.pos)
        nxt = self.peek()
        if nxt is not None and _is_keyword(nxt, "some"):
            self.i += 1
            return SynSome(atom, self.prim())
        return atom


def parse_syntax(text: str, mode: str = ID_FORM) -> Syntax:
    """Parse ``text`` into an unresolved syntax tree.

    In label form a string with no quotes, parentheses or keywords is taken
    whole as one label, so plain ``tooth crown`` is accepted.
    """
    tokens = tokenize(text)
    if mode == LABEL_FORM and tokens and all(t.kind == "word" for t in tokens):
        if not any(t.text in ("and", "some") for t in tokens):
            return SynAtom(" ".join(text.split()), False, tokens[0].pos)
    return _Parser(tokens, len(text)).parse()


def syntax_atoms(tree: Syntax) -> Iterator[tuple[str, SynAtom]]:
    """Yield ``(position_kind, atom)`` in textual order; kind is ``class`` or ``property``."""
    if isinstance(tree, SynAtom):
        yield "class", tree
    elif isinstance(tree, SynSome):
        yield "property", tree.prop
        yield from syntax_atoms(tree.filler)
    else:
        for op in tree.operands:
            yield from syntax_atoms(op)


def same_shape(a: Syntax, b: Syntax) -> bool:
    if isinstance(a, SynAtom) or isinstance(b, SynAtom):
        return isinstance(a, SynAtom) and isinstance(b, SynAtom)
    if isinstance(a, SynSome):
        return isinstance(b, SynSome) and same_shape(a.filler, b.filler)
    return (
        isinstance(b, SynAnd)
        and len(a.operands) == len(b.operands)
        and all(same_shape(x, y) for x, y in zip(a.operands, b.operands))
    )


# -- resolution ------------------------------------------------------------


def normalize_label(text: str) -> str:
    return " ".join(text.split())


def _resolve_class(atom: SynAtom, mode: str, ont: Optional[Ontology]) -> TermId:
    if mode == ID_FORM:
        if not atom.quoted and is_curie(atom.text):
            return TermId.parse(atom.text)
        raise ResolutionError(atom.text, "not an identifier")
    if ont is None:
        raise ResolutionError(atom.text, "no ontology to resolve label")
    hits = ont.class_ids_for_label(atom.text)
    if not hits:
        raise ResolutionError(atom.text, "unknown label")
    if len(hits) > 1:
        raise ResolutionError(atom.text, "ambiguous label")
    return hits[0]


def _resolve_property(atom: SynAtom, mode: str, ont: Optional[Ontology]) -> TermId:
    if mode == ID_FORM and not atom.quoted and is_curie(atom.text):
        return TermId.parse(atom.text)
    if ont is not None:
        hits = ont.property_ids_for_name(atom.text)
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise ResolutionError(atom.text, "ambiguous property")
    raise ResolutionError(atom.text, "unknown property")


def resolve(tree: Syntax, mode: str = ID_FORM, ont: Optional[Ontology] = None) -> ClassExpression:
    if isinstance(tree, SynAtom):
        return Named(_resolve_class(tree, mode, ont))
    if isinstance(tree, SynSome):
        return SomeValuesFrom(_resolve_property(tree.prop, mode, ont), resolve(tree.filler, mode, ont))
    return conjoin(resolve(op, mode, ont) for op in tree.operands)


def parse_expression(text: str, ont: Optional[Ontology] = None, mode: str = ID_FORM) -> ClassExpression:
    """Parse Manchester text into a canonical :data:`ClassExpression`.

    ``some`` binds tighter than ``and``. In identifier form, CURIEs are taken
    at face value (checking that they exist is the validator's job); bare
    words are only accepted in property position, where they are looked up
    among the ontology's property names. In label form every atom is looked
    up by label.
    """
    if mode not in (ID_FORM, LABEL_FORM):
        raise ValueError(f"unknown mode {mode!r}")
    return resolve(parse_syntax(text, mode), mode, ont)


# -- printing --------------------------------------------------------------

_BARE_SAFE = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


def _quote(label: str) -> str:
    return "'" + label.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _class_label(tid: TermId, ont: Ontology) -> str:
    cls = ont.classes.get(tid)
    if cls is None or not cls.label:
        raise ExpressionError(f"no label for {tid}")
    return _quote(cls.label)


def _property_label(tid: TermId, ont: Ontology) -> str:
    prop = ont.properties.get(tid)
    if prop is None:
        raise ExpressionError(f"no label for property {tid}")
    for alias in prop.aliases:
        if _BARE_SAFE.match(alias) and alias not in ("and", "some"):
            return alias
    if not prop.label:
        raise ExpressionError(f"no label for property {tid}")
    return _quote(prop.label)


def print_expression(expr: ClassExpression, mode: str = ID_FORM, ont: Optional[Ontology] = None) -> str:
    """Render ``expr`` with the fewest parentheses that still parse back to it."""
    if mode == ID_FORM:
        return expr.text
    if ont is None:
        raise ExpressionError("label form needs an ontology")

    def render(e: ClassExpression) -> str:
        if isinstance(e, Named):
            return _class_label(e.id, ont)
        if isinstance(e, SomeValuesFrom):
            return f"{_property_label(e.property, ont)} some {_wrap_filler(e.filler, render(e.filler))}"
        return " and ".join(render(op) for op in e.operands)

    return render(expr)
