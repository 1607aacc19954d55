"""Score EQ phenotype annotations against a gold standard with ontology-based similarity."""

__version__ = "0.1.0"

from .manchester import parse_expression, print_expression
from .obo import Ontology, load_obo, lookup, merge, parse_obo, serialize_obo
from .terms import TermId

__all__ = [
    "Ontology",
    "TermId",
    "load_obo",
    "lookup",
    "merge",
    "parse_expression",
    "parse_obo",
    "print_expression",
    "serialize_obo",
]
