"""EL reasoning: normalization, saturation and the ancestor store."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Optional, Union

from ..manchester import ClassExpression
from ..obo import Ontology
from .normalize import (
    ExistsSub,
    MaterializedClass,
    Normalizer,
    Registry,
    SubBottom,
    SubConj,
    SubExists,
    SubNamed,
    UnsupportedExpressionError,
    normalize,
)
from .saturation import Saturator, axioms_key, saturate
from .store import AncestorStore, UnregisteredExpressionError, ancestors_of

logger = logging.getLogger(__name__)

__all__ = [
    "AncestorStore",
    "ExistsSub",
    "MaterializedClass",
    "Normalizer",
    "Reasoner",
    "Registry",
    "Saturator",
    "SubBottom",
    "SubConj",
    "SubExists",
    "SubNamed",
    "UnregisteredExpressionError",
    "UnsupportedExpressionError",
    "ancestors_of",
    "axioms_key",
    "check_unsat",
    "normalize",
    "saturate",
]


def check_unsat(ont: Ontology) -> set:
    """Named classes of ``ont`` entailed to be empty by its disjointness axioms."""
    axioms, registry = normalize(ont)
    store = saturate(axioms, ont.properties, registry.classes)
    return {tid for tid in store.unsat if not registry.is_materialized(tid)}


class Reasoner:
    """Saturated ontology that annotation expressions can be added to.

    The ontology is normalized and saturated once (optionally through a
    closure cache on disk); :meth:`register` then classifies further
    expressions incrementally.
    """

    def __init__(self, ont: Ontology, cache: Optional[Union[str, Path]] = None) -> None:
        self.ontology = ont
        axioms, registry = normalize(ont)
        self._normalizer = Normalizer(registry)
        self.key = axioms_key(axioms, ont.properties, registry.classes)
        engine = Saturator.load(cache, self.key) if cache else None
        if engine is None:
            engine = Saturator(ont.properties).add(sorted(axioms, key=_axiom_order), registry.classes).run()
            if cache:
                engine.save(cache, self.key)
                logger.info("wrote closure cache %s", cache)
        else:
            logger.info("loaded closure cache %s", cache)
        self.engine = engine
        self._store: Optional[AncestorStore] = None

    @property
    def registry(self) -> Registry:
        return self._normalizer.registry

    def register(self, exprs: Iterable[ClassExpression]) -> None:
        self._normalizer.register(exprs)
        new = self._normalizer.take()
        if new:
            self.engine.add(new).run()
            self._store = None

    @property
    def store(self) -> AncestorStore:
        if self._store is None:
            self._store = self.engine.view()
        return self._store

    def ancestors_of(self, expr: ClassExpression) -> frozenset:
        return ancestors_of(self.store, expr, self.registry)


def _axiom_order(ax) -> tuple:
    return (type(ax).__name__, *map(str, ax))
