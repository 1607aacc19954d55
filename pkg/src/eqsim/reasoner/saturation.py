"""Worklist saturation of normalized EL axioms.

One context per concept holds its derived subsumers and its outgoing and
incoming existential links. Axioms are indexed by the premise concept that
triggers them, so each derived fact only looks at the rules that can use it.
Saturation is monotone, which lets a saturated engine take more axioms later
(``add`` + ``run``) without starting over.
"""

from __future__ import annotations

import hashlib
import logging
import pickle
from collections import defaultdict, deque
from collections.abc import Mapping as _MappingABC
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from ..terms import TermId
from .normalize import ExistsSub, SubBottom, SubConj, SubExists, SubNamed
from .store import AncestorStore

logger = logging.getLogger(__name__)

_SUB = 0
_LINK = 1

CACHE_MAGIC = b"EQSIM-CLOSURE-2\n"


class _Index:
    """Normalized axioms keyed by the concept that triggers them."""

    def __init__(self) -> None:
        self.told = defaultdict(list)        # B -> [C]          B ⊑ C
        self.conj = defaultdict(list)        # B -> [(B2, C)]    B ⊓ B2 ⊑ C
        self.exists_right = defaultdict(list)  # B -> [(R, C)]   B ⊑ ∃R.C
        self.exists_left = defaultdict(list)   # B -> [(R, D)]   ∃R.B ⊑ D
        self.bottom = defaultdict(list)      # B -> [B2]         B ⊓ B2 ⊑ ⊥

    def keys(self) -> set:
        return (set(self.told) | set(self.conj) | set(self.exists_right)
                | set(self.exists_left) | set(self.bottom))

    def absorb(self, other: _Index) -> None:
        for name in ("told", "conj", "exists_right", "exists_left", "bottom"):
            mine = getattr(self, name)
            for k, v in getattr(other, name).items():
                mine[k].extend(v)


class Saturator:
    """Incremental EL saturation engine.

    ``properties`` maps property ids to objects with ``transitive`` and
    ``super_properties`` attributes (:class:`eqsim.obo.PropertyInfo`).
    """

    def __init__(self, properties: Optional[Mapping] = None) -> None:
        self.ids: list = []
        self.index_of: dict = {}
        self.subsumers: list = []
        self.succ: list = []   # A -> {R: {C}}  for A ⊑ ∃R.C
        self.pred: list = []   # C -> {R: {A}}
        self.unsat: set = set()
        self.idx = _Index()
        self.role_ids: dict = {}
        self.role_supers: list = []
        self.transitive: set = set()
        # roles named in some ∃R.B ⊑ D, and roles with such a super-role; links over
        # other roles cannot yield subsumptions and are kept only for ⊥ propagation
        self.neg_roles: set = set()
        self.needed: set = set()
        self._queue: deque = deque()
        self._axiom_set: set = set()
        self._set_properties(properties or {})

    # -- setup -------------------------------------------------------------

    def _set_properties(self, properties: Mapping) -> None:
        for pid in sorted(properties):
            self._role(pid)
        for pid, info in properties.items():
            if info.transitive:
                self.transitive.add(self._role(pid))
        direct = defaultdict(set)
        for pid, info in properties.items():
            for sup in info.super_properties:
                direct[self._role(pid)].add(self._role(sup))
        self._direct_supers = direct
        self._close_roles()

    def _role(self, pid: TermId) -> int:
        r = self.role_ids.get(pid)
        if r is None:
            r = self.role_ids[pid] = len(self.role_ids)
        return r

    def _close_roles(self) -> None:
        n = len(self.role_ids)
        supers = []
        for r in range(n):
            seen = {r}
            stack = [r]
            while stack:
                for s in self._direct_supers.get(stack.pop(), ()):
                    if s not in seen:
                        seen.add(s)
                        stack.append(s)
            supers.append(sorted(seen))
        self.role_supers = supers

    def _concept(self, tid: TermId) -> int:
        c = self.index_of.get(tid)
        if c is None:
            c = self.index_of[tid] = len(self.ids)
            self.ids.append(tid)
            self.subsumers.append({c})
            self.succ.append({})
            self.pred.append({})
            self._queue.append((_SUB, c, c))
        return c

    def add(self, axioms: Iterable, classes: Iterable[TermId] = ()) -> Saturator:
        """Register axioms (and axiom-free classes); call :meth:`run` to saturate."""
        for tid in classes:
            self._concept(tid)
        delta = _Index()
        fresh_roles = False
        existing = len(self.ids)
        for ax in axioms:
            if ax in self._axiom_set:
                continue
            self._axiom_set.add(ax)
            t = type(ax)
            if t is SubNamed:
                delta.told[self._concept(ax.sub)].append(self._concept(ax.sup))
            elif t is SubConj:
                a, b, c = self._concept(ax.left), self._concept(ax.right), self._concept(ax.sup)
                delta.conj[a].append((b, c))
                if a != b:
                    delta.conj[b].append((a, c))
            elif t is SubExists:
                n_roles = len(self.role_ids)
                r = self._role(ax.prop)
                fresh_roles |= r >= n_roles
                delta.exists_right[self._concept(ax.sub)].append((r, self._concept(ax.filler)))
            elif t is ExistsSub:
                n_roles = len(self.role_ids)
                r = self._role(ax.prop)
                fresh_roles |= r >= n_roles
                delta.exists_left[self._concept(ax.filler)].append((r, self._concept(ax.sup)))
            elif t is SubBottom:
                a, b = self._concept(ax.left), self._concept(ax.right)
                delta.bottom[a].append(b)
                if a != b:
                    delta.bottom[b].append(a)
            else:
                raise TypeError(f"not a normalized axiom: {ax!r}")
        if fresh_roles:
            self._close_roles()
        for pairs in delta.exists_left.values():
            self.neg_roles.update(r for r, _ in pairs)
        self._update_needed()
        keys = delta.keys()
        if keys:
            # re-fire the new axioms on facts derived before they arrived
            for a in range(existing):
                hits = keys.intersection(self.subsumers[a])
                for b in hits:
                    self._fire_sub(a, b, delta)
        self.idx.absorb(delta)
        return self

    def _update_needed(self) -> None:
        needed = {r for r, sups in enumerate(self.role_supers) if not self.neg_roles.isdisjoint(sups)}
        fresh = needed - self.needed
        self.needed = needed
        # transitive links skipped while their role was irrelevant get composed now
        for r in fresh & self.transitive:
            for a, out in enumerate(self.succ):
                for c in tuple(out.get(r, ())):
                    for x in tuple(self.succ[c].get(r, ())):
                        self._queue.append((_LINK, a, r, x))

    # -- saturation --------------------------------------------------------

    def _push_sub(self, a: int, b: int) -> None:
        s = self.subsumers[a]
        if b not in s:
            s.add(b)
            self._queue.append((_SUB, a, b))

    def _fire_sub(self, a: int, b: int, idx: _Index) -> None:
        s = self.subsumers[a]
        for c in idx.told.get(b, ()):
            self._push_sub(a, c)
        for b2, c in idx.conj.get(b, ()):
            if b2 in s:
                self._push_sub(a, c)
        for r, c in idx.exists_right.get(b, ()):
            self._queue.append((_LINK, a, r, c))
        preds = self.pred[a]
        if preds:
            for r, d in idx.exists_left.get(b, ()):
                for a2 in tuple(preds.get(r, ())):
                    self._push_sub(a2, d)
        for b2 in idx.bottom.get(b, ()):
            if b2 in s:
                self._mark_unsat(a)

    def _add_link(self, a: int, r: int, c: int) -> None:
        out = self.succ[a].setdefault(r, set())
        if c in out:
            return
        out.add(c)
        self.pred[c].setdefault(r, set()).add(a)
        if c in self.unsat:
            self._mark_unsat(a)
        if r not in self.needed:
            return
        if r in self.neg_roles:
            exists_left = self.idx.exists_left
            for b in tuple(self.subsumers[c]):
                for r2, d in exists_left.get(b, ()):
                    if r2 == r:
                        self._push_sub(a, d)
        if r in self.transitive:
            for x in tuple(self.succ[c].get(r, ())):
                self._queue.append((_LINK, a, r, x))
            for y in tuple(self.pred[a].get(r, ())):
                self._queue.append((_LINK, y, r, c))

    def _mark_unsat(self, a: int) -> None:
        stack = [a]
        while stack:
            x = stack.pop()
            if x in self.unsat:
                continue
            self.unsat.add(x)
            for sources in self.pred[x].values():
                stack.extend(y for y in sources if y not in self.unsat)

    def run(self) -> Saturator:
        queue = self._queue
        idx = self.idx
        supers = self.role_supers
        while queue:
            item = queue.popleft()
            if item[0] == _SUB:
                self._fire_sub(item[1], item[2], idx)
            else:
                _, a, r, c = item
                for r2 in supers[r]:
                    self._add_link(a, r2, c)
        return self

    # -- results -----------------------------------------------------------

    def store(self) -> AncestorStore:
        ids = self.ids
        ancestors = {ids[a]: frozenset(ids[b] for b in s) for a, s in enumerate(self.subsumers)}
        return AncestorStore(ancestors, frozenset(ids[a] for a in self.unsat))

    def view(self) -> AncestorStore:
        """A store that converts each ancestor set on access instead of all at once."""
        return AncestorStore(_LazyAncestors(self), frozenset(self.ids[a] for a in self.unsat))

    def ancestors(self, tid: TermId) -> frozenset:
        ids = self.ids
        return frozenset(ids[b] for b in self.subsumers[self.index_of[tid]])

    def is_unsat(self, tid: TermId) -> bool:
        return self.index_of[tid] in self.unsat

    def __contains__(self, tid: TermId) -> bool:
        return tid in self.index_of

    # -- closure cache -----------------------------------------------------

    def save(self, path: Union[str, Path], key: str) -> None:
        if self._queue:
            raise RuntimeError("saturate before saving")
        state = {k: v for k, v in self.__dict__.items() if k != "_queue"}
        with open(path, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(key.encode("ascii") + b"\n")
            pickle.dump(state, fh, protocol=pickle.HIGHEST_PROTOCOL)

    @classmethod
    def load(cls, path: Union[str, Path], key: str) -> Optional[Saturator]:
        """Load a saved engine, or ``None`` if the file is missing or for other input."""
        try:
            with open(path, "rb") as fh:
                if fh.readline() != CACHE_MAGIC:
                    return None
                if fh.readline().rstrip(b"\n").decode("ascii", "replace") != key:
                    logger.info("closure cache %s is stale", path)
                    return None
                state = pickle.load(fh)
        except FileNotFoundError:
            return None
        engine = cls.__new__(cls)
        engine.__dict__.update(state)
        engine._queue = deque()
        return engine


class _LazyAncestors(_MappingABC):
    def __init__(self, engine: Saturator) -> None:
        self._engine = engine
        self._cache: dict = {}

    def __getitem__(self, tid: TermId) -> frozenset:
        found = self._cache.get(tid)
        if found is None:
            if tid not in self._engine.index_of:
                raise KeyError(tid)
            found = self._cache[tid] = self._engine.ancestors(tid)
        return found

    def __contains__(self, tid) -> bool:
        return tid in self._engine.index_of

    def __iter__(self):
        return iter(list(self._engine.ids))

    def __len__(self) -> int:
        return len(self._engine.ids)


def axioms_key(axioms: Iterable, properties: Mapping, classes: Iterable[TermId] = ()) -> str:
    """Content hash of a saturation input, used to validate closure caches."""
    h = hashlib.sha256()
    for line in sorted(f"{type(ax).__name__}\t" + "\t".join(map(str, ax)) for ax in axioms):
        h.update(line.encode())
        h.update(b"\n")
    for pid in sorted(properties):
        info = properties[pid]
        sups = ",".join(sorted(map(str, info.super_properties)))
        h.update(f"P\t{pid}\t{int(info.transitive)}\t{sups}\n".encode())
    for tid in sorted(classes):
        h.update(f"C\t{tid}\n".encode())
    return h.hexdigest()


def saturate(axioms: Iterable, properties: Optional[Mapping] = None, classes: Iterable[TermId] = ()) -> AncestorStore:
    """Saturate ``axioms`` and return the reflexive ancestor closure."""
    return Saturator(properties).add(axioms, classes).run().store()
