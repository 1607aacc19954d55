"""Ontology-based similarity of a test annotation set to a gold standard.

Each EQ is turned into a profile: the set of its named ancestors, tagged
with the role (``E`` for entity and related entity, ``Q`` for quality) they
came from. Per character state:

* partial precision (PP): mean over test EQs of the best SimJ against gold
* partial recall (PR): mean over gold EQs of the best SimJ against test
* SimJ: (PP + PR) / 2
* NIC: the same best-match average, with the normalized information
  content of the most informative shared ancestor in place of SimJ
"""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np

from .reasoner import ancestors_of

logger = logging.getLogger(__name__)

ENTITY = "E"
QUALITY = "Q"
METRICS = ("simj", "nic", "pp", "pr")
Z95 = 1.96


def profile(eq, store, registry, cache: Optional[dict] = None, keep_helpers: bool = False) -> frozenset:
    """Role-tagged ancestor set of one EQ annotation.

    The related entity, when present, is folded into the entity role.
    """
    if cache is not None:
        hit = cache.get(eq)
        if hit is not None:
            return hit
    entity = set(ancestors_of(store, eq.entity, registry, keep_helpers))
    if eq.related_entity is not None:
        entity |= ancestors_of(store, eq.related_entity, registry, keep_helpers)
    quality = ancestors_of(store, eq.quality, registry, keep_helpers)
    prof = frozenset([(ENTITY, t) for t in entity] + [(QUALITY, t) for t in quality])
    if cache is not None:
        cache[eq] = prof
    return prof


def simj(p1: frozenset, p2: frozenset) -> float:
    union = len(p1 | p2)
    if union == 0:
        return 0.0
    return len(p1 & p2) / union


@dataclass
class ICTable:
    nic: dict
    corpus_size: int
    degenerate: bool = False

    def __getitem__(self, tid) -> float:
        return self.nic.get(tid, 1.0)


def ic_from_profiles(profiles: Iterable[frozenset]) -> ICTable:
    """Normalized IC, ``ln(N / usage) / ln(N)``, from the gold EQ profiles."""
    usage: dict = {}
    n = 0
    for prof in profiles:
        n += 1
        for tid in {t for _, t in prof}:
            usage[tid] = usage.get(tid, 0) + 1
    if n == 0:
        raise ValueError("empty corpus")
    if n == 1:
        logger.warning("IC computed from a single annotation; every class in it gets NIC 0")
        return ICTable({t: 0.0 for t in usage}, 1, degenerate=True)
    log_n = math.log(n)
    return ICTable({t: math.log(n / max(u, 1)) / log_n for t, u in usage.items()}, n)


def build_ic_table(gold, store, registry, cache: Optional[dict] = None, keep_helpers: bool = False) -> ICTable:
    """IC table over every EQ of the gold annotation set (duplicates across states counted)."""
    return ic_from_profiles(
        profile(eq, store, registry, cache, keep_helpers) for key in gold.keys() for eq in gold.annotations[key]
    )


def nic_pair(p1: frozenset, p2: frozenset, ic: ICTable) -> float:
    shared = p1 & p2
    if not shared:
        return 0.0
    return max(ic[t] for _, t in shared)


@dataclass(frozen=True)
class StateScore:
    key: tuple
    simj: Optional[float]
    nic: Optional[float]
    pp: Optional[float]
    pr: Optional[float]

    def get(self, metric: str) -> Optional[float]:
        return getattr(self, metric)


def _best_match_mean(rows: list, cols: list, sim) -> float:
    return math.fsum(max(sim(r, c) for c in cols) for r in rows) / len(rows)


def score_profiles(key, test: list, gold: list, ic: ICTable) -> Optional[StateScore]:
    """Score one state from profile lists; ``None`` when the gold side is empty."""
    if not gold:
        return None
    if not test:
        return StateScore(key, 0.0, 0.0, None, 0.0)
    pp = _best_match_mean(test, gold, simj)
    pr = _best_match_mean(gold, test, simj)
    nic_p = _best_match_mean(test, gold, lambda a, b: nic_pair(a, b, ic))
    nic_r = _best_match_mean(gold, test, lambda a, b: nic_pair(a, b, ic))
    return StateScore(key, (pp + pr) / 2, (nic_p + nic_r) / 2, pp, pr)


def score_state(test, gold, store, registry, ic: ICTable, key=None, cache: Optional[dict] = None,
                keep_helpers: bool = False) -> Optional[StateScore]:
    """Score a test EQ set against a gold EQ set for one character state."""
    def profiles(eqs):
        return [profile(eq, store, registry, cache, keep_helpers) for eq in sorted(eqs, key=lambda eq: eq.sort_key)]

    return score_profiles(key, profiles(test), profiles(gold), ic)


def score_sets(test, gold, store, registry, ic: Optional[ICTable] = None, keep_helpers: bool = False) -> list:
    """Score every gold state; test-only states are skipped with a log line."""
    cache: dict = {}
    if ic is None:
        ic = build_ic_table(gold, store, registry, cache, keep_helpers)
    scores = []
    for key in sorted(set(gold.annotations) | set(test.annotations)):
        result = score_state(test.annotations.get(key, ()), gold.annotations.get(key, ()),
                             store, registry, ic, key, cache, keep_helpers)
        if result is None:
            logger.info("state %s annotated by %s but absent from gold; not scored", key, test.name or "test")
            continue
        scores.append(result)
    return scores


@dataclass(frozen=True)
class MetricSummary:
    metric: str
    mean: Optional[float]
    sd: Optional[float]
    ci95_low: Optional[float]
    ci95_high: Optional[float]
    n: int

    @property
    def empty(self) -> bool:
        return self.n == 0

    def to_dict(self) -> dict:
        return asdict(self)


def _bootstrap_ci(values: list, n_boot: int, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    arr = np.asarray(values)
    means = arr[rng.integers(0, len(arr), size=(n_boot, len(arr)))].mean(axis=1)
    lo, hi = np.percentile(means, [2.5, 97.5])
    return float(lo), float(hi)


def summarize(metric: str, values: list, ci: str = "normal", n_boot: int = 10000, seed: int = 0) -> MetricSummary:
    n = len(values)
    if n == 0:
        return MetricSummary(metric, None, None, None, None, 0)
    mean = math.fsum(values) / n
    sd = statistics.stdev(values) if n > 1 else 0.0
    if ci == "bootstrap" and n > 1:
        lo, hi = _bootstrap_ci(values, n_boot, seed)
    else:
        half = Z95 * sd / math.sqrt(n)
        lo, hi = mean - half, mean + half
    return MetricSummary(metric, mean, sd, lo, hi, n)


def in_range(key, restriction: Optional[tuple]) -> bool:
    return restriction is None or restriction[0] <= key[0] <= restriction[1]


def aggregate(scores: Iterable[StateScore], restriction: Optional[tuple] = None, ci: str = "normal",
              n_boot: int = 10000, seed: int = 0) -> dict:
    """Per-metric mean, sample SD and 95% CI over states, optionally limited to a character range."""
    kept = [s for s in scores if in_range(s.key, restriction)]
    return {
        m: summarize(m, [v for s in kept if (v := s.get(m)) is not None], ci, n_boot, seed)
        for m in METRICS
    }
