"""Acceptance criteria, each checked at its stated tolerance.

A summary line per criterion is printed at the end of the pytest run.
"""

import contextlib
import json
import math
import random
import statistics
import time
from fractions import Fraction
from pathlib import Path

import pytest

from eqsim.annotations import EQAnnotation, load_annotation_dir, parse_annotation_tsv, rows_to_tsv, validate
from eqsim.manchester import LABEL_FORM, Named, parse_expression
from eqsim.metrics import (
    StateScore,
    aggregate,
    ic_from_profiles,
    nic_pair,
    profile,
    score_state,
    simj,
)
from eqsim.obo import load_obo, merge
from eqsim.reasoner import Reasoner, check_unsat, saturate
from eqsim.terms import TermId

from conftest import ACCEPTANCE_LINES, DATA
from generators import MUTATION_CODES, MetricWorld, mutate_row, random_el_ontology
from oracles import naive_closure

T = TermId.parse


@contextlib.contextmanager
def criterion(number: int, title: str):
    try:
        yield
    except pytest.skip.Exception as exc:
        ACCEPTANCE_LINES.append(f"criterion {number}: SKIP  {title} ({exc.msg})")
        raise
    except BaseException:
        ACCEPTANCE_LINES.append(f"criterion {number}: FAIL  {title}")
        raise
    ACCEPTANCE_LINES.append(f"criterion {number}: PASS  {title}")


# -- 1 ---------------------------------------------------------------------


def test_c1_reasoner_matches_oracle():
    with criterion(1, "saturation equals naive fixpoint on 1000 random EL ontologies, < 60 s"):
        rng = random.Random(1000)
        start = time.perf_counter()
        mismatches = transitive = hierarchical = 0
        for _ in range(1000):
            axioms, props, classes = random_el_ontology(rng, max_classes=60, max_props=4, max_axioms=200)
            assert len(classes) <= 60 and len(props) <= 4 and len(axioms) <= 200
            transitive += any(p.transitive for p in props.values())
            hierarchical += any(p.super_properties for p in props.values())
            store = saturate(axioms, props, classes)
            ancestors, unsat = naive_closure(axioms, props, classes)
            if dict(store.ancestors) != ancestors or store.unsat != unsat:
                mismatches += 1
        elapsed = time.perf_counter() - start
        assert mismatches == 0
        assert transitive > 300 and hierarchical > 300
        assert elapsed < 60, f"took {elapsed:.1f} s"


# -- 2 ---------------------------------------------------------------------


def test_c2_tooth_crown_example(tooth_ont):
    with criterion(2, "tooth-crown EQ profile contains UBERON:0003675 (E) and PATO:0002211 (Q); self simj = 1.0"):
        assert len(tooth_ont.classes) == 10
        entity = parse_expression("'tooth crown' and part_of some 'maxillary tooth'", tooth_ont, LABEL_FORM)
        assert entity == parse_expression("UBERON:0003675 and BFO:0000050 some UBERON:0011593")
        eq = EQAnnotation(entity, parse_expression("PATO:0002211"))
        reasoner = Reasoner(tooth_ont)
        reasoner.register(eq.expressions())
        prof = profile(eq, reasoner.store, reasoner.registry)
        assert ("E", T("UBERON:0003675")) in prof
        assert ("Q", T("PATO:0002211")) in prof
        # every UBERON ancestor of tooth crown is on the entity side
        assert {("E", t) for t in reasoner.store[T("UBERON:0003675")]} <= prof
        assert simj(prof, prof) == 1.0


# -- 3 ---------------------------------------------------------------------


WORLD_SEEDS = (1, 2, 3, 4, 5)


@pytest.fixture(scope="module")
def worlds():
    return [MetricWorld(seed) for seed in WORLD_SEEDS]


def _gold_ic(world, rng):
    eqs = rng.sample(world.pool, rng.randint(2, len(world.pool)))
    return ic_from_profiles(world.profile(eq) for eq in eqs), eqs


def test_c3_metric_properties(worlds):
    with criterion(3, "bounds, symmetry, duality, exact-match ceiling, monotonicity, NIC root-zero (>= 500 each)"):
        rng = random.Random(3)
        counts = dict.fromkeys(("bounds", "symmetry", "duality", "ceiling", "monotonicity", "root_zero"), 0)
        violations = []
        for i in range(600):
            w = worlds[i % len(worlds)]
            ic, _ = _gold_ic(w, rng)
            t, g = w.sample(1), w.sample(1)
            a = score_state(t, g, w.store, w.registry, ic, cache=w.cache)
            b = score_state(g, t, w.store, w.registry, ic, cache=w.cache)

            values = [a.simj, a.nic, a.pp, a.pr, b.simj, b.nic, b.pp, b.pr, *ic.nic.values()]
            if not all(0.0 <= v <= 1.0 for v in values):
                violations.append(("bounds", i))
            counts["bounds"] += 1

            p1, p2 = w.profile(next(iter(t))), w.profile(next(iter(g)))
            if simj(p1, p2) != simj(p2, p1) or a.simj != b.simj:
                violations.append(("symmetry", i))
            counts["symmetry"] += 1

            if a.pp != b.pr or a.pr != b.pp:
                violations.append(("duality", i))
            counts["duality"] += 1

            same = score_state(t, t, w.store, w.registry, ic, cache=w.cache)
            mica = [max(ic[x] for _, x in w.profile(eq)) for eq in sorted(t, key=lambda e: e.sort_key)]
            if (same.simj, same.pp, same.pr) != (1.0, 1.0, 1.0) or \
                    abs(same.nic - math.fsum(mica) / len(mica)) > 1e-12 or same.nic > 1.0:
                violations.append(("ceiling", i))
            counts["ceiling"] += 1

            # the gold EQ against two test EQs whose entities climb its ancestor chain
            gold = rng.choice(w.pool)
            own = w.registry.get(gold.entity) if not isinstance(gold.entity, Named) else gold.entity.id
            chain = sorted(t for t in w.store[own] if t != own and not w.registry.is_materialized(t))
            if chain:
                lower = rng.choice(chain)
                upper = rng.choice([c for c in sorted(w.store[lower]) if c != lower] or [lower])
                near = EQAnnotation(Named(lower), gold.quality, gold.related_entity)
                far = EQAnnotation(Named(upper), gold.quality, gold.related_entity)
                pg, pn, pf = w.profile(gold), w.profile(near), w.profile(far)
                sn = score_state({near}, {gold}, w.store, w.registry, ic, cache=w.cache)
                sf = score_state({far}, {gold}, w.store, w.registry, ic, cache=w.cache)
                if simj(pf, pg) > simj(pn, pg) or sf.simj > sn.simj or simj(pn, pg) > 1.0:
                    violations.append(("monotonicity", i))
                counts["monotonicity"] += 1

            roots = {T("E:0"), T("PATO:0")}
            if any(ic[r] != 0.0 for r in roots):
                violations.append(("root_zero", i))
            only_roots = [(x, y) for x in w.pool[:8] for y in w.pool[8:16]
                          if {tid for _, tid in w.profile(x) & w.profile(y)} <= roots]
            if any(nic_pair(w.profile(x), w.profile(y), ic) != 0.0 for x, y in only_roots):
                violations.append(("root_zero", i))
            counts["root_zero"] += 1

        assert violations == []
        assert min(counts.values()) >= 500, counts


# -- 4 ---------------------------------------------------------------------


def test_c4_validator_mutations(fixture_ont):
    with criterion(4, "50 single mutations per check V2-V5 give exactly one finding of that code; clean fixture clean"):
        clean = DATA / "clean" / "pub1.tsv"
        aset, _ = parse_annotation_tsv(clean.read_text(encoding="utf-8"), "pub1.tsv", fixture_ont)
        assert [f for f in validate(aset, fixture_ont) if f.severity == "error"] == []
        rows = [line.split("\t") for line in clean.read_text(encoding="utf-8").splitlines()[1:]]
        rng = random.Random(4)
        wrong = []
        for code in MUTATION_CODES:
            for n in range(50):
                i = rng.randrange(len(rows))
                mutated = rows[:i] + [mutate_row(rng, rows[i], code, fixture_ont)] + rows[i + 1:]
                s, _ = parse_annotation_tsv(rows_to_tsv(mutated), "m.tsv", fixture_ont)
                found = validate(s, fixture_ont)
                if [(f.code, f.line) for f in found] != [(code, i + 2)]:
                    wrong.append((code, n, "\t".join(mutated[i]), [f.code for f in found]))
        assert wrong == []


# -- 5 ---------------------------------------------------------------------


def _exact(values):
    """Mean, sample SD and normal CI computed with rational arithmetic."""
    fr = [Fraction(v) for v in values]
    n = len(fr)
    mean = sum(fr) / n
    var = sum((x - mean) ** 2 for x in fr) / (n - 1)
    sd = math.sqrt(var)
    half = 1.96 * sd / math.sqrt(n)
    return float(mean), sd, float(mean) - half, float(mean) + half


def test_c5_aggregation_arithmetic():
    with criterion(5, "mean/sd/CI on 3-element lists to 1e-12; exact restriction filtering"):
        # by hand: mean 0.5, deviations ±0.3 and 0, variance 0.18/2, sd 0.3
        summary = aggregate([StateScore((c, "0"), v, v, v, v) for c, v in ((1, 0.2), (2, 0.5), (3, 0.8))])
        s = summary["simj"]
        half = 1.96 * 0.3 / math.sqrt(3)
        for got, want in ((s.mean, 0.5), (s.sd, 0.3), (s.ci95_low, 0.5 - half), (s.ci95_high, 0.5 + half)):
            assert abs(got - want) < 1e-12
        assert s.n == 3

        rng = random.Random(5)
        for _ in range(200):
            values = [rng.random() for _ in range(3)]
            scores = [StateScore((c, "0"), v, v, None, v) for c, v in enumerate(values, 1)]
            got = aggregate(scores)["simj"]
            for a, b in zip((got.mean, got.sd, got.ci95_low, got.ci95_high), _exact(values)):
                assert abs(a - b) < 1e-12
            assert aggregate(scores)["pp"].empty

        keys = [(c, s) for c in range(1, 301) for s in "01" if rng.random() < 0.7]
        scores = [StateScore(k, rng.random(), rng.random(), rng.random(), rng.random()) for k in keys]
        kept = [x for x in scores if 51 <= x.key[0] <= 203]
        summary = aggregate(scores, (51, 203))
        assert summary["simj"].n == len(kept)
        assert summary["simj"].mean == math.fsum(x.simj for x in kept) / len(kept)
        assert summary["nic"].sd == statistics.stdev([x.nic for x in kept])
        assert aggregate(scores, (51, 51))["pr"].n == sum(1 for k in keys if k[0] == 51)


# -- 6 ---------------------------------------------------------------------


def _archive(request):
    root = Path(request.config.getoption("--gs-archive"))
    if not (root / "ontologies").is_dir() or not (root / "gold").is_dir():
        pytest.skip(f"gold-standard archive not present at {root}")
    return root


@pytest.mark.dataset
def test_c6_gold_standard_archive(request):
    with criterion(6, "archive: 203 characters / 463 states, 344 states in 51-203, 532 unsat classes"):
        root = _archive(request)
        obo_files = sorted((root / "ontologies").glob("*.obo"))
        columns = root / "columns.json"
        column_map = json.loads(columns.read_text(encoding="utf-8")) if columns.exists() else None
        ont = merge([load_obo(p) for p in obo_files])
        gold, _ = load_annotation_dir(root / "gold", None, column_map)
        assert len({k[0] for k in gold.keys()}) == 203
        assert len(gold.keys()) == 463
        assert len(gold.restricted(51, 203).keys()) == 344
        assert len(check_unsat(ont)) == 532


# -- 7 ---------------------------------------------------------------------


def test_c7_excluded():
    with criterion(7, "curator/agent similarity values"):
        pytest.skip("excluded: needs hosted model sessions and the original curator files")
