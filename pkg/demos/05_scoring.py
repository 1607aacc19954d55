# Scoring a curator against a gold standard, per state and overall

import random
from pathlib import Path

from eqsim.annotations import AnnotationSet, load_annotation_dir
from eqsim.metrics import aggregate, score_sets
from eqsim.obo import load_obo, merge
from eqsim.reasoner import Reasoner

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
ont = merge([load_obo(DATA / f) for f in ("anatomy.obo", "quality.obo", "spatial.obo")])
gold, _ = load_annotation_dir(DATA / "clean", ont, name="gold")

# %%
# A simulated curator: drops some EQs and replaces some entities with a parent term.
rng = random.Random(7)
curator = AnnotationSet(name="curator")
for key in gold.keys():
    for eq in gold.annotations[key]:
        if rng.random() < 0.15:
            continue
        ent = eq.entity
        if hasattr(ent, "id") and rng.random() < 0.5:
            parents = [s for s in ont.classes[ent.id].superclasses if hasattr(s, "id")]
            if parents:
                ent = parents[0]
        curator.annotations.setdefault(key, set()).add(type(eq)(ent, eq.quality, eq.related_entity))

reasoner = Reasoner(ont)
reasoner.register(gold.expressions() | curator.expressions())
scores = score_sets(curator, gold, reasoner.store, reasoner.registry)

# %%
print(f"{'state':>8s} {'simj':>6s} {'nic':>6s} {'pp':>6s} {'pr':>6s}")
for s in scores:
    pp = "-" if s.pp is None else f"{s.pp:.3f}"
    print(f"{s.key[0]:>5d}/{s.key[1]:<2s} {s.simj:6.3f} {s.nic:6.3f} {pp:>6s} {s.pr:6.3f}")

# %%
# Means with a 95% interval, over all states and over characters 51 onwards.
for label, restriction in (("all", None), ("51-203", (51, 203))):
    summary = aggregate(scores, restriction)
    print(f"\n{label}:")
    for m, row in summary.items():
        print(f"  {m:5s} {row.mean:.3f}  [{row.ci95_low:.3f}, {row.ci95_high:.3f}]  n={row.n}")

# %%
# The same run from the command line:
#   eqsim score --ontology tests/data/anatomy.obo --ontology tests/data/quality.obo \
#       --ontology tests/data/spatial.obo --gold tests/data/clean --test my_curator/ --out scores/
#   eqsim report scores/summary.json --out report.csv
