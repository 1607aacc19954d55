# Merging OBO files and finding classes made empty by disjointness
#
# Run from the repository root:  python demos/01_merge_and_unsat.py

from pathlib import Path

from eqsim.obo import load_obo, merge, serialize_obo
from eqsim.reasoner import check_unsat

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

# %%
# Three small fixture files: anatomy, qualities and spatial terms.
files = [DATA / "anatomy.obo", DATA / "quality.obo", DATA / "spatial.obo"]
parts = [load_obo(f) for f in files]
for f, ont in zip(files, parts):
    print(f"{f.name:14s} {len(ont):3d} classes  {len(ont.properties)} relations  unknown tags: {dict(ont.unknown_tags)}")

# %%
# The anatomy file says part_of without an xref; spatial.obo declares it as BFO:0000050.
# merge() folds the shorthand into the CURIE and logs it.
log = []
merged = merge(parts, log=log)
print("\nmerged:", len(merged), "classes")
for entry in log:
    print("  log:", entry)

# %%
# 'irregular bone' is declared both a bone and a cartilage element, which are disjoint.
unsat = check_unsat(merged)
print("\nunsatisfiable:", sorted(map(str, unsat)))
for tid in sorted(unsat):
    print("  ", tid, merged.classes[tid].label)

# %%
# Stripping disjointness removes the clash; every other axiom stays.
log = []
stripped = merge(parts, strip_disjoints=True, log=log)
print("\nafter stripping:", log[-1], "-> unsat:", sorted(check_unsat(stripped)))

# %%
# Serialized output parses back to the same ontology.
text = serialize_obo(stripped)
print("\nfirst lines of the merged file:")
print("\n".join(text.splitlines()[:12]))
