# Validating annotation files before they are scored

import random
import tempfile
from pathlib import Path

from eqsim.annotations import is_clean, parse_annotation_tsv, rows_to_tsv, scaffold_workspace, validate
from eqsim.obo import load_obo, merge

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
ont = merge([load_obo(DATA / f) for f in ("anatomy.obo", "quality.obo", "spatial.obo")])
clean_file = DATA / "clean" / "pub1.tsv"

# %%
aset, _ = parse_annotation_tsv(clean_file.read_text(), clean_file.name, ont)
print(f"{len(aset)} states, {aset.eq_count()} EQs, findings: {validate(aset, ont)}")

# %%
# A few typical mistakes: an invented identifier, a label that does not match its id,
# an obsolete term, a stray parenthesis, and a relation slot filled with a class.
rows = [line.split("\t") for line in clean_file.read_text().splitlines()[1:]]
broken = [list(r) for r in rows[:5]]
broken[0][4] = broken[0][4].replace("UBERON:0011593", "UBERON:0099999")
broken[1][7] = "curved"
broken[2][4], broken[2][5] = "UBERON:0000000", "obsolete tooth part"
broken[3][5] = "(" + broken[3][5]
broken[4][4] = "BSPO:0000084 and UBERON:0000061 some UBERON:0002397"
broken[4][5] = "'posterior region' and 'anatomical structure' some 'maxilla'"
aset, _ = parse_annotation_tsv(rows_to_tsv(broken), "broken.tsv", ont)
findings = validate(aset, ont)
for f in findings:
    print(f"  {f.file}:{f.line} {f.code} {f.severity}: {f.message}")
print("clean?", is_clean(findings))

# %%
# A workspace for an annotator: one file per character, the ontologies, and a validator script.
with tempfile.TemporaryDirectory() as tmp:
    chars = Path(tmp) / "pub1_characters.tsv"
    chars.write_text("character_number\tcharacter_text\tstate_symbol\tstate_text\n"
                     + "".join(f"{r[0]}\t{r[1]}\t{r[2]}\t{r[3]}\n" for r in rows))
    manifest = scaffold_workspace([chars], None, [DATA / "anatomy.obo"], Path(tmp) / "ws")
    print(f"\nworkspace with {manifest['characters']} character files:")
    for entry in manifest["files"]:
        print("  ", entry["kind"], entry["path"], entry["sha256"][:12])

# %%
# How many random single-character typos in identifiers does the validator catch?
rng = random.Random(0)
tried = flagged = 0
for _ in range(200):
    r = list(rng.choice(rows))
    pos = rng.randrange(len(r[6]))
    typo = r[6][:pos] + rng.choice("0123456789") + r[6][pos + 1:]
    if typo == r[6]:
        continue
    r[6] = typo
    s, _ = parse_annotation_tsv(rows_to_tsv([r]), "typo.tsv", ont)
    tried += 1
    flagged += not is_clean(validate(s, ont))
print(f"\n{flagged}/{tried} quality-id typos flagged (one that lands on another real term is caught by the label check)")
