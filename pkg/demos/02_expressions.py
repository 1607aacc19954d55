# Post-composed class expressions in identifier and label form

from pathlib import Path

from eqsim.manchester import (
    LABEL_FORM,
    ExpressionError,
    parse_expression,
    print_expression,
)
from eqsim.obo import load_obo

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
ont = load_obo(DATA / "tooth.obo")

# %%
by_id = parse_expression("UBERON:0003675 and BFO:0000050 some UBERON:0011593")
by_label = parse_expression("'tooth crown' and part_of some 'maxillary tooth'", ont, LABEL_FORM)
print("same tree:", by_id == by_label)
print(by_id)

# %%
# Operands are kept in a canonical order, so writing them the other way round changes nothing.
swapped = parse_expression("BFO:0000050 some UBERON:0011593 and UBERON:0003675")
print("order-insensitive:", swapped == by_id)

# %%
# Printing back, in either form. Parentheses appear only where they are needed.
print("id form:   ", print_expression(by_id))
print("label form:", print_expression(by_id, LABEL_FORM, ont))
nested = parse_expression("UBERON:0003675 and BFO:0000050 some (UBERON:0011593 and BFO:0000050 some UBERON:0003672)")
print("nested:    ", print_expression(nested))

# %%
# Things outside the EL fragment, or malformed input, are rejected with a reason.
for text in ["UBERON:0003675 or UBERON:0011593", "(UBERON:0003675 and PATO:0002211", "'molar cusp'"]:
    try:
        parse_expression(text, ont, LABEL_FORM if text.startswith("'") else "id")
    except ExpressionError as exc:
        print(f"{text!r:40s} -> {type(exc).__name__}: {exc}")
