"""Required-field grid, transcribed by hand and kept apart from the library's own table."""

from __future__ import annotations

from phh.actions import Policy
from phh.document import parse_document

COLUMNS = ["antes", "blinds_or_straddles", "bring_in", "small_bet", "big_bet", "min_bet",
           "starting_stacks", "actions"]

TABLE = """
FT     yes yes no  yes yes no  yes yes
NT     yes yes no  no  no  yes yes yes
NS     yes yes no  no  no  yes yes yes
PO     yes yes no  no  no  yes yes yes
FO/8   yes yes no  yes yes no  yes yes
F7S    yes no  yes yes yes no  yes yes
F7S/8  yes no  yes yes yes no  yes yes
FR     yes no  yes yes yes no  yes yes
N2L1D  yes yes no  no  no  yes yes yes
F2L3D  yes yes no  yes yes no  yes yes
FB     yes yes no  yes yes no  yes yes
"""

ROWS = {line.split()[0]: dict(zip(COLUMNS, (c == "yes" for c in line.split()[1:])))
        for line in TABLE.strip().splitlines()}

VALUES = {
    "antes": "antes = [0, 0]",
    "blinds_or_straddles": "blinds_or_straddles = [1, 2]",
    "bring_in": "bring_in = 1",
    "small_bet": "small_bet = 2",
    "big_bet": "big_bet = 4",
    "min_bet": "min_bet = 2",
    "starting_stacks": "starting_stacks = [100, 100]",
    "actions": "actions = []",
}


def document_text(variant: str, fields) -> str:
    return "\n".join([f'variant = "{variant}"'] + [VALUES[f] for f in COLUMNS if f in fields]) + "\n"


def baseline(variant: str) -> set:
    return {f for f, yes in ROWS[variant].items() if yes}


def cell(variant: str, column: str) -> tuple[bool, str]:
    """Run one grid cell and say whether the library behaved as the table demands."""
    fields = baseline(variant)
    if ROWS[variant][column]:
        fields.discard(column)
        diags = parse_document(document_text(variant, fields), Policy.STRICT).diagnostics
        ok = any(d.code == "MissingRequiredField" and d.location == column and d.is_error for d in diags)
        return ok, "omitted yes-field reported" if ok else f"omitting {column}: {diags}"
    fields.add(column)
    strict = parse_document(document_text(variant, fields), Policy.STRICT).diagnostics
    lenient = parse_document(document_text(variant, fields), Policy.LENIENT).diagnostics
    ok = (any(d.location == column and d.is_error for d in strict)
          and any(d.location == column and not d.is_error for d in lenient)
          and not any(d.is_error for d in lenient))
    return ok, "present no-field reported" if ok else f"adding {column}: {strict} / {lenient}"


def all_cells():
    return [(v, c) for v in ROWS for c in COLUMNS]
