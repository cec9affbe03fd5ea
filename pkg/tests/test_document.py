import random
from decimal import Decimal

import pytest

from grid import ROWS, all_cells, baseline, cell, document_text
from phh.actions import NoOp, Policy
from phh.core import Money, Variant
from phh.diagnostics import DocumentError
from phh.document import (
    HandDocument, Style, check_lengths, check_optional_types, check_required_matrix, loads,
    parse_document, serialize_document,
)


def codes(diags):
    return [d.code for d in diags]


def test_golden_parses(golden_bytes):
    parsed = parse_document(golden_bytes)
    assert parsed.ok and parsed.diagnostics == []
    doc = parsed.document
    assert doc.variant is Variant.F2L3D
    assert doc.player_count == 4
    assert sum(not isinstance(a, NoOp) for a in doc.actions) == 26
    assert list(doc.players) == ["Bryce Yockey", "Phil Hui", "John Esposito", "Josh Arieh"]
    assert doc.city == "Las Vegas" and (doc.day, doc.month, doc.year) == (28, 6, 2019)
    assert doc.comments.action_trailing[4] == "Esposito"
    assert doc.actions[4].commentary is None


def test_missing_actions(golden_text):
    start = golden_text.index("actions = [")
    end = golden_text.index("]\n", start) + 2
    parsed = parse_document(golden_text[:start] + golden_text[end:])
    assert not parsed.ok
    assert [(d.code, d.location) for d in parsed.diagnostics if d.is_error] == [("MissingRequiredField", "actions")]


def test_user_field(golden_text):
    parsed = parse_document(golden_text + "_apm = 3\n")
    assert parsed.ok and parsed.diagnostics == []
    assert parsed.document.user_fields == {"_apm": 3}


def test_unknown_field_policy(golden_text):
    text = golden_text + "ante_trim = true\n"
    assert codes(parse_document(text, Policy.STRICT).diagnostics) == ["UnknownField"]
    lenient = parse_document(text, Policy.LENIENT)
    assert lenient.ok and not lenient.diagnostics[0].is_error


@pytest.mark.parametrize("data, code", [
    (b"\xff\xfe", "NotToml"),
    (b"variant = ", "NotToml"),
    (b"min_bet = 1e" + b"9" * 60, "NotToml"),
    (b"min_bet = 2.5e99999", "NotToml"),
    (b"[a]\nb = 1", "MissingRequiredField"),
    (b'variant = 1\nstarting_stacks = [1, 2]\nantes = [0, 0]\nactions = []', "WrongFieldType"),
    (b'variant = "XX"\nstarting_stacks = [1, 2]\nactions = []', "BadVariantCode"),
])
def test_error_codes(data, code):
    assert code in codes(parse_document(data).diagnostics)


def test_matrix_examples():
    nt = {"antes", "blinds_or_straddles", "min_bet", "starting_stacks", "actions"}
    assert check_required_matrix(Variant.NT, nt) == []
    diags = check_required_matrix(Variant.F7S, {"antes", "bring_in", "small_bet", "big_bet",
                                                "starting_stacks", "actions", "blinds_or_straddles"})
    assert [d.location for d in diags] == ["blinds_or_straddles"]
    golden = {"antes", "blinds_or_straddles", "small_bet", "big_bet", "starting_stacks", "actions"}
    assert check_required_matrix(Variant.F2L3D, golden) == []


@pytest.mark.parametrize("variant", list(ROWS))
def test_grid_baseline_is_clean(variant):
    parsed = parse_document(document_text(variant, baseline(variant)))
    assert parsed.ok and parsed.diagnostics == []


@pytest.mark.parametrize("variant, column", all_cells())
def test_grid_cell(variant, column):
    ok, detail = cell(variant, column)
    assert ok, detail


def test_lengths(golden_text):
    text = golden_text.replace("antes = [0, 0, 0, 0]", "antes = [0, 0, 0]")
    parsed = parse_document(text)
    assert ("LengthMismatch", "antes") in [(d.code, d.location) for d in parsed.diagnostics]
    assert check_lengths(parse_document(golden_text).document) == []


def test_optional_types(golden_text):
    assert check_optional_types(parse_document(golden_text).document) == []
    month = parse_document(golden_text.replace("month = 6", "month = 13"))
    assert month.ok
    assert [(d.code, d.is_error) for d in month.diagnostics] == [("BadCalendarField", False)]
    wrong = parse_document(golden_text.replace('city = "Las Vegas"', "city = 7"))
    assert "WrongFieldType" in codes(wrong.diagnostics)


def test_optional_field_values():
    text = document_text("NT", baseline("NT")) + (
        'time = 12:30:00\ntime_zone = "America/Los_Angeles"\ncurrency = "USD"\n'
        "ante_trimming_status = true\ntime_limit = 30\ntime_banks = [60, 60.5]\n"
        "seats = [1, 2]\nseat_count = 6\nfinishing_stacks = [100, 100]\n")
    parsed = parse_document(text)
    assert parsed.ok and parsed.diagnostics == []
    doc = parsed.document
    assert doc.time.hour == 12 and doc.ante_trimming_status is True
    assert doc.finishing_stacks == (Money.parse("100"), Money.parse("100"))


def test_canonical_round_trip(golden_bytes):
    doc = parse_document(golden_bytes).document
    out = serialize_document(doc, Style.CANONICAL)
    again = parse_document(out).document
    assert again == doc
    assert serialize_document(again, Style.CANONICAL) == out


def test_preserve_source(golden_bytes):
    doc = parse_document(golden_bytes).document
    assert serialize_document(doc, Style.PRESERVE_SOURCE) == golden_bytes


def test_float_antes_stay_floats():
    text = ('variant = "NT"\nantes = [0.0, 3.0]\nblinds_or_straddles = [1.0, 2.0]\nmin_bet = 2.0\n'
            "starting_stacks = [100.0, 100.0]\nactions = []\n")
    doc = loads(text)
    out = serialize_document(doc).decode()
    assert "antes = [0.0, 3.0]" in out
    assert loads(out).antes == doc.antes


def test_null_stacks():
    text = document_text("NT", baseline("NT")).replace("[100, 100]", "[100, null]")
    doc = loads(text)
    assert doc.starting_stacks == (Money.parse("100"), None)
    assert "null" in serialize_document(doc).decode()
    bad = parse_document(text.replace("antes = [0, 0]", "antes = [0, null]"))
    assert not bad.ok


def test_serialize_rejects_invalid():
    doc = HandDocument(variant=Variant.NT, starting_stacks=(Money.parse("1"), Money.parse("1")))
    with pytest.raises(DocumentError):
        serialize_document(doc)


def test_loads_raises():
    with pytest.raises(DocumentError) as info:
        loads("not toml ===")
    assert info.value.code == "NotToml"


def test_random_bytes_never_raise():
    rng = random.Random(7)
    seed = document_text("FT", baseline("FT")).encode()
    for _ in range(2000):
        data = bytearray(seed)
        for _ in range(rng.randint(1, 6)):
            data[rng.randrange(len(data))] = rng.randrange(256)
        parsed = parse_document(bytes(data))
        assert parsed.document is not None or parsed.diagnostics


def test_money_semantics_in_documents():
    a = loads(document_text("NT", baseline("NT")))
    b = loads(document_text("NT", baseline("NT")).replace("[100, 100]", "[100.0, 100.0]"))
    assert a != b
    assert [s.value for s in a.starting_stacks] == [s.value for s in b.starting_stacks] == [Decimal(100)] * 2
