"""Hand history documents: reading, validation and canonical output."""

from __future__ import annotations

import datetime
import enum
import re
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Any, NamedTuple, Optional, Union

from phh import _toml
from phh.actions import ActionRecord, Policy, parse_action, semantic_action, serialize_action
from phh.core import Money, Variant
from phh.diagnostics import Diagnostic, DocumentError, Severity, error, has_errors, warning

REQUIRED_FIELDS = (
    "variant", "antes", "blinds_or_straddles", "bring_in", "small_bet", "big_bet",
    "min_bet", "starting_stacks", "actions",
)

#: The eight columns of the required-field matrix, in table order.
MATRIX_FIELDS = REQUIRED_FIELDS[1:]

_Y, _N = True, False
_MATRIX_ROWS = {
    #                antes blinds bring small big  min  stacks actions
    Variant.FT:     (_Y, _Y, _N, _Y, _Y, _N, _Y, _Y),
    Variant.NT:     (_Y, _Y, _N, _N, _N, _Y, _Y, _Y),
    Variant.NS:     (_Y, _Y, _N, _N, _N, _Y, _Y, _Y),
    Variant.PO:     (_Y, _Y, _N, _N, _N, _Y, _Y, _Y),
    Variant.FO8:    (_Y, _Y, _N, _Y, _Y, _N, _Y, _Y),
    Variant.F7S:    (_Y, _N, _Y, _Y, _Y, _N, _Y, _Y),
    Variant.F7S8:   (_Y, _N, _Y, _Y, _Y, _N, _Y, _Y),
    Variant.FR:     (_Y, _N, _Y, _Y, _Y, _N, _Y, _Y),
    Variant.N2L1D:  (_Y, _Y, _N, _N, _N, _Y, _Y, _Y),
    Variant.F2L3D:  (_Y, _Y, _N, _Y, _Y, _N, _Y, _Y),
    Variant.FB:     (_Y, _Y, _N, _Y, _Y, _N, _Y, _Y),
}

#: variant -> frozenset of fields that must be present
REQUIRED_MATRIX = {
    variant: frozenset(name for name, yes in zip(MATRIX_FIELDS, row) if yes)
    for variant, row in _MATRIX_ROWS.items()
}

OPTIONAL_FIELDS = {
    "author": "string",
    "event": "string",
    "url": "string",
    "address": "string",
    "city": "string",
    "region": "string",
    "postal_code": "string",
    "country": "string",
    "time": "local_time",
    "time_zone": "string",
    "day": "integer",
    "month": "integer",
    "year": "integer",
    "hand": "integer",
    "level": "integer",
    "seats": "integers",
    "seat_count": "integer",
    "table": "integer",
    "players": "strings",
    "finishing_stacks": "amounts",
    "currency": "string",
    "ante_trimming_status": "boolean",
    "time_limit": "number",
    "time_banks": "numbers",
}

PER_PLAYER_FIELDS = ("antes", "blinds_or_straddles", "seats", "players", "finishing_stacks", "time_banks")

_MONEY_FIELDS = ("bring_in", "small_bet", "big_bet", "min_bet")


class Style(str, enum.Enum):
    CANONICAL = "canonical"
    PRESERVE_SOURCE = "preserve-source"


@dataclass(eq=False)
class HandDocument:
    variant: Union[Variant, str]
    starting_stacks: tuple[Optional[Money], ...]
    antes: Optional[tuple[Money, ...]] = None
    blinds_or_straddles: Optional[tuple[Money, ...]] = None
    bring_in: Optional[Money] = None
    small_bet: Optional[Money] = None
    big_bet: Optional[Money] = None
    min_bet: Optional[Money] = None
    actions: tuple[ActionRecord, ...] = ()
    author: Any = None
    event: Any = None
    url: Any = None
    address: Any = None
    city: Any = None
    region: Any = None
    postal_code: Any = None
    country: Any = None
    time: Any = None
    time_zone: Any = None
    day: Any = None
    month: Any = None
    year: Any = None
    hand: Any = None
    level: Any = None
    seats: Any = None
    seat_count: Any = None
    table: Any = None
    players: Any = None
    finishing_stacks: Any = None
    currency: Any = None
    ante_trimming_status: Any = None
    time_limit: Any = None
    time_banks: Any = None
    user_fields: dict[str, Any] = field(default_factory=dict)
    unknown_fields: dict[str, Any] = field(default_factory=dict)
    comments: _toml.Comments = field(default_factory=_toml.Comments)
    #: whether ``actions`` was present in the file (it may be an empty array)
    has_actions: bool = True
    source: Optional[str] = field(default=None, repr=False)

    @property
    def player_count(self) -> int:
        return len(self.starting_stacks)

    @property
    def known_variant(self) -> Optional[Variant]:
        return self.variant if isinstance(self.variant, Variant) else None

    def present_fields(self) -> set[str]:
        present = {"variant"} if self.variant is not None else set()
        for name in MATRIX_FIELDS:
            if name == "actions":
                if self.has_actions:
                    present.add(name)
            elif getattr(self, name) is not None:
                present.add(name)
        return present

    def action_texts(self) -> list[str]:
        return [serialize_action(a) for a in self.actions]

    def semantic_key(self) -> tuple:
        parts: list[Any] = [_semantic(self.variant)]
        for name in MATRIX_FIELDS:
            if name == "actions":
                parts.append((self.has_actions, tuple(semantic_action(a) for a in self.actions)))
            else:
                parts.append(_semantic(getattr(self, name)))
        for name in OPTIONAL_FIELDS:
            parts.append(_semantic(getattr(self, name)))
        parts.append(_semantic(self.user_fields))
        parts.append(_semantic(self.unknown_fields))
        parts.append(self.comments.semantic())
        return tuple(parts)

    def __eq__(self, other):
        if not isinstance(other, HandDocument):
            return NotImplemented
        return self.semantic_key() == other.semantic_key()

    __hash__ = None


def _semantic(value: Any) -> Any:
    if isinstance(value, Money):
        return ("money",) + value.semantic()
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, int):
        return ("int", value)
    if isinstance(value, Decimal):
        return ("float", value)
    if isinstance(value, enum.Enum):
        return ("enum", value.value)
    if isinstance(value, (list, tuple)):
        return ("list", tuple(_semantic(v) for v in value))
    if isinstance(value, dict):
        return ("table", tuple(sorted((k, _semantic(v)) for k, v in value.items())))
    return (type(value).__name__, value)


class Parsed(NamedTuple):
    document: Optional[HandDocument]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.document is not None and not has_errors(self.diagnostics)


# --- value conversion ----------------------------------------------------

def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return _is_int(value) or (isinstance(value, Decimal) and value.is_finite())


class _Converter:
    def __init__(self, policy: Policy):
        self.policy = policy
        self.diagnostics: list[Diagnostic] = []

    def err(self, code: str, location, message: str) -> None:
        self.diagnostics.append(error(code, location, message))

    def policy_diag(self, code: str, location, message: str) -> None:
        make = error if self.policy is Policy.STRICT else warning
        self.diagnostics.append(make(code, location, message))

    def amount(self, name: str, value: Any, *, allow_null: bool = False, positive: bool = False):
        if value is None and allow_null:
            return None
        if not _is_number(value):
            self.err("WrongFieldType", name, f"{name} must be an integer or float, got {_type_name(value)}")
            return _INVALID
        money = Money.of(value)
        if money.value < 0 or (positive and money.value == 0):
            what = "positive" if positive else "non-negative"
            self.err("BadAmount", name, f"{name} must be {what}, got {money}")
            return _INVALID
        return money

    def amounts(self, name: str, value: Any, *, allow_null: bool = False, positive: bool = False):
        if not isinstance(value, list):
            self.err("WrongFieldType", name, f"{name} must be an array, got {_type_name(value)}")
            return _INVALID
        out = []
        for item in value:
            money = self.amount(name, item, allow_null=allow_null, positive=positive)
            if money is _INVALID:
                return _INVALID
            out.append(money)
        return tuple(out)


_INVALID = object()


def _type_name(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if _is_int(value):
        return "integer"
    if isinstance(value, Decimal):
        return "float"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    if isinstance(value, dict):
        return "table"
    if isinstance(value, datetime.datetime):
        return "datetime"
    if isinstance(value, datetime.date):
        return "date"
    if isinstance(value, datetime.time):
        return "time"
    return type(value).__name__


def _reject_nulls(value: Any, name: str, conv: _Converter) -> bool:
    if value is None:
        conv.err("WrongFieldType", name, f"null is only allowed inside starting_stacks")
        return True
    if isinstance(value, list):
        return any(_reject_nulls(v, name, conv) for v in value)
    if isinstance(value, dict):
        return any(_reject_nulls(v, name, conv) for v in value.values())
    return False


def parse_document(data: Union[bytes, str], policy: Policy = Policy.STRICT) -> Parsed:
    """Read a hand history file.

    Never raises on bad content: problems come back as diagnostics, and the
    document is ``None`` only when nothing usable could be recovered (not
    TOML, or no usable ``variant``/``starting_stacks``).
    """
    policy = Policy(policy)
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            return Parsed(None, [error("NotToml", None, f"not UTF-8: {exc}")])
    else:
        text = data
    try:
        raw, comments = _toml.loads_with_comments(text)
    except (_toml.TOMLDecodeError, ValueError, RecursionError) as exc:
        return Parsed(None, [error("NotToml", None, f"not a TOML document: {exc}")])

    conv = _Converter(policy)
    diags = conv.diagnostics
    maybe_null = "null" in text
    values: dict[str, Any] = {}

    for key, value in raw.items():
        if key.startswith("_"):
            continue
        if key not in REQUIRED_FIELDS and key not in OPTIONAL_FIELDS:
            conv.policy_diag("UnknownField", key, f"unknown field {key!r}")
            continue
        if maybe_null and key != "starting_stacks" and _reject_nulls(value, key, conv):
            continue
        values[key] = value

    variant: Union[Variant, str, None] = None
    if "variant" not in raw:
        conv.err("MissingRequiredField", "variant", "missing required field 'variant'")
    elif not isinstance(raw["variant"], str):
        conv.err("WrongFieldType", "variant", f"variant must be a string, got {_type_name(raw['variant'])}")
    else:
        try:
            variant = Variant(raw["variant"])
        except ValueError:
            conv.policy_diag("BadVariantCode", "variant", f"unknown variant code {raw['variant']!r}")
            variant = raw["variant"]

    stacks = None
    if "starting_stacks" not in raw:
        conv.err("MissingRequiredField", "starting_stacks", "missing required field 'starting_stacks'")
    else:
        converted = conv.amounts("starting_stacks", raw["starting_stacks"], allow_null=True, positive=True)
        if converted is not _INVALID:
            stacks = converted
            if len(stacks) < 2:
                conv.err("TooFewPlayers", "starting_stacks", f"at least 2 players required, got {len(stacks)}")

    kwargs: dict[str, Any] = {}
    for name in ("antes", "blinds_or_straddles"):
        if name in values:
            converted = conv.amounts(name, values[name])
            if converted is not _INVALID:
                kwargs[name] = converted
    for name in _MONEY_FIELDS:
        if name in values:
            converted = conv.amount(name, values[name])
            if converted is not _INVALID:
                kwargs[name] = converted

    for name, kind in OPTIONAL_FIELDS.items():
        if name in values:
            kwargs[name] = _convert_optional(values[name], kind)

    user_fields = {k: v for k, v in raw.items() if k.startswith("_")}
    unknown = {k: v for k, v in raw.items()
               if not k.startswith("_") and k not in REQUIRED_FIELDS and k not in OPTIONAL_FIELDS}

    actions: list[ActionRecord] = []
    has_actions = "actions" in raw
    if has_actions:
        raw_actions = raw["actions"]
        if not isinstance(raw_actions, list) or not all(isinstance(a, str) for a in raw_actions):
            conv.err("WrongFieldType", "actions", "actions must be an array of strings")
            has_actions = False
        else:
            dropped = 0
            for index, action_text in enumerate(raw_actions):
                action, action_diags = parse_action(action_text, policy, location=index)
                diags.extend(action_diags)
                if action is None:
                    comments.drop_action(index - dropped)
                    dropped += 1
                else:
                    actions.append(action)

    if stacks is None or variant is None:
        return Parsed(None, diags)

    doc = HandDocument(
        variant=variant,
        starting_stacks=stacks,
        actions=tuple(actions),
        has_actions=has_actions,
        user_fields=user_fields,
        unknown_fields=unknown,
        comments=comments,
        source=text,
        **kwargs,
    )
    if isinstance(variant, Variant):
        diags.extend(check_required_matrix(variant, set(raw) & set(REQUIRED_FIELDS), policy))
    else:
        for name in MATRIX_FIELDS:
            if name in ("starting_stacks", "actions") and name not in raw:
                conv.err("MissingRequiredField", name, f"missing required field {name!r}")
    diags.extend(check_lengths(doc))
    diags.extend(check_optional_types(doc))
    diags.extend(_check_action_players(doc, raw.get("actions") if has_actions else None))
    return Parsed(doc, _dedupe(diags))


def _dedupe(diags: list[Diagnostic]) -> list[Diagnostic]:
    seen, out = set(), []
    for d in diags:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def _convert_optional(value: Any, kind: str) -> Any:
    if kind == "amounts" or kind == "numbers":
        if isinstance(value, list) and all(_is_number(v) for v in value):
            return tuple(Money.of(v) for v in value)
        return value
    if kind == "number":
        return Money.of(value) if _is_number(value) else value
    if kind in ("integers", "strings") and isinstance(value, list):
        return tuple(value)
    return value


def _check_action_players(doc: HandDocument, raw_actions) -> list[Diagnostic]:
    out = []
    count = doc.player_count
    for index, action in enumerate(doc.actions):
        if action.player is not None and action.player > count:
            out.append(error("PlayerIndexOutOfRange", index,
                             f"p{action.player} does not exist in a {count}-player hand"))
    return out


def check_required_matrix(variant: Variant, present: set[str],
                          policy: Policy = Policy.STRICT) -> list[Diagnostic]:
    """Compare the fields present against the variant's required-field row.

    A missing required field is always an error. A field the variant has no
    use for is an error under the strict policy and a warning otherwise.
    """
    required = REQUIRED_MATRIX[Variant(variant)]
    out = []
    for name in MATRIX_FIELDS:
        if name in required and name not in present:
            out.append(error("MissingRequiredField", name, f"missing required field {name!r}"))
        elif name not in required and name in present:
            make = error if Policy(policy) is Policy.STRICT else warning
            out.append(make("InapplicableField", name,
                            f"{name!r} does not apply to variant {Variant(variant).value}"))
    return out


def check_lengths(doc: HandDocument) -> list[Diagnostic]:
    out = []
    count = doc.player_count
    for name in PER_PLAYER_FIELDS:
        value = getattr(doc, name)
        if isinstance(value, (list, tuple)) and len(value) != count:
            out.append(error("LengthMismatch", name,
                             f"{name} has {len(value)} entries but there are {count} players"))
    return out


_TZ_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9_+\-]*)(?:/[A-Za-z0-9_+\-]+)*\Z")
_CURRENCY_RE = re.compile(r"[A-Z]{3}\Z")


def _type_ok(value: Any, kind: str) -> bool:
    if kind == "string":
        return isinstance(value, str)
    if kind == "integer":
        return _is_int(value)
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "local_time":
        return isinstance(value, datetime.time) and value.tzinfo is None
    if kind == "number":
        return isinstance(value, Money)
    if kind in ("amounts", "numbers"):
        return isinstance(value, tuple) and all(isinstance(v, Money) for v in value)
    if kind == "integers":
        return isinstance(value, tuple) and all(_is_int(v) for v in value)
    if kind == "strings":
        return isinstance(value, tuple) and all(isinstance(v, str) for v in value)
    raise ValueError(kind)


def check_optional_types(doc: HandDocument) -> list[Diagnostic]:
    out = []
    bad = set()
    for name, kind in OPTIONAL_FIELDS.items():
        value = getattr(doc, name)
        if value is None:
            continue
        if not _type_ok(value, kind):
            bad.add(name)
            out.append(error("WrongFieldType", name, f"{name} has the wrong type ({_type_name(value)})"))

    def ok(name):
        return getattr(doc, name) is not None and name not in bad

    if ok("month") and not 1 <= doc.month <= 12:
        out.append(warning("BadCalendarField", "month", f"month {doc.month} is outside 1..12"))
    if ok("day") and not 1 <= doc.day <= 31:
        out.append(warning("BadCalendarField", "day", f"day {doc.day} is outside 1..31"))
    if ok("time_zone") and not _TZ_RE.match(doc.time_zone):
        out.append(warning("BadTimeZone", "time_zone", f"{doc.time_zone!r} does not look like an IANA zone name"))
    if ok("currency") and not _CURRENCY_RE.match(doc.currency):
        out.append(warning("BadCurrencyCode", "currency", f"{doc.currency!r} is not a 3-letter currency code"))
    if ok("seats"):
        if any(s < 1 for s in doc.seats):
            out.append(warning("BadSeat", "seats", "seat numbers must be positive"))
        if ok("seat_count") and any(s > doc.seat_count for s in doc.seats):
            out.append(warning("SeatOutOfRange", "seats", f"a seat exceeds seat_count {doc.seat_count}"))
    for name in ("finishing_stacks", "time_banks"):
        if ok(name) and any(m.value < 0 for m in getattr(doc, name)):
            out.append(error("BadAmount", name, f"{name} must be non-negative"))
    if ok("time_limit") and doc.time_limit.value < 0:
        out.append(error("BadAmount", "time_limit", "time_limit must be non-negative"))
    return out


# --- output --------------------------------------------------------------

def _inline_or_block(key: str, items: list[str]) -> list[str]:
    if len(items) <= 4:
        return [f"{key} = [{', '.join(items)}]"]
    return [f"{key} = ["] + [f"  {item}," for item in items] + ["]"]


def _field_lines(doc: HandDocument, name: str) -> Optional[list[str]]:
    value = getattr(doc, name)
    if name == "actions":
        if not doc.has_actions:
            return None
        return _action_lines(doc)
    if value is None:
        return None
    if isinstance(value, tuple):
        return _inline_or_block(name, [_toml.dump_value(v) for v in value])
    if isinstance(value, enum.Enum):
        return [f"{name} = {_toml.dump_string(value.value)}"]
    return [f"{name} = {_toml.dump_value(value)}"]


def _action_lines(doc: HandDocument) -> list[str]:
    comments = doc.comments
    n = len(doc.actions)
    if n == 0 and not comments.action_leading:
        return ["actions = []"]
    lines = ["actions = ["]
    for index in range(n + 1):
        for text in comments.action_leading.get(index, ()):
            lines.append("  " + _comment(text))
        if index == n:
            break
        line = f"  {_toml.dump_string(serialize_action(doc.actions[index]))},"
        if index in comments.action_trailing:
            line += "  " + _comment(comments.action_trailing[index])
        lines.append(line)
    lines.append("]")
    return lines


def _comment(text: str) -> str:
    return "# " + text if text else "#"


def canonical_text(doc: HandDocument) -> str:
    lines: list[str] = []
    field_comments = doc.comments.fields

    def emit(name: str, body: Optional[list[str]]) -> None:
        if body is None:
            return
        lines.extend(_comment(text) for text in field_comments.get(name, ()))
        lines.extend(body)

    for name in REQUIRED_FIELDS:
        emit(name, _field_lines(doc, name))
    for name in OPTIONAL_FIELDS:
        emit(name, _field_lines(doc, name))
    for extra in (doc.user_fields, doc.unknown_fields):
        for name in sorted(extra):
            emit(name, [f"{_toml.dump_key(name)} = {_toml.dump_value(extra[name])}"])
    lines.extend(_comment(text) for text in doc.comments.footer)
    return "\n".join(lines) + "\n"


def serialize_document(doc: HandDocument, style: Style = Style.CANONICAL) -> bytes:
    """Write ``doc`` back out as UTF-8 bytes.

    ``PRESERVE_SOURCE`` returns the original bytes when the document still
    matches its source and falls back to canonical output otherwise.
    """
    if doc.known_variant is not None:
        problems = [d for d in check_required_matrix(doc.known_variant, doc.present_fields(), Policy.LENIENT)
                    if d.is_error]
        if problems:
            raise DocumentError("cannot serialize an invalid document", diagnostics=problems)
    if Style(style) is Style.PRESERVE_SOURCE and doc.source is not None:
        reparsed = parse_document(doc.source, Policy.LENIENT).document
        if reparsed is not None and reparsed == doc:
            return doc.source.encode("utf-8")
    return canonical_text(doc).encode("utf-8")


def loads(text: Union[str, bytes], policy: Policy = Policy.STRICT) -> HandDocument:
    """Parse and raise :class:`DocumentError` if there is any error."""
    document, diagnostics = parse_document(text, policy)
    errors = [d for d in diagnostics if d.severity is Severity.ERROR]
    if document is None or errors:
        first = errors[0] if errors else diagnostics[0]
        raise DocumentError(str(first), code=first.code, diagnostics=diagnostics)
    return document


def load(path: Union[str, Path], policy: Policy = Policy.STRICT) -> HandDocument:
    return loads(Path(path).read_bytes(), policy)
