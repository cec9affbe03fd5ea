"""TOML reading and writing helpers.

Values are read with ``tomli`` (``tomllib`` when available) with floats kept
as :class:`~decimal.Decimal`. A small lexer runs over the raw text alongside
it for two things ``tomli`` cannot provide: attributing comments to the
fields and actions they annotate, and accepting the bare word ``null`` as an
array element, which hand histories use for unknown stacks.
"""

from __future__ import annotations

import datetime
import re
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Any, Iterator

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

TOMLDecodeError = tomllib.TOMLDecodeError

NULL_KEY = "__phh_null__"
_NULL_SENTINEL = "{" + NULL_KEY + " = true}"

_PUNCT = "[]{}=,"
_WORD_STOP = set(" \t\r\n[]{}=,#\"'")


@dataclass
class Token:
    kind: str  # "word", "string", "comment", "newline", or a punctuation char
    text: str
    start: int
    line: int
    end_line: int


_STRING_PATTERNS = (
    r'"""(?:[^\\"]|\\.|"(?!""))*(?:"""(?:""?)?|\\?\Z)',
    r"'''(?:[^']|'(?!''))*(?:'''(?:''?)?|\Z)",
    r'"(?:[^"\\\n]|\\.)*(?:"|(?=\n)|\\?\Z)',
    r"'[^'\n]*(?:'|(?=\n)|\Z)",
)
_TOKEN_RE = re.compile(
    r"(?P<newline>\n)|[ \t\r]+|(?P<comment>#[^\n]*)|(?P<punct>[][{}=,])"
    r"|(?P<string>" + "|".join(_STRING_PATTERNS) + r")"
    r"|(?P<word>[^ \t\r\n\[\]{}=,#\"']+)",
    re.DOTALL,
)
# Comment attribution only runs on text that already parsed as TOML, where
# whitespace, "," and "=" never change the outcome, so the scan skips them.
_SCAN_RE = re.compile(
    r"(?P<newline>\n)|(?P<comment>#[^\n]*)|(?P<punct>[][{}])"
    r"|(?P<string>" + "|".join(_STRING_PATTERNS) + r")"
    r"|(?P<word>[^ \t\r\n\[\]{}=,#\"']+)",
    re.DOTALL,
)


def tokenize(source: str) -> Iterator[Token]:
    """Lex ``source`` into coarse tokens. Total on arbitrary input."""
    line = 0
    for match in _TOKEN_RE.finditer(source):
        kind = match.lastgroup
        if kind is None:
            continue
        text = match.group()
        if kind == "newline":
            yield Token("newline", text, match.start(), line, line)
            line += 1
        elif kind == "punct":
            yield Token(text, text, match.start(), line, line)
        elif kind == "string":
            newlines = text.count("\n")
            yield Token("string", text, match.start(), line, line + newlines)
            line += newlines
        else:
            yield Token(kind, text, match.start(), line, line)


def _significant(tokens: list[Token], start: int, step: int) -> Token | None:
    j = start
    while 0 <= j < len(tokens):
        if tokens[j].kind not in ("newline", "comment"):
            return tokens[j]
        j += step
    return None


def substitute_nulls(source: str) -> str:
    """Replace bare ``null`` values with a TOML-legal sentinel."""
    if "null" not in source:
        return source
    tokens = list(tokenize(source))
    pieces, last = [], 0
    for idx, tok in enumerate(tokens):
        if tok.kind != "word" or tok.text != "null":
            continue
        before = _significant(tokens, idx - 1, -1)
        after = _significant(tokens, idx + 1, 1)
        if before is None or before.kind not in ("=", "[", ","):
            continue
        if after is not None and after.kind == "=":
            continue
        pieces.append(source[last:tok.start])
        pieces.append(_NULL_SENTINEL)
        last = tok.start + 4
    if not pieces:
        return source
    pieces.append(source[last:])
    return "".join(pieces)


def _restore_nulls(value: Any) -> Any:
    if isinstance(value, dict):
        if set(value) == {NULL_KEY} and value[NULL_KEY] is True:
            return None
        return {k: _restore_nulls(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_restore_nulls(v) for v in value]
    return value


def to_decimal(text: str) -> Decimal:
    """Exact float value; exponents beyond the decimal context are a ValueError."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"float out of range: {text[:40]}") from None
    if value and not -_EXP_LIMIT <= value.adjusted() <= _EXP_LIMIT:
        raise ValueError(f"float out of range: {text[:40]}")
    return value


def loads(source: str) -> dict:
    """Parse TOML text (plus bare ``null`` values) with exact floats."""
    substituted = substitute_nulls(source)
    data = tomllib.loads(substituted, parse_float=to_decimal)
    return data if substituted is source else _restore_nulls(data)


def _comment_text(raw: str) -> str:
    text = raw[1:]
    if text.startswith(" "):
        text = text[1:]
    return text.rstrip()


@dataclass
class Comments:
    """TOML comments grouped by what they annotate.

    ``fields`` holds comments on or inside a top-level key, in source order.
    ``action_leading[i]`` holds own-line comments preceding element ``i`` of
    the actions array (``i == len(actions)`` means before the closing
    bracket); ``action_trailing[i]`` is the comment sharing element ``i``'s
    line. ``footer`` collects comments after the last key.
    """

    fields: dict[str, list[str]] = field(default_factory=dict)
    action_leading: dict[int, list[str]] = field(default_factory=dict)
    action_trailing: dict[int, str] = field(default_factory=dict)
    footer: list[str] = field(default_factory=list)

    def semantic(self) -> tuple:
        return (
            tuple(sorted((k, tuple(v)) for k, v in self.fields.items() if v)),
            tuple(sorted((k, tuple(v)) for k, v in self.action_leading.items() if v)),
            tuple(sorted(self.action_trailing.items())),
            tuple(self.footer),
        )

    def drop_action(self, index: int) -> None:
        """Forget comments of action ``index`` and shift the later ones down."""
        leading = {}
        for i, texts in self.action_leading.items():
            if i < index:
                leading[i] = texts
            elif i > index:
                leading[i - 1] = texts
        trailing = {}
        for i, text in self.action_trailing.items():
            if i < index:
                trailing[i] = text
            elif i > index:
                trailing[i - 1] = text
        self.action_leading, self.action_trailing = leading, trailing


def _key_name(kind: str, text: str) -> str:
    if kind == "string":
        return text.strip("\"'")
    return text.split(".", 1)[0]


def extract_comments(source: str) -> Comments:
    result = Comments()
    if "#" not in source:
        return result
    fields: dict[str, list[str]] = defaultdict(list)
    leading: dict[int, list[str]] = defaultdict(list)
    trailing: dict[int, str] = {}
    pending: list[str] = []
    depth = 0
    owner: str | None = None
    table: str | None = None
    expect_key = True
    line_has_code = False
    in_actions = False
    header = 0  # 1 after a top-level "[", 2 after "[[", while the name is awaited
    skip_to_newline = False
    action_idx, last_elem_line = -1, -1
    line = 0

    for match in _SCAN_RE.finditer(source):
        kind = match.lastgroup
        if kind == "newline":
            line += 1
            line_has_code = False
            skip_to_newline = False
            header = 0
            if depth == 0:
                expect_key = True
            continue
        text = match.group()
        if kind == "comment":
            text = _comment_text(text)
            if in_actions and depth == 1:
                if line_has_code and last_elem_line == line and action_idx >= 0:
                    trailing[action_idx] = text
                else:
                    leading[action_idx + 1].append(text)
            elif depth > 0 or line_has_code:
                target = owner if owner is not None else table
                if target is None:
                    pending.append(text)
                else:
                    fields[target].append(text)
            else:
                pending.append(text)
            continue
        line_has_code = True
        newlines = text.count("\n") if kind == "string" else 0
        if header:
            # the token right after "[" (or "[[") names the table
            if kind == "punct" and text == "[" and header == 1:
                header = 2
            else:
                if kind in ("word", "string"):
                    table = _key_name(kind, text)
                    fields[table].extend(pending)
                    pending = []
                    owner = table
                header = 0
            line += newlines
            continue
        if skip_to_newline:
            line += newlines
            continue
        if depth == 0 and expect_key:
            expect_key = False
            if kind == "punct" and text == "[":
                owner = table
                header = 1
                skip_to_newline = True
                continue
            if kind in ("word", "string"):
                name = _key_name(kind, text)
                owner = table if table is not None else name
                fields[owner].extend(pending)
                pending = []
                in_actions = False
                line += newlines
                continue
        if kind == "punct":
            if text in "[{":
                depth += 1
                if depth == 1 and text == "[" and owner == "actions" and table is None:
                    in_actions = True
            elif text in "]}":
                depth = max(0, depth - 1)
                if depth == 0:
                    in_actions = False
            continue
        if kind == "string":
            if in_actions and depth == 1:
                action_idx += 1
                last_elem_line = line + newlines
            line += newlines

    result.fields = {k: v for k, v in fields.items() if v}
    result.action_leading = {k: v for k, v in leading.items() if v}
    result.action_trailing = trailing
    result.footer = pending
    return result


# --- fast path ---------------------------------------------------------

# Hand histories almost always stay inside a small slice of TOML: top-level
# bare keys whose values are scalars or flat arrays of scalars. That slice is
# read here in one pass, comments included. Anything else returns ``None``
# and the caller falls back to the full reader.
_FAST_TOKEN_RE = re.compile(
    r"[ \t]*(?:(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<punct>[][,=])"
    r'|(?P<bstr>"[^"\\\n]*")|(?P<lstr>' + r"'[^'\n]*')"
    r"|(?P<word>[A-Za-z0-9_+.\-]+)|(?P<other>.))",
    re.DOTALL,
)
_FAST_UNSAFE = re.compile(r"[\x00-\x08\x0b-\x1f\x7f]|" + re.escape(NULL_KEY))
_BARE_KEY_RE = re.compile(r"[A-Za-z0-9_-]+\Z")
_INT_RE = re.compile(r"[+-]?(?:0|[1-9][0-9]*)\Z")
_FLOAT_RE = re.compile(r"[+-]?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?\Z")
_WORDS = {"true": True, "false": False, "null": None}


_EXP_LIMIT = 4300  # the digit limit Python applies to integer literals


class _Bail(Exception):
    pass


def _fast_scalar(kind: str, text: str) -> Any:
    if kind == "bstr" or kind == "lstr":
        return text[1:-1]
    if kind != "word":
        raise _Bail
    if text in _WORDS:
        return _WORDS[text]
    if _INT_RE.match(text):
        return int(text)
    if ("." in text or "e" in text or "E" in text) and _FLOAT_RE.match(text):
        return to_decimal(text)
    raise _Bail


def fast_loads(source: str) -> tuple[dict, Comments] | None:
    """Read the common subset of hand history TOML, or return ``None``."""
    if "\r" in source or _FAST_UNSAFE.search(source):
        return None
    try:
        return _fast_loads(source)
    except _Bail:
        return None


def _fast_loads(source: str) -> tuple[dict, Comments]:
    data: dict[str, Any] = {}
    fields: dict[str, list[str]] = {}
    leading: dict[int, list[str]] = defaultdict(list)
    trailing: dict[int, str] = {}
    pending: list[str] = []
    tokens = [(m.lastgroup, m[m.lastindex]) for m in _FAST_TOKEN_RE.finditer(source)]
    n = len(tokens)
    i = 0
    line = 0
    while i < n:
        kind, text = tokens[i]
        i += 1
        if kind == "nl":
            line += 1
            continue
        if kind == "comment":
            pending.append(_comment_text(text))
            continue
        if kind != "word" or not _BARE_KEY_RE.match(text) or text in data or text == "null":
            raise _Bail
        key = text
        fields.setdefault(key, []).extend(pending)
        pending = []
        if i >= n or tokens[i][0] != "punct" or tokens[i][1] != "=":
            raise _Bail
        i += 1
        if i >= n:
            raise _Bail
        kind, text = tokens[i]
        i += 1
        if kind == "punct" and text == "[":
            actions = key == "actions"
            values: list[Any] = []
            line_has_code = True
            last_elem_line = -1
            want_value = True
            while True:
                if i >= n:
                    raise _Bail
                kind, text = tokens[i]
                i += 1
                if kind == "nl":
                    line += 1
                    line_has_code = False
                elif kind == "comment":
                    text = _comment_text(text)
                    if not actions:
                        fields[key].append(text)
                    elif line_has_code and last_elem_line == line and values:
                        trailing[len(values) - 1] = text
                    else:
                        leading[len(values)].append(text)
                elif kind == "punct":
                    if text == "]":
                        break
                    if text != "," or want_value:
                        raise _Bail
                    want_value = True
                else:
                    if not want_value:
                        raise _Bail
                    values.append(_fast_scalar(kind, text))
                    want_value = False
                    line_has_code = True
                    last_elem_line = line
            if actions and any(not isinstance(v, str) for v in values):
                raise _Bail
            data[key] = values
        else:
            data[key] = _fast_scalar(kind, text)
        # the rest of the line may hold only a comment
        if i < n and tokens[i][0] == "comment":
            fields[key].append(_comment_text(tokens[i][1]))
            i += 1
        if i < n:
            if tokens[i][0] != "nl":
                raise _Bail
    comments = Comments()
    comments.fields = {k: v for k, v in fields.items() if v}
    comments.action_leading = {k: v for k, v in leading.items() if v}
    comments.action_trailing = trailing
    comments.footer = pending
    return data, comments


def loads_with_comments(source: str) -> tuple[dict, Comments]:
    """Values and comments together; raises :class:`TOMLDecodeError` on bad input."""
    fast = fast_loads(source)
    if fast is not None:
        return fast
    data = loads(source)
    return data, extract_comments(source)


# --- writing -------------------------------------------------------------

_BARE_KEY = re.compile(r"[A-Za-z0-9_-]+\Z")
_ESCAPES = {"\\": "\\\\", '"': '\\"', "\b": "\\b", "\t": "\\t", "\n": "\\n", "\f": "\\f", "\r": "\\r"}


def dump_string(text: str) -> str:
    out = []
    for char in text:
        if char in _ESCAPES:
            out.append(_ESCAPES[char])
        elif ord(char) < 0x20 or ord(char) == 0x7F:
            out.append(f"\\u{ord(char):04X}")
        else:
            out.append(char)
    return '"' + "".join(out) + '"'


def dump_key(key: str) -> str:
    return key if _BARE_KEY.match(key) else dump_string(key)


def dump_decimal(value: Decimal) -> str:
    if value.is_nan():
        return "nan"
    if value.is_infinite():
        return "-inf" if value < 0 else "inf"
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0")
        if text.endswith("."):
            text += "0"
    else:
        text += ".0"
    return text


def dump_value(value: Any) -> str:
    # local import keeps the module free of package dependencies
    from phh.core import Money

    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Money):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Decimal):
        return dump_decimal(value)
    if isinstance(value, float):
        return dump_decimal(Decimal(repr(value)))
    if isinstance(value, str):
        return dump_string(value)
    if isinstance(value, (datetime.datetime, datetime.date, datetime.time)):
        return value.isoformat()
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(dump_value(v) for v in value) + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ", ".join(f"{dump_key(k)} = {dump_value(v)}" for k, v in value.items())
        return "{ " + items + " }"
    raise TypeError(f"cannot write {type(value).__name__} as TOML")
