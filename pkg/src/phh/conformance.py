"""Validation verdicts and round-trip testing of hand history files."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from phh.actions import Policy
from phh.diagnostics import Diagnostic, PHHError, Severity, error, warning
from phh.document import (
    HandDocument, Style, canonical_text, check_lengths, parse_document, serialize_document,
)
from phh.engine import Replay, Strictness, replay


class Verdict(str, enum.Enum):
    PASS = "Pass"
    PASS_WITH_WARNINGS = "PassWithWarnings"
    FAIL = "Fail"


class StackCheck(str, enum.Enum):
    NOT_APPLICABLE = "NotApplicable"
    MATCH = "Match"
    MISMATCH = "Mismatch"


@dataclass
class RoundTripResult:
    ok: bool
    differences: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class ConformanceReport:
    file_id: str
    verdict: Verdict
    diagnostics: list[Diagnostic]
    round_trip_ok: bool
    finishing_stack_check: StackCheck = StackCheck.NOT_APPLICABLE
    differences: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "file": self.file_id,
            "verdict": self.verdict.value,
            "round_trip_ok": self.round_trip_ok,
            "finishing_stack_check": self.finishing_stack_check.value,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "differences": list(self.differences),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        head = (f"{self.file_id}\t{self.verdict.value}\tround_trip={'ok' if self.round_trip_ok else 'failed'}"
                f"\tfinishing_stacks={self.finishing_stack_check.value}")
        lines = [head]
        lines.extend(f"  {d}" for d in self.diagnostics)
        lines.extend(f"  round-trip: {text}" for text in self.differences)
        return "\n".join(lines)


def _verdict(diagnostics: list[Diagnostic], round_trip_ok: bool) -> Verdict:
    if not round_trip_ok or any(d.is_error for d in diagnostics):
        return Verdict.FAIL
    if diagnostics:
        return Verdict.PASS_WITH_WARNINGS
    return Verdict.PASS


def _regenerate(doc: HandDocument, result: Optional[Replay]) -> HandDocument:
    if result is None:
        return replace(doc, source=None)
    actions = tuple(s.action for s in result.snapshots[1:])
    return replace(doc, actions=actions, source=None)


def _compare(original: HandDocument, copy: HandDocument) -> list[str]:
    a, b = original.semantic_key(), copy.semantic_key()
    if a == b:
        return []
    out = []
    if len(original.actions) != len(copy.actions):
        out.append(f"{len(original.actions)} actions became {len(copy.actions)}")
    for index, (x, y) in enumerate(zip(original.action_texts(), copy.action_texts())):
        if x != y:
            out.append(f"action {index}: {x!r} became {y!r}")
    if not out:
        out.append("documents differ")
    return out


def round_trip(data: Union[bytes, str], policy: Policy = Policy.STRICT) -> RoundTripResult:
    """Parse, replay, re-emit from the snapshots, reparse and compare.

    Also checks that canonical output is a fixed point, and that input
    already in canonical form comes back byte for byte.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    parsed = parse_document(data, policy)
    if not parsed.ok:
        return RoundTripResult(False, ["input does not parse"])
    return _round_trip_document(data, parsed.document, policy)[0]


def _round_trip_document(data: bytes, doc: HandDocument, policy: Policy,
                         result: Optional[Replay] = None) -> tuple[RoundTripResult, Optional[Replay]]:
    differences: list[str] = []
    if result is None and doc.known_variant is not None:
        try:
            result = replay(doc, Strictness.WARN)
        except PHHError as exc:
            return RoundTripResult(False, [f"replay failed: {exc}"]), None
    try:
        regenerated = _regenerate(doc, result)
        emitted = serialize_document(regenerated, Style.CANONICAL)
    except PHHError as exc:
        return RoundTripResult(False, [f"cannot emit: {exc}"]), result
    reparsed = parse_document(emitted, policy)
    if reparsed.document is None:
        return RoundTripResult(False, ["emitted document does not parse"]), result
    differences.extend(_compare(doc, reparsed.document))
    again = canonical_text(reparsed.document).encode("utf-8")
    if again != emitted:
        differences.append("canonical output is not a fixed point")
    if data.replace(b"\r\n", b"\n") == canonical_text(doc).encode("utf-8") and again != data:
        differences.append("canonical input was not reproduced byte for byte")
    return RoundTripResult(not differences, differences), result


def validate_positions(doc: HandDocument) -> list[Diagnostic]:
    """Check per-player lengths and that forced bets sit where position implies.

    In button games the first player posts the small blind (the big blind
    heads-up, by reversal) and the last player holds the button. Accepted
    shapes are a non-decreasing run of blinds from the first seat, optionally
    followed by a straddle on the button.
    """
    out = check_lengths(doc)
    variant = doc.known_variant
    blinds = doc.blinds_or_straddles
    if variant is None or variant.is_stud or not blinds or len(blinds) != doc.player_count:
        return out
    values = [b.value for b in blinds]
    if not any(values):
        return out
    n = len(values)
    body = values
    if n > 2 and values[-1] > 0 and values[-2] == 0:
        body = values[:-1]  # button straddle
    k = 0
    while k < len(body) and body[k] > 0:
        k += 1
    prefix, rest = body[:k], body[k:]
    ok = k > 0 and not any(rest) and all(a <= b for a, b in zip(prefix, prefix[1:]))
    if ok and body is not values:
        ok = values[-1] >= prefix[-1]
    if not ok:
        shown = "[" + ", ".join(str(b) for b in blinds) + "]"
        out.append(warning("NonstandardBlindPlacement", "blinds_or_straddles",
                           f"blinds {shown} do not start at the first player in position order"))
    return out


def advisories(doc: HandDocument) -> list[Diagnostic]:
    """Notes on fields that are kept but have no effect on the replay."""
    out = []
    antes = doc.antes or ()
    if doc.ante_trimming_status is True and len({a.value for a in antes}) > 1:
        out.append(warning("AnteTrimmingNotApplied", "ante_trimming_status",
                           "antes are taken in full; ante trimming is not modelled"))
    return out


def _dedupe(diags: list[Diagnostic]) -> list[Diagnostic]:
    seen, out = set(), []
    for d in diags:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def check(data: Union[bytes, str], file_id: str = "<memory>",
          policy: Policy = Policy.STRICT) -> ConformanceReport:
    """Full conformance check of one file. Never raises on bad content.

    Rule transgressions found by the replay are errors under the strict
    policy and warnings under the lenient one.
    """
    policy = Policy(policy)
    if isinstance(data, str):
        data = data.encode("utf-8")
    parsed = parse_document(data, policy)
    diagnostics = list(parsed.diagnostics)
    doc = parsed.document
    if doc is None or any(d.is_error for d in diagnostics):
        return ConformanceReport(file_id, Verdict.FAIL, diagnostics, False)
    diagnostics.extend(validate_positions(doc))
    diagnostics.extend(advisories(doc))
    stack_check = StackCheck.NOT_APPLICABLE
    result = None
    if doc.known_variant is not None:
        try:
            result = replay(doc, Strictness.WARN)
        except PHHError as exc:
            diagnostics.append(error(exc.code, None, str(exc)))
            return ConformanceReport(file_id, Verdict.FAIL, _dedupe(diagnostics), False)
        for d in result.diagnostics:
            if policy is Policy.STRICT and d.severity is Severity.WARNING:
                d = error(d.code, d.location, d.message)
            diagnostics.append(d)
        if result.terminal and doc.finishing_stacks is not None:
            mismatch = any(d.code == "FinishingStackMismatch" for d in result.diagnostics)
            stack_check = StackCheck.MISMATCH if mismatch else StackCheck.MATCH
    trip, _ = _round_trip_document(data, doc, policy, result)
    diagnostics = _dedupe(diagnostics)
    return ConformanceReport(file_id, _verdict(diagnostics, trip.ok), diagnostics, trip.ok,
                             stack_check, trip.differences)
