"""The action micro-grammar used by entries of the ``actions`` array.

Each entry reads ``[Actor Verb[ Arguments...]][ # Commentary]``. Parsing is
purely syntactic; whether an action is legal at that point of the hand is the
engine's concern.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional, Union

from phh.core import Card, Money, parse_cards, serialize_cards
from phh.diagnostics import Diagnostic, PHHError, error


class Policy(str, enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class Disclosure(str, enum.Enum):
    MUCK = "muck"
    SHOW = "show"
    SHOW_PREVIOUS = "show-previous"


@dataclass(frozen=True, kw_only=True)
class Action:
    commentary: Optional[str] = None

    player: Optional[int] = None

    @property
    def is_noop(self) -> bool:
        return False


@dataclass(frozen=True, kw_only=True)
class NoOp(Action):
    @property
    def is_noop(self) -> bool:
        return True


@dataclass(frozen=True, kw_only=True)
class DealBoard(Action):
    cards: tuple[Card, ...]


@dataclass(frozen=True, kw_only=True)
class DealHole(Action):
    player: int
    cards: tuple[Card, ...]


@dataclass(frozen=True, kw_only=True)
class PostBringIn(Action):
    player: int


@dataclass(frozen=True, kw_only=True)
class CompleteBetRaiseTo(Action):
    player: int
    amount: Money


@dataclass(frozen=True, kw_only=True)
class CheckCall(Action):
    player: int


@dataclass(frozen=True, kw_only=True)
class Fold(Action):
    player: int


@dataclass(frozen=True, kw_only=True)
class StandPatDiscard(Action):
    player: int
    cards: tuple[Card, ...] = ()

    @property
    def stands_pat(self) -> bool:
        return not self.cards


@dataclass(frozen=True, kw_only=True)
class ShowMuck(Action):
    player: int
    disclosure: Disclosure = Disclosure.MUCK
    cards: tuple[Card, ...] = ()


ActionRecord = Union[NoOp, DealBoard, DealHole, PostBringIn, CompleteBetRaiseTo,
                     CheckCall, Fold, StandPatDiscard, ShowMuck]

_PLAYER_RE = re.compile(r"p([1-9][0-9]*)\Z")
_PLAYER_VERBS = {"pb", "cbr", "cc", "f", "sd", "sm"}
_DEALER_VERBS = {"db", "dh"}


class ActionSyntaxError(PHHError):
    code = "BadAction"


def _split_commentary(text: str) -> tuple[str, Optional[str]]:
    i = text.find("#")
    while i >= 0:
        if i == 0 or text[i - 1].isspace():
            comment = text[i + 1:]
            if comment.startswith(" "):
                comment = comment[1:]
            return text[:i], comment
        i = text.find("#", i + 1)
    return text, None


def _player(token: str) -> int:
    match = _PLAYER_RE.match(token)
    if not match:
        raise ActionSyntaxError(f"unknown actor {token!r}", "UnknownActor")
    return int(match.group(1))


def _cards(token: str, *, known: bool = False) -> tuple[Card, ...]:
    try:
        cards = tuple(parse_cards(token))
    except PHHError as exc:
        raise ActionSyntaxError(f"bad cards {token!r}: {exc}", "BadCards") from None
    if not cards:
        raise ActionSyntaxError("empty card list", "BadCards")
    if known and not all(card.known for card in cards):
        raise ActionSyntaxError(f"shown cards must all be known, got {token!r}", "BadCards")
    return cards


def _arity(tokens: list[str], lo: int, hi: int, verb: str) -> None:
    if len(tokens) < lo:
        raise ActionSyntaxError(f"{verb!r} is missing an argument", "MissingArgument")
    if len(tokens) > hi:
        raise ActionSyntaxError(f"{verb!r} has unexpected argument {tokens[hi]!r}", "ExtraArgument")


def read_action(text: str) -> ActionRecord:
    """Parse one action notation, raising :class:`ActionSyntaxError`."""
    body, commentary = _split_commentary(text.rstrip())
    if commentary is not None:
        commentary = commentary.rstrip()
    tokens = body.split()
    if not tokens:
        return NoOp(commentary=commentary)
    actor, rest = tokens[0], tokens[1:]
    if not rest:
        if actor == "d" or _PLAYER_RE.match(actor):
            raise ActionSyntaxError(f"actor {actor!r} without an action", "UnknownVerb")
        raise ActionSyntaxError(f"unknown actor {actor!r}", "UnknownActor")
    verb, args = rest[0], rest[1:]

    if actor == "d":
        if verb not in _DEALER_VERBS:
            raise ActionSyntaxError(f"unknown dealer action {verb!r}", "UnknownVerb")
        if verb == "db":
            _arity(args, 1, 1, verb)
            return DealBoard(cards=_cards(args[0]), commentary=commentary)
        _arity(args, 2, 2, verb)
        return DealHole(player=_player(args[0]), cards=_cards(args[1]), commentary=commentary)

    player = _player(actor)
    if verb not in _PLAYER_VERBS:
        raise ActionSyntaxError(f"unknown player action {verb!r}", "UnknownVerb")
    if verb == "cbr":
        _arity(args, 1, 1, verb)
        try:
            amount = Money.parse(args[0])
        except PHHError:
            raise ActionSyntaxError(f"bad amount {args[0]!r}", "BadAmount") from None
        if amount.value <= 0:
            raise ActionSyntaxError(f"amount must be positive, got {args[0]!r}", "BadAmount")
        return CompleteBetRaiseTo(player=player, amount=amount, commentary=commentary)
    if verb in ("pb", "cc", "f"):
        _arity(args, 0, 0, verb)
        cls = {"pb": PostBringIn, "cc": CheckCall, "f": Fold}[verb]
        return cls(player=player, commentary=commentary)
    if verb == "sd":
        _arity(args, 0, 1, verb)
        cards = _cards(args[0]) if args else ()
        return StandPatDiscard(player=player, cards=cards, commentary=commentary)
    # sm
    _arity(args, 0, 1, verb)
    if not args:
        return ShowMuck(player=player, disclosure=Disclosure.MUCK, commentary=commentary)
    if args[0] == "-":
        return ShowMuck(player=player, disclosure=Disclosure.SHOW_PREVIOUS, commentary=commentary)
    return ShowMuck(player=player, disclosure=Disclosure.SHOW, cards=_cards(args[0], known=True),
                    commentary=commentary)


def parse_action(text: str, policy: Policy = Policy.STRICT,
                 location=None) -> tuple[Optional[ActionRecord], list[Diagnostic]]:
    """Parse ``text`` without raising.

    Grammar violations are errors under either policy; the lenient policy
    differs only in that callers drop the offending action and carry on.
    Returns ``(None, [diagnostic])`` for an unparseable action.
    """
    try:
        return read_action(text), []
    except ActionSyntaxError as exc:
        return None, [error(exc.code, location, f"{exc} in {text!r}")]


def serialize_action(action: ActionRecord) -> str:
    match action:
        case NoOp():
            body = ""
        case DealBoard(cards=cards):
            body = f"d db {serialize_cards(cards)}"
        case DealHole(player=p, cards=cards):
            body = f"d dh p{p} {serialize_cards(cards)}"
        case PostBringIn(player=p):
            body = f"p{p} pb"
        case CompleteBetRaiseTo(player=p, amount=amount):
            body = f"p{p} cbr {amount}"
        case CheckCall(player=p):
            body = f"p{p} cc"
        case Fold(player=p):
            body = f"p{p} f"
        case StandPatDiscard(player=p, cards=cards):
            body = f"p{p} sd {serialize_cards(cards)}" if cards else f"p{p} sd"
        case ShowMuck(player=p, disclosure=disclosure, cards=cards):
            if disclosure is Disclosure.MUCK:
                body = f"p{p} sm"
            elif disclosure is Disclosure.SHOW_PREVIOUS:
                body = f"p{p} sm -"
            else:
                body = f"p{p} sm {serialize_cards(cards)}"
        case _:
            raise TypeError(f"not an action: {action!r}")
    if action.commentary is None:
        return body
    comment = "#" + (" " + action.commentary if action.commentary else "")
    return f"{body}  {comment}" if body else comment


def semantic_action(action: ActionRecord) -> tuple:
    """Hashable comparison key that distinguishes integer and float amounts."""
    fields = [type(action).__name__, action.commentary, action.player]
    if isinstance(action, CompleteBetRaiseTo):
        fields.append(action.amount.semantic())
    for name in ("cards", "disclosure"):
        if hasattr(action, name):
            fields.append(getattr(action, name))
    return tuple(fields)
