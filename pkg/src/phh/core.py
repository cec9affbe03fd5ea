"""Cards, variant codes and exact monetary values."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from decimal import MAX_EMAX, MAX_PREC, MIN_EMIN, Context, Decimal, DivisionByZero, InvalidOperation, Overflow
from typing import Iterable, Sequence, Union

from phh.diagnostics import BadLength, OddLength, PHHError, UnknownRankChar, UnknownSuitChar

# chip arithmetic never rounds: sums and differences stay exact at any size
EXACT = Context(prec=MAX_PREC, Emax=MAX_EMAX, Emin=MIN_EMIN, traps=[InvalidOperation, DivisionByZero, Overflow])


class Rank(str, enum.Enum):
    DEUCE = "2"
    TREY = "3"
    FOUR = "4"
    FIVE = "5"
    SIX = "6"
    SEVEN = "7"
    EIGHT = "8"
    NINE = "9"
    TEN = "T"
    JACK = "J"
    QUEEN = "Q"
    KING = "K"
    ACE = "A"
    UNKNOWN = "?"

    @property
    def value_high(self) -> int:
        """2..14 with the ace high. Unknown ranks have no value."""
        return _RANK_HIGH[self]

    @property
    def value_low(self) -> int:
        """1..13 with the ace low."""
        high = _RANK_HIGH[self]
        return 1 if high == 14 else high


_RANK_HIGH = {rank: i + 2 for i, rank in enumerate(list(Rank)[:13])}
_RANK_HIGH[Rank.UNKNOWN] = 0


class Suit(str, enum.Enum):
    CLUB = "c"
    DIAMOND = "d"
    HEART = "h"
    SPADE = "s"
    UNKNOWN = "?"

    @property
    def order(self) -> int:
        """Bring-in tiebreak order: club < diamond < heart < spade."""
        return "cdhs?".index(self.value)


_RANKS = {r.value: r for r in Rank}
_SUITS = {s.value: s for s in Suit}


@dataclass(frozen=True)
class Card:
    rank: Rank
    suit: Suit

    @property
    def known(self) -> bool:
        return self.rank is not Rank.UNKNOWN and self.suit is not Suit.UNKNOWN

    @property
    def fully_unknown(self) -> bool:
        return self.rank is Rank.UNKNOWN and self.suit is Suit.UNKNOWN

    @property
    def mixed(self) -> bool:
        return not self.known and not self.fully_unknown

    def __str__(self) -> str:
        return self.rank.value + self.suit.value

    def __repr__(self) -> str:
        return f"Card({self})"


UNKNOWN_CARD = Card(Rank.UNKNOWN, Suit.UNKNOWN)


def parse_card(text: str) -> Card:
    card = _CARDS.get(text)
    if card is not None:
        return card
    if len(text) != 2:
        raise BadLength(f"a card takes exactly two characters, got {text!r}")
    rank = _RANKS.get(text[0])
    if rank is None:
        raise UnknownRankChar(f"unknown rank character {text[0]!r}")
    suit = _SUITS.get(text[1])
    if suit is None:
        raise UnknownSuitChar(f"unknown suit character {text[1]!r}")
    return Card(rank, suit)


_CARDS = {r.value + s.value: Card(r, s) for r in Rank for s in Suit}


def parse_cards(text: str) -> list[Card]:
    if len(text) % 2:
        raise OddLength(f"card text must have an even length, got {text!r}")
    return [parse_card(text[i:i + 2]) for i in range(0, len(text), 2)]


def serialize_cards(cards: Iterable[Card]) -> str:
    return "".join(str(card) for card in cards)


def standard_deck() -> list[Card]:
    return [Card(r, s) for r in list(Rank)[:13] for s in list(Suit)[:4]]


def short_deck() -> list[Card]:
    return [c for c in standard_deck() if c.rank.value_high >= 6]


class Variant(str, enum.Enum):
    FT = "FT"
    NT = "NT"
    NS = "NS"
    PO = "PO"
    FO8 = "FO/8"
    F7S = "F7S"
    F7S8 = "F7S/8"
    FR = "FR"
    N2L1D = "N2L1D"
    F2L3D = "F2L3D"
    FB = "FB"

    @property
    def full_name(self) -> str:
        return VARIANT_NAMES[self]

    @property
    def is_stud(self) -> bool:
        return self in (Variant.F7S, Variant.F7S8, Variant.FR)

    @property
    def is_fixed_limit(self) -> bool:
        return self.value.startswith("F")

    @property
    def is_pot_limit(self) -> bool:
        return self is Variant.PO

    @property
    def is_no_limit(self) -> bool:
        return self.value.startswith("N")


VARIANT_NAMES = {
    Variant.FT: "Fixed-limit Texas hold 'em",
    Variant.NT: "No-limit Texas hold 'em",
    Variant.NS: "No-limit short-deck hold 'em",
    Variant.PO: "Pot-limit Omaha hold 'em",
    Variant.FO8: "Fixed-limit Omaha hold 'em high/low-split eight or better",
    Variant.F7S: "Fixed-limit seven card stud",
    Variant.F7S8: "Fixed-limit seven card stud high/low-split eight or better",
    Variant.FR: "Fixed-limit razz",
    Variant.N2L1D: "No-limit deuce-to-seven lowball single draw",
    Variant.F2L3D: "Fixed-limit deuce-to-seven lowball triple draw",
    Variant.FB: "Fixed-limit badugi",
}


def parse_variant(text: str) -> Variant:
    try:
        return Variant(text)
    except ValueError:
        raise PHHError(f"unknown variant code {text!r}", "BadVariantCode") from None


_AMOUNT_RE = re.compile(r"[0-9]+(?:\.[0-9]+)?\Z")


@dataclass(frozen=True, eq=False)
class Money:
    """An exact non-negative amount that remembers its lexical form.

    Equality and ordering are numeric; ``is_float`` only affects how the
    value is written back out (``3`` vs ``3.0``).
    """

    value: Decimal
    is_float: bool = False

    @classmethod
    def of(cls, value: Union[int, Decimal, "Money"]) -> "Money":
        if isinstance(value, Money):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not amounts")
        if isinstance(value, int):
            return cls(Decimal(value), False)
        if isinstance(value, Decimal):
            if not value.is_finite():
                raise ValueError(f"amount must be finite, got {value}")
            return cls(value, True)
        raise TypeError(f"not an amount: {value!r}")

    @classmethod
    def parse(cls, text: str) -> "Money":
        if not _AMOUNT_RE.match(text):
            raise PHHError(f"bad amount {text!r}", "BadAmount")
        try:
            return cls(Decimal(text), "." in text)
        except InvalidOperation:  # pragma: no cover - regex already guards
            raise PHHError(f"bad amount {text!r}", "BadAmount") from None

    def __str__(self) -> str:
        if not self.is_float:
            return str(int(self.value)) if self.value == self.value.to_integral_value() else _plain(self.value)
        text = _plain(self.value)
        return text if "." in text else text + ".0"

    def __repr__(self) -> str:
        return f"Money({self})"

    def __eq__(self, other):
        if isinstance(other, Money):
            return self.value == other.value
        if isinstance(other, (int, Decimal)) and not isinstance(other, bool):
            return self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __lt__(self, other):
        return self.value < Money.of(other).value

    def __le__(self, other):
        return self.value <= Money.of(other).value

    def __gt__(self, other):
        return self.value > Money.of(other).value

    def __ge__(self, other):
        return self.value >= Money.of(other).value

    def __add__(self, other):
        other = Money.of(other)
        return Money(EXACT.add(self.value, other.value), self.is_float or other.is_float)

    __radd__ = __add__

    def __sub__(self, other):
        other = Money.of(other)
        return Money(EXACT.subtract(self.value, other.value), self.is_float or other.is_float)

    def __rsub__(self, other):
        return Money.of(other) - self

    def semantic(self) -> tuple:
        return (self.value, self.is_float)

    def to_python(self) -> int | Decimal:
        """The value as TOML would have produced it: ``int`` or ``Decimal``."""
        return self.value if self.is_float else int(self.value)


def _plain(value: Decimal) -> str:
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0")
        if text.endswith("."):
            text += "0"
    return text


def granularity(values: Sequence[Money]) -> Decimal:
    """Smallest decimal unit appearing among ``values`` (1 for integers)."""
    places = 0
    for money in values:
        exponent = money.value.normalize().as_tuple().exponent
        if isinstance(exponent, int) and exponent < 0:
            places = max(places, -exponent)
    return Decimal(1).scaleb(-places)
