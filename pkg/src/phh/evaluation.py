"""Hand strength under the six showdown orders used by the supported variants.

Every strength reduces to a tuple ``key`` where larger is better, so low
orders store negated rank vectors. Evaluation works directly on the card
multiset (rank counts, suit groups, bitmasks) rather than by trying every
five-card subset.
"""

from __future__ import annotations

import enum
import functools
import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from phh.core import Card, Variant
from phh.diagnostics import EvaluationError


class EvaluationOrder(str, enum.Enum):
    STANDARD_HIGH = "standard-high"
    SHORT_DECK_HIGH = "short-deck-high"
    EIGHT_OR_BETTER_LOW = "eight-or-better-low"
    ACE_TO_FIVE_LOW = "ace-to-five-low"
    DEUCE_TO_SEVEN_LOW = "deuce-to-seven-low"
    BADUGI = "badugi"


class Comparison(enum.IntEnum):
    A_LESS = -1
    EQUAL = 0
    A_GREATER = 1


HIGH_CATEGORIES = (
    "high card", "one pair", "two pair", "three of a kind", "straight",
    "flush", "full house", "four of a kind", "straight flush",
)
# short deck: a flush beats a full house
SHORT_DECK_CATEGORIES = (
    "high card", "one pair", "two pair", "three of a kind", "straight",
    "full house", "flush", "four of a kind", "straight flush",
)
PAIRING_CATEGORIES = ("no pair", "one pair", "two pair", "three of a kind", "full house", "four of a kind")


@functools.total_ordering
@dataclass(frozen=True)
class EvaluatedStrength:
    order: EvaluationOrder
    category: str
    key: tuple
    cards: tuple[Card, ...] = ()

    @property
    def tiebreak(self) -> tuple:
        return self.key[1:]

    def _check(self, other: "EvaluatedStrength") -> None:
        if not isinstance(other, EvaluatedStrength):
            raise TypeError(f"cannot compare strength with {type(other).__name__}")
        if other.order is not self.order:
            raise EvaluationError(f"cannot compare {self.order.value} with {other.order.value}",
                                  "OrderMismatch")

    def __eq__(self, other):
        if not isinstance(other, EvaluatedStrength):
            return NotImplemented
        self._check(other)
        return self.key == other.key

    def __lt__(self, other):
        self._check(other)
        return self.key < other.key

    def __hash__(self):
        return hash((self.order, self.key))

    def __str__(self) -> str:
        return f"{self.category} ({''.join(map(str, self.cards))})" if self.cards else self.category


def compare(a: EvaluatedStrength, b: EvaluatedStrength) -> Comparison:
    a._check(b)
    if a.key == b.key:
        return Comparison.EQUAL
    return Comparison.A_GREATER if a.key > b.key else Comparison.A_LESS


# --- high hands ----------------------------------------------------------

def _straight_top(ranks: set[int], short_deck: bool, wheel: bool = True) -> Optional[int]:
    for top in range(14, 5, -1):
        if all(r in ranks for r in range(top - 4, top + 1)):
            return top
    if not wheel or 14 not in ranks:
        return None
    low = (6, 7, 8, 9) if short_deck else (2, 3, 4, 5)
    if all(r in ranks for r in low):
        return low[-1]
    return None


def _high_key(cards: Sequence[Card], short_deck: bool = False, wheel: bool = True) -> tuple[int, tuple]:
    """Best high hand among ``cards`` (at least five) as ``(category, tiebreak)``."""
    ranks = [c.rank.value_high for c in cards]
    counts = Counter(ranks)
    suited: dict[str, list[int]] = defaultdict(list)
    for card, rank in zip(cards, ranks):
        suited[card.suit].append(rank)
    flush = max((sorted(rs, reverse=True) for rs in suited.values() if len(rs) >= 5), default=None)
    categories = SHORT_DECK_CATEGORIES if short_deck else HIGH_CATEGORIES
    cat = categories.index

    if flush is not None:
        top = _straight_top(set(flush), short_deck, wheel)
        if top is not None:
            return cat("straight flush"), (top,)
    quads = sorted((r for r, n in counts.items() if n >= 4), reverse=True)
    if quads:
        kicker = max(r for r in ranks if r != quads[0])
        return cat("four of a kind"), (quads[0], kicker)
    trips = sorted((r for r, n in counts.items() if n == 3), reverse=True)
    pairs = sorted((r for r, n in counts.items() if n == 2), reverse=True)
    full = None
    if trips and (len(trips) > 1 or pairs):
        full = (trips[0], max(trips[1:] + pairs))
    flush_key = tuple(flush[:5]) if flush is not None else None
    if short_deck and flush_key is not None:
        return cat("flush"), flush_key
    if full is not None:
        return cat("full house"), full
    if flush_key is not None:
        return cat("flush"), flush_key
    top = _straight_top(set(ranks), short_deck, wheel)
    if top is not None:
        return cat("straight"), (top,)
    distinct = sorted(counts, reverse=True)
    if trips:
        kickers = [r for r in distinct if r != trips[0]][:2]
        return cat("three of a kind"), (trips[0], *kickers)
    if len(pairs) >= 2:
        kicker = max(r for r in distinct if r not in pairs[:2])
        return cat("two pair"), (pairs[0], pairs[1], kicker)
    if pairs:
        kickers = [r for r in distinct if r != pairs[0]][:3]
        return cat("one pair"), (pairs[0], *kickers)
    return cat("high card"), tuple(distinct[:5])


# --- rank-only low hands -------------------------------------------------

def _pairing_category(mults: Sequence[int]) -> int:
    pattern = tuple(sorted((m for m in mults if m), reverse=True))
    return {
        (1, 1, 1, 1, 1): 0, (2, 1, 1, 1): 1, (2, 2, 1): 2,
        (3, 1, 1): 3, (3, 2): 4, (4, 1): 5,
    }[pattern]


def _ace_five_key(cards: Sequence[Card]) -> tuple[int, tuple]:
    """Lowest five-card ace-to-five hand as ``(-category, negated ranks)``."""
    counts = Counter(c.rank.value_low for c in cards)
    distinct = sorted(counts)
    if len(distinct) >= 5:
        chosen = distinct[:5]
        return 0, tuple(-r for r in sorted(chosen, reverse=True))
    best = None
    for mults in itertools.product(*(range(min(counts[r], 4) + 1) for r in distinct)):
        if sum(mults) != 5:
            continue
        groups = sorted(((m, r) for m, r in zip(mults, distinct) if m), key=lambda g: (-g[0], -g[1]))
        key = (-_pairing_category(mults), tuple(-r for _, r in groups))
        if best is None or key > best:
            best = key
    return best


def _eight_low_key(cards: Sequence[Card]) -> Optional[tuple]:
    distinct = sorted({c.rank.value_low for c in cards if c.rank.value_low <= 8})
    if len(distinct) < 5:
        return None
    return tuple(-r for r in sorted(distinct[:5], reverse=True))


def _badugi_key(cards: Sequence[Card]) -> tuple[int, tuple]:
    suits: dict[str, list[int]] = defaultdict(list)
    for card in cards:
        suits[card.suit].append(card.rank.value_low)
    best = (0, ())
    for choice in itertools.product(*([None] + ranks for ranks in suits.values())):
        picked = [r for r in choice if r is not None]
        if len(set(picked)) != len(picked):
            continue
        key = (len(picked), tuple(-r for r in sorted(picked, reverse=True)))
        if key > best:
            best = key
    return best


# --- public entry point --------------------------------------------------

ORDERS_BY_VARIANT = {
    Variant.FT: (EvaluationOrder.STANDARD_HIGH,),
    Variant.NT: (EvaluationOrder.STANDARD_HIGH,),
    Variant.NS: (EvaluationOrder.SHORT_DECK_HIGH,),
    Variant.PO: (EvaluationOrder.STANDARD_HIGH,),
    Variant.FO8: (EvaluationOrder.STANDARD_HIGH, EvaluationOrder.EIGHT_OR_BETTER_LOW),
    Variant.F7S: (EvaluationOrder.STANDARD_HIGH,),
    Variant.F7S8: (EvaluationOrder.STANDARD_HIGH, EvaluationOrder.EIGHT_OR_BETTER_LOW),
    Variant.FR: (EvaluationOrder.ACE_TO_FIVE_LOW,),
    Variant.N2L1D: (EvaluationOrder.DEUCE_TO_SEVEN_LOW,),
    Variant.F2L3D: (EvaluationOrder.DEUCE_TO_SEVEN_LOW,),
    Variant.FB: (EvaluationOrder.BADUGI,),
}

OMAHA_VARIANTS = frozenset({Variant.PO, Variant.FO8})


def _validate(cards: Sequence[Card]) -> None:
    for card in cards:
        if not card.known:
            raise EvaluationError(f"cannot rank unknown card {card}", "UnknownCardInShowdown")
    if len(set(cards)) != len(cards):
        raise EvaluationError("duplicate card in hand", "DuplicateCard")


def _evaluate_cards(order: EvaluationOrder, cards: Sequence[Card]) -> Optional[tuple]:
    if order is EvaluationOrder.STANDARD_HIGH:
        category, tiebreak = _high_key(cards)
        return (category, *tiebreak)
    if order is EvaluationOrder.SHORT_DECK_HIGH:
        category, tiebreak = _high_key(cards, short_deck=True)
        return (category, *tiebreak)
    if order is EvaluationOrder.DEUCE_TO_SEVEN_LOW:
        if len(cards) == 5:
            subsets: Iterable[Sequence[Card]] = (cards,)
        else:
            subsets = itertools.combinations(cards, 5)
        best = None
        for subset in subsets:
            category, tiebreak = _high_key(subset, wheel=False)
            key = (-category, *(-r for r in tiebreak))
            if best is None or key > best:
                best = key
        return best
    if order is EvaluationOrder.ACE_TO_FIVE_LOW:
        category, tiebreak = _ace_five_key(cards)
        return (category, *tiebreak)
    if order is EvaluationOrder.EIGHT_OR_BETTER_LOW:
        tiebreak = _eight_low_key(cards)
        return None if tiebreak is None else (0, *tiebreak)
    if order is EvaluationOrder.BADUGI:
        size, tiebreak = _badugi_key(cards)
        return (size, *tiebreak)
    raise ValueError(order)


def _category_name(order: EvaluationOrder, key: tuple) -> str:
    if order is EvaluationOrder.STANDARD_HIGH:
        return HIGH_CATEGORIES[key[0]]
    if order is EvaluationOrder.SHORT_DECK_HIGH:
        return SHORT_DECK_CATEGORIES[key[0]]
    if order is EvaluationOrder.DEUCE_TO_SEVEN_LOW:
        return HIGH_CATEGORIES[-key[0]]
    if order is EvaluationOrder.ACE_TO_FIVE_LOW:
        return PAIRING_CATEGORIES[-key[0]]
    if order is EvaluationOrder.EIGHT_OR_BETTER_LOW:
        return f"{-key[1]}-low"
    return f"{key[0]}-card badugi"


def evaluate(order: EvaluationOrder, hole: Sequence[Card], board: Sequence[Card] = (),
             *, omaha: bool = False) -> Optional[EvaluatedStrength]:
    """Strength of the best hand ``hole`` and ``board`` make under ``order``.

    With ``omaha`` the hand must use exactly two hole and three board cards.
    Returns ``None`` when an eight-or-better low does not qualify. Raises
    :class:`EvaluationError` for unknown, duplicate or too few cards.
    """
    order = EvaluationOrder(order)
    hole, board = tuple(hole), tuple(board)
    cards = hole + board
    _validate(cards)
    need = 1 if order is EvaluationOrder.BADUGI else 5
    if omaha:
        if len(hole) < 2 or len(board) < 3:
            raise EvaluationError("Omaha needs two hole and three board cards", "WrongCardCount")
        best = None
        for two in itertools.combinations(hole, 2):
            for three in itertools.combinations(board, 3):
                key = _evaluate_cards(order, two + three)
                if key is not None and (best is None or key > best):
                    best = key
        key = best
    else:
        if len(cards) < need:
            raise EvaluationError(f"{order.value} needs at least {need} cards, got {len(cards)}",
                                  "WrongCardCount")
        key = _evaluate_cards(order, cards)
    if key is None:
        return None
    return EvaluatedStrength(order, _category_name(order, key), key)


def evaluate_for_variant(variant: Variant, hole: Sequence[Card], board: Sequence[Card] = ()):
    """``(high, low)`` strengths for a showdown hand; ``low`` is ``None`` unless split."""
    orders = ORDERS_BY_VARIANT[Variant(variant)]
    omaha = variant in OMAHA_VARIANTS
    strengths = [evaluate(order, hole, board, omaha=omaha) for order in orders]
    return strengths[0], (strengths[1] if len(strengths) > 1 else None)


def up_card_key(cards: Sequence[Card], low: bool) -> tuple:
    """Order stud up-card boards for deciding who opens a street.

    Larger is "better showing": high hands by pairing then rank for stud high,
    and the lowest ace-to-five holding for razz. Unknown cards are ignored.
    """
    known = [c for c in cards if c.known]
    values = [c.rank.value_low if low else c.rank.value_high for c in known]
    counts = Counter(values)
    groups = sorted(counts.items(), key=lambda g: (-g[1], -g[0]))
    shape = tuple(n for _, n in groups)
    ranks = tuple(r for r, _ in groups)
    if low:
        return tuple(-n for n in shape), tuple(-r for r in ranks)
    return shape, ranks
