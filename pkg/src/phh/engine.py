"""Replay engine: rebuilds the state of a hand action by action.

The engine validates the actions it is given (turn order, bet sizes, dealing
counts) but never chooses actions itself. Amounts are kept as exact
``Decimal`` values throughout; ``None`` stands for an unknown stack, which is
treated as unbounded.
"""

from __future__ import annotations

import enum
import functools
import json
from dataclasses import dataclass, field, replace
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from phh.actions import (
    ActionRecord, CheckCall, CompleteBetRaiseTo, DealBoard, DealHole, Disclosure, Fold,
    NoOp, PostBringIn, ShowMuck, StandPatDiscard, serialize_action,
)
from phh.core import EXACT, Card, Money, Variant, granularity
from phh.diagnostics import Diagnostic, EvaluationError, PHHError, RuleViolation, error, warning
from phh.document import HandDocument
from phh.evaluation import evaluate_for_variant, up_card_key

SNAPSHOT_VERSION = 1
ZERO = Decimal(0)


def _exact(method):
    """Run ``method`` under the exact chip-arithmetic context."""
    @functools.wraps(method)
    def run(*args, **kwargs):
        with localcontext(EXACT):
            return method(*args, **kwargs)
    return run


class Strictness(str, enum.Enum):
    STRICT = "strict"
    WARN = "warn"
    SILENT = "silent"


class Phase(str, enum.Enum):
    DEALING = "dealing"
    DRAWING = "drawing"
    BETTING = "betting"
    SHOWDOWN = "showdown"
    TERMINAL = "terminal"


class Status(str, enum.Enum):
    ACTIVE = "active"
    FOLDED = "folded"
    ALL_IN = "all-in"
    MUCKED = "mucked"
    SHOWN = "shown"


@dataclass(frozen=True)
class Street:
    """One deal phase and its betting round.

    ``hole`` lists the up/down flag of each hole card dealt on this street
    (``True`` = face up); ``board`` counts community cards; ``draw`` marks a
    discard-and-replace round before the betting.
    """

    hole: tuple[bool, ...] = ()
    board: int = 0
    draw: bool = False
    big_tier: bool = False


def _holdem(hole_count: int) -> tuple[Street, ...]:
    return (
        Street(hole=(False,) * hole_count),
        Street(board=3),
        Street(board=1, big_tier=True),
        Street(board=1, big_tier=True),
    )


_STUD = (
    Street(hole=(False, False, True)),
    Street(hole=(True,)),
    Street(hole=(True,), big_tier=True),
    Street(hole=(True,), big_tier=True),
    Street(hole=(False,), big_tier=True),
)


def _triple_draw(hole_count: int) -> tuple[Street, ...]:
    return (
        Street(hole=(False,) * hole_count),
        Street(draw=True),
        Street(draw=True, big_tier=True),
        Street(draw=True, big_tier=True),
    )


STREET_PLANS: dict[Variant, tuple[Street, ...]] = {
    Variant.FT: _holdem(2),
    Variant.NT: _holdem(2),
    Variant.NS: _holdem(2),
    Variant.PO: _holdem(4),
    Variant.FO8: _holdem(4),
    Variant.F7S: _STUD,
    Variant.F7S8: _STUD,
    Variant.FR: _STUD,
    Variant.N2L1D: (Street(hole=(False,) * 5), Street(draw=True)),
    Variant.F2L3D: _triple_draw(5),
    Variant.FB: _triple_draw(4),
}


@dataclass(frozen=True)
class Pot:
    amount: Decimal
    eligible: tuple[int, ...]  # 0-based player indices


@dataclass
class GameState:
    """Snapshot of a hand in progress. Player indices are 0-based here."""

    variant: Variant
    starting: tuple[Optional[Decimal], ...]
    stacks: list[Optional[Decimal]]
    bets: list[Decimal]
    collected: list[Decimal]
    statuses: list[Status]
    hole: list[list[Card]]
    up: list[list[bool]]
    board: list[Card] = field(default_factory=list)
    street: int = 0
    phase: Phase = Phase.DEALING
    dealt: list[int] = field(default_factory=list)
    board_dealt: int = 0
    pending_draw: list[int] = field(default_factory=list)
    declared: list[bool] = field(default_factory=list)
    to_act: list[int] = field(default_factory=list)
    turn: Optional[int] = None
    max_bet: Decimal = ZERO
    min_increment: Decimal = ZERO
    raise_count: int = 0
    bring_in_pending: bool = False
    seen: set = field(default_factory=set)
    finishing: Optional[list[Optional[Decimal]]] = None
    step: int = 0
    action: Optional[ActionRecord] = None
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def player_count(self) -> int:
        return len(self.stacks)

    @property
    def terminal(self) -> bool:
        return self.phase is Phase.TERMINAL

    @property
    def plan(self) -> tuple[Street, ...]:
        return STREET_PLANS[self.variant]

    @property
    @_exact
    def total_committed(self) -> list[Decimal]:
        return [c + b for c, b in zip(self.collected, self.bets)]

    def in_hand(self) -> list[int]:
        return [i for i, s in enumerate(self.statuses) if s not in (Status.FOLDED, Status.MUCKED)]

    def can_act(self, player: int) -> bool:
        return self.statuses[player] is Status.ACTIVE

    @property
    @_exact
    def pots(self) -> list[Pot]:
        contenders = set(self.in_hand())
        return _layer_pots(self.collected, contenders)

    def copy(self) -> "GameState":
        return replace(
            self,
            stacks=list(self.stacks), bets=list(self.bets), collected=list(self.collected),
            statuses=list(self.statuses), hole=[list(h) for h in self.hole],
            up=[list(u) for u in self.up], board=list(self.board), dealt=list(self.dealt),
            pending_draw=list(self.pending_draw), declared=list(self.declared),
            to_act=list(self.to_act), seen=set(self.seen),
            finishing=None if self.finishing is None else list(self.finishing),
        )

    @_exact
    def known_chip_total(self) -> Optional[Decimal]:
        """Chips on the table (stacks, bets and pots); ``None`` if any stack is unknown."""
        if any(s is None for s in self.stacks):
            return None
        return sum(self.stacks, ZERO) + sum(self.bets, ZERO) + sum(self.collected, ZERO)

    def to_record(self) -> dict:
        def amount(value):
            return None if value is None else _fmt(value)

        return {
            "version": SNAPSHOT_VERSION,
            "step": self.step,
            "action": None if self.action is None else serialize_action(self.action),
            "street": self.street,
            "phase": self.phase.value,
            "stacks": [amount(s) for s in self.stacks],
            "committed": [amount(b) for b in self.bets],
            "pots": [{"amount": _fmt(p.amount), "eligible": [i + 1 for i in p.eligible]} for p in self.pots],
            "statuses": [s.value for s in self.statuses],
            "board": "".join(map(str, self.board)),
            "turn": None if self.turn is None else self.turn + 1,
            "terminal": self.terminal,
        }


def _fmt(value: Decimal) -> str:
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def _layer_pots(totals: Sequence[Decimal], contenders: set[int]) -> list[Pot]:
    pots = []
    previous = ZERO
    for level in sorted({t for t in totals if t > 0}):
        amount = sum((min(t, level) - min(t, previous) for t in totals), ZERO)
        eligible = tuple(i for i, t in enumerate(totals) if i in contenders and t >= level)
        if pots and pots[-1].eligible == eligible:
            pots[-1] = Pot(pots[-1].amount + amount, eligible)
        else:
            pots.append(Pot(amount, eligible))
        previous = level
    return pots


class _Flagger:
    def __init__(self, strictness: Strictness, location=None):
        self.strictness = strictness
        self.location = location
        self.diagnostics: list[Diagnostic] = []

    def __call__(self, code: str, message: str) -> None:
        if self.strictness is Strictness.STRICT:
            raise RuleViolation(error(code, self.location, message))
        if self.strictness is Strictness.WARN:
            self.diagnostics.append(warning(code, self.location, message))


def _forced(values: Optional[Sequence[Money]], count: int) -> list[Decimal]:
    if values is None:
        return [ZERO] * count
    out = [m.value for m in values]
    if count == 2:
        # heads-up: positions of the forced bets are swapped
        out.reverse()
    return out


def _bet_unit(doc: HandDocument, street: Street) -> Decimal:
    money = doc.big_bet if street.big_tier else doc.small_bet
    return ZERO if money is None else money.value


class Engine:
    """Rules for one document. Build states with :meth:`initial_state`."""

    def __init__(self, doc: HandDocument, raise_cap: Optional[int] = None):
        variant = doc.known_variant
        if variant is None:
            raise PHHError(f"cannot replay unknown variant {doc.variant!r}", "BadVariantCode")
        self.doc = doc
        self.variant = variant
        self.plan = STREET_PLANS[variant]
        self.raise_cap = raise_cap
        self._flag: Optional[_Flagger] = None
        self.min_bet = (doc.min_bet.value if doc.min_bet is not None
                        else doc.small_bet.value if doc.small_bet is not None else ZERO)
        self.bring_in = doc.bring_in.value if doc.bring_in is not None else ZERO
        amounts = [m for m in doc.starting_stacks if m is not None]
        for name in ("antes", "blinds_or_straddles"):
            amounts.extend(getattr(doc, name) or ())
        for name in ("bring_in", "small_bet", "big_bet", "min_bet"):
            if getattr(doc, name) is not None:
                amounts.append(getattr(doc, name))
        amounts.extend(a.amount for a in doc.actions if isinstance(a, CompleteBetRaiseTo))
        self.granularity = granularity(amounts)
        self.float_form = any(m.is_float for m in amounts)
        count = doc.player_count
        self._antes = _forced(doc.antes, count)
        self._blinds = (_forced(doc.blinds_or_straddles, count) if not variant.is_stud
                        else [ZERO] * count)

    # -- setup -------------------------------------------------------------

    @_exact
    def initial_state(self, strictness: Strictness = Strictness.WARN) -> GameState:
        doc = self.doc
        count = doc.player_count
        flag = _Flagger(Strictness(strictness), "starting_stacks")
        stacks = [None if m is None else m.value for m in doc.starting_stacks]
        state = GameState(
            variant=self.variant,
            starting=tuple(stacks),
            stacks=list(stacks),
            bets=[ZERO] * count,
            collected=[ZERO] * count,
            statuses=[Status.ACTIVE] * count,
            hole=[[] for _ in range(count)],
            up=[[] for _ in range(count)],
            dealt=[0] * count,
            pending_draw=[0] * count,
            declared=[False] * count,
        )
        for target, amounts, what in ((state.collected, self._antes, "ante"), (state.bets, self._blinds, "blind")):
            for i, amount in enumerate(amounts):
                if amount <= 0:
                    continue
                stack = state.stacks[i]
                if stack is not None and amount > stack:
                    flag("StakesExceedStack", f"p{i + 1}'s {what} of {_fmt(amount)} exceeds the stack")
                    amount = stack
                target[i] += amount
                if stack is not None:
                    state.stacks[i] = stack - amount
        for i, stack in enumerate(state.stacks):
            if stack is not None and stack == 0:
                state.statuses[i] = Status.ALL_IN
        state.max_bet = max(state.bets, default=ZERO)
        state.min_increment = max(self.min_bet, state.max_bet)
        self._start_street(state)
        state.diagnostics = tuple(flag.diagnostics)
        return state

    # -- street flow -------------------------------------------------------

    def _start_street(self, state: GameState) -> None:
        street = self.plan[state.street]
        state.dealt = [0] * state.player_count
        state.board_dealt = 0
        state.declared = [False] * state.player_count
        state.to_act = []
        state.turn = None
        if street.hole or street.board:
            state.phase = Phase.DEALING
        elif street.draw:
            self._begin_draw(state)
        else:
            self._begin_betting(state)

    def _dealing_done(self, state: GameState) -> bool:
        street = self.plan[state.street]
        if state.board_dealt < street.board:
            return False
        return all(state.dealt[i] >= len(street.hole) for i in state.in_hand())

    def _after_dealing(self, state: GameState) -> None:
        if self.plan[state.street].draw:
            self._begin_draw(state)
        else:
            self._begin_betting(state)

    def _begin_draw(self, state: GameState) -> None:
        state.phase = Phase.DRAWING
        state.pending_draw = [0] * state.player_count
        state.declared = [False] * state.player_count
        state.turn = self._next_drawer(state)

    def _next_drawer(self, state: GameState) -> Optional[int]:
        for i in state.in_hand():
            if not state.declared[i]:
                return i
        return None

    def _draw_done(self, state: GameState) -> bool:
        return all(state.declared[i] and state.pending_draw[i] == 0 for i in state.in_hand())

    def _begin_betting(self, state: GameState) -> None:
        state.phase = Phase.BETTING
        active = [i for i in state.in_hand() if state.can_act(i)]
        facing = [i for i in active if state.bets[i] < state.max_bet]
        if len(state.in_hand()) <= 1 or not active or (len(active) == 1 and not facing):
            self._end_street(state)
            return
        state.to_act = list(active)
        opener = self._opener(state)
        state.bring_in_pending = (
            self.variant.is_stud and state.street == 0 and self.bring_in > 0 and opener is not None
        )
        state.turn = None if opener is None else self._first_from(state, opener)

    def _first_from(self, state: GameState, start: int) -> Optional[int]:
        count = state.player_count
        for k in range(count):
            i = (start + k) % count
            if i in state.to_act:
                return i
        return None

    def _opener(self, state: GameState) -> Optional[int]:
        if self.variant.is_stud:
            return self._stud_opener(state)
        if state.street == 0 and any(b > 0 for b in self._blinds):
            top = max(self._blinds)
            last = max(i for i, b in enumerate(self._blinds) if b == top)
            return (last + 1) % state.player_count
        return 0

    def _stud_opener(self, state: GameState) -> Optional[int]:
        low = self.variant is Variant.FR
        candidates = state.in_hand()
        ups = {i: [c for c, u in zip(state.hole[i], state.up[i]) if u] for i in candidates}
        if any(not ups[i] or not all(c.known for c in ups[i]) for i in candidates):
            return None
        if state.street == 0:
            def bring_in_key(i):
                card = ups[i][-1]
                rank = card.rank.value_low if low else card.rank.value_high
                return (rank, card.suit.order)
            # lowest card brings in for stud high, highest for razz
            return max(candidates, key=bring_in_key) if low else min(candidates, key=bring_in_key)
        best = max(up_card_key(ups[i], low) for i in candidates)
        return min(i for i in candidates if up_card_key(ups[i], low) == best)

    def _end_street(self, state: GameState) -> None:
        self._return_uncalled(state)
        for i in range(state.player_count):
            state.collected[i] += state.bets[i]
            state.bets[i] = ZERO
        state.max_bet = ZERO
        state.min_increment = self.min_bet
        state.raise_count = 0
        state.to_act = []
        state.turn = None
        state.bring_in_pending = False
        if len(state.in_hand()) <= 1:
            self._finish(state)
            return
        state.street += 1
        if state.street >= len(self.plan):
            state.street = len(self.plan) - 1
            self._begin_showdown(state)
        else:
            self._start_street(state)

    def _return_uncalled(self, state: GameState) -> None:
        if state.player_count < 2:
            return
        order = sorted(range(state.player_count), key=lambda i: state.bets[i], reverse=True)
        top, second = order[0], order[1]
        excess = state.bets[top] - state.bets[second]
        if excess > 0:
            state.bets[top] -= excess
            if state.stacks[top] is not None:
                state.stacks[top] += excess
            if state.statuses[top] is Status.ALL_IN:
                state.statuses[top] = Status.ACTIVE

    def _betting_closed(self, state: GameState) -> bool:
        """No further wagering is possible this hand (an all-in situation)."""
        if state.phase is Phase.BETTING and state.to_act:
            return False
        able = [i for i in state.in_hand() if state.can_act(i)]
        return len(able) <= 1

    def _begin_showdown(self, state: GameState) -> None:
        state.phase = Phase.SHOWDOWN
        state.turn = None
        self._maybe_finish_showdown(state)

    def _maybe_finish_showdown(self, state: GameState) -> None:
        contenders = state.in_hand()
        if len(contenders) <= 1 or all(state.statuses[i] is Status.SHOWN for i in contenders):
            self._finish(state)

    # -- award -------------------------------------------------------------

    def _finish(self, state: GameState, flag: Optional[_Flagger] = None) -> None:
        flag = flag or self._flag
        state.phase = Phase.TERMINAL
        state.turn = None
        state.to_act = []
        contenders = set(state.in_hand())
        pots = _layer_pots(state.collected, contenders)
        winnings: list[Optional[Decimal]] = [ZERO] * state.player_count
        strengths = {}
        if len(contenders) > 1:
            for i in sorted(contenders):
                try:
                    strengths[i] = evaluate_for_variant(self.variant, state.hole[i], state.board)
                except EvaluationError as exc:
                    if flag is not None:
                        flag("UnknownShowdownCards", f"p{i + 1}'s hand cannot be ranked: {exc}")
                    strengths[i] = None
        for pot in pots:
            eligible = list(pot.eligible)
            if not eligible:
                # contributions nobody still in the hand matched go to the deepest contenders
                deepest = max((state.collected[i] for i in contenders), default=ZERO)
                eligible = [i for i in sorted(contenders) if state.collected[i] == deepest]
            if len(eligible) == 1:
                self._pay(winnings, eligible, pot.amount)
                continue
            if any(strengths.get(i) is None for i in eligible):
                for i in eligible:
                    winnings[i] = None
                continue
            highs = {i: strengths[i][0] for i in eligible}
            lows = {i: strengths[i][1] for i in eligible if strengths[i][1] is not None}
            if lows:
                low_share = self._share(pot.amount, 2)
                self._pay(winnings, _best(lows), low_share)
                self._pay(winnings, _best(highs), pot.amount - low_share)
            else:
                self._pay(winnings, _best(highs), pot.amount)
        state.finishing = [
            None if state.stacks[i] is None or winnings[i] is None else state.stacks[i] + winnings[i]
            for i in range(state.player_count)
        ]
        for i in range(state.player_count):
            state.collected[i] = ZERO
            if state.finishing[i] is not None:
                state.stacks[i] = state.finishing[i]
            elif state.stacks[i] is not None:
                state.stacks[i] = None

    def _share(self, amount: Decimal, parts: int) -> Decimal:
        """Largest multiple of the granularity not above ``amount / parts``."""
        gran = self.granularity
        return Decimal(int(Fraction(amount) / (Fraction(gran) * parts) // 1)) * gran

    def _pay(self, winnings, winners: list[int], amount: Decimal) -> None:
        winners = sorted(winners)
        share = self._share(amount, len(winners))
        remainder = amount - share * len(winners)
        for i in winners:
            if winnings[i] is not None:
                winnings[i] += share
        # the indivisible remainder goes to the earliest winner in player order
        if winnings[winners[0]] is not None:
            winnings[winners[0]] += remainder

    # -- bet sizing ----------------------------------------------------------

    @_exact
    def bet_bounds(self, state: GameState, player: int) -> tuple[Decimal, Optional[Decimal]]:
        """Smallest and largest legal completion/bet/raise-to amounts.

        The upper bound is ``None`` when unlimited. An all-in for less than
        the minimum is always allowed in addition to this range.
        """
        street = self.plan[state.street]
        if self.variant.is_fixed_limit:
            unit = _bet_unit(self.doc, street)
            to = unit if state.max_bet < unit else state.max_bet + unit
            return to, to
        low = state.max_bet + state.min_increment if state.max_bet > 0 else self.min_bet
        if self.variant.is_pot_limit:
            call = state.max_bet - state.bets[player]
            pot = sum(state.collected, ZERO) + sum(state.bets, ZERO) + call
            return low, state.max_bet + pot
        return low, None

    @_exact
    def all_in_to(self, state: GameState, player: int) -> Optional[Decimal]:
        stack = state.stacks[player]
        return None if stack is None else state.bets[player] + stack

    # -- actions -------------------------------------------------------------

    @_exact
    def apply(self, state: GameState, action: ActionRecord,
              strictness: Strictness = Strictness.WARN, index=None) -> GameState:
        new = state.copy()
        new.step = state.step + 1
        new.action = action
        flag = _Flagger(Strictness(strictness), index)
        self._flag = flag
        try:
            self._dispatch(new, action, flag)
        finally:
            self._flag = None
        new.diagnostics = tuple(flag.diagnostics)
        return new

    def _dispatch(self, state: GameState, action: ActionRecord, flag: _Flagger) -> None:
        if isinstance(action, NoOp):
            return
        if state.terminal:
            flag("ActionAfterTerminal", f"{serialize_action(action)!r} after the hand ended")
            return
        player = None if action.player is None else action.player - 1
        if player is not None and not 0 <= player < state.player_count:
            # unrecoverable even when tolerant
            raise RuleViolation(error("PlayerIndexOutOfRange", flag.location,
                                      f"p{action.player} is not in this hand"))
        if isinstance(action, (DealHole, DealBoard)):
            self._deal(state, action, flag)
        elif isinstance(action, StandPatDiscard):
            self._discard(state, player, action.cards, flag)
        elif isinstance(action, ShowMuck):
            self._show_muck(state, player, action, flag)
        else:
            self._bet_action(state, player, action, flag)

    def _note_cards(self, state: GameState, cards: Sequence[Card], flag: _Flagger) -> None:
        for card in cards:
            if card.known:
                if card in state.seen:
                    flag("DuplicateCard", f"{card} was already dealt")
                state.seen.add(card)
            elif card.mixed:
                flag("MixedUnknownCard", f"{card} is only partly known")

    def _deal(self, state: GameState, action, flag: _Flagger) -> None:
        if state.phase in (Phase.BETTING, Phase.SHOWDOWN):
            flag("WrongStreetAction", "dealing while no deal is expected")
        street = self.plan[state.street]
        if isinstance(action, DealBoard):
            if state.phase is Phase.DEALING and state.board_dealt + len(action.cards) > street.board:
                flag("WrongCardCount", f"too many board cards on street {state.street + 1}")
            self._note_cards(state, action.cards, flag)
            state.board.extend(action.cards)
            state.board_dealt += len(action.cards)
        else:
            p = action.player - 1
            if state.statuses[p] in (Status.FOLDED, Status.MUCKED):
                flag("InactivePlayer", f"dealing to p{p + 1} who is out of the hand")
            self._note_cards(state, action.cards, flag)
            if state.phase is Phase.DRAWING:
                if len(action.cards) > state.pending_draw[p]:
                    flag("WrongCardCount", f"p{p + 1} receives more cards than discarded")
                state.pending_draw[p] = max(0, state.pending_draw[p] - len(action.cards))
                state.hole[p].extend(action.cards)
                state.up[p].extend([False] * len(action.cards))
            else:
                start = state.dealt[p]
                if state.phase is Phase.DEALING and start + len(action.cards) > len(street.hole):
                    flag("WrongCardCount", f"p{p + 1} receives too many cards on street {state.street + 1}")
                for k, card in enumerate(action.cards):
                    pos = start + k
                    state.hole[p].append(card)
                    state.up[p].append(street.hole[pos] if pos < len(street.hole) else False)
                state.dealt[p] += len(action.cards)
        if state.phase is Phase.DEALING and self._dealing_done(state):
            self._after_dealing(state)
        elif state.phase is Phase.DRAWING and self._draw_done(state):
            self._after_draw(state)

    def _after_draw(self, state: GameState) -> None:
        self._begin_betting(state)

    def _discard(self, state: GameState, p: int, cards, flag: _Flagger) -> None:
        if state.phase is not Phase.DRAWING:
            flag("WrongStreetAction", f"p{p + 1} cannot stand pat or discard now")
            if not (self.plan[state.street].draw and state.phase is Phase.DEALING):
                return
            state.phase = Phase.DRAWING
        if state.statuses[p] in (Status.FOLDED, Status.MUCKED):
            flag("InactivePlayer", f"p{p + 1} is out of the hand")
            return
        if state.declared[p]:
            flag("OutOfTurn", f"p{p + 1} already drew this round")
        elif state.turn is not None and state.turn != p:
            flag("OutOfTurn", f"p{p + 1} drew out of turn (p{state.turn + 1} is next)")
        hand = state.hole[p]
        ups = state.up[p]
        for card in cards:
            if card.known and card in hand:
                k = hand.index(card)
            elif any(not c.known for c in hand):
                k = next(j for j, c in enumerate(hand) if not c.known)
            else:
                flag("DiscardNotHeld", f"p{p + 1} does not hold {card}")
                continue
            del hand[k]
            del ups[k]
            state.pending_draw[p] += 1
        state.declared[p] = True
        state.turn = self._next_drawer(state)
        if self._draw_done(state):
            self._after_draw(state)

    def _show_muck(self, state: GameState, p: int, action: ShowMuck, flag: _Flagger) -> None:
        if state.statuses[p] is Status.FOLDED:
            flag("InactivePlayer", f"p{p + 1} folded and has no cards to show")
            return
        if state.statuses[p] in (Status.SHOWN, Status.MUCKED):
            flag("WrongStreetAction", f"p{p + 1} already showed or mucked")
            return
        early = state.phase is not Phase.SHOWDOWN
        if early and not self._betting_closed(state):
            flag("WrongStreetAction", f"p{p + 1} shows or mucks before the showdown")
        if action.disclosure is Disclosure.MUCK:
            state.statuses[p] = Status.MUCKED
            if state.turn == p:
                state.turn = None
            if p in state.to_act:
                state.to_act.remove(p)
        else:
            if action.disclosure is Disclosure.SHOW_PREVIOUS:
                if not state.hole[p] or not all(c.known for c in state.hole[p]):
                    flag("DashWithoutKnownHole", f"p{p + 1} shows '-' but the hole cards are not all known")
                shown = list(state.hole[p])
            else:
                shown = list(action.cards)
                self._reveal(state, p, shown, flag)
            state.statuses[p] = Status.SHOWN
        if not early:
            self._maybe_finish_showdown(state)
        elif len(state.in_hand()) <= 1:
            self._finish(state, flag)

    def _reveal(self, state: GameState, p: int, shown: list[Card], flag: _Flagger) -> None:
        hole, ups = state.hole[p], state.up[p]
        downs = [c for c, u in zip(hole, ups) if not u]
        if len(shown) == len(hole):
            compare = hole
        elif len(shown) == len(downs):
            # stud: only the down cards are written out
            compare = downs
        else:
            flag("WrongCardCount", f"p{p + 1} shows {len(shown)} cards but holds {len(hole)}")
            compare = []
        if any(c.known and c not in shown for c in compare):
            flag("ShownCardsMismatch", f"p{p + 1} shows cards that differ from those dealt")
        known = {c for c in hole if c.known}
        for card in shown:
            if card not in known:
                if card in state.seen:
                    flag("DuplicateCard", f"{card} shown by p{p + 1} was already dealt")
                state.seen.add(card)
        if compare is downs and compare is not hole:
            it = iter(shown)
            state.hole[p] = [c if u else next(it) for c, u in zip(hole, ups)]
        elif compare is hole:
            state.hole[p] = list(shown)
        else:
            state.hole[p] = list(shown)
            state.up[p] = [False] * len(shown)

    def _bet_action(self, state: GameState, p: int, action, flag: _Flagger) -> None:
        if state.phase in (Phase.DEALING, Phase.DRAWING):
            flag("WrongStreetAction", f"p{p + 1} bets while cards are still being dealt or drawn")
            # treat the missing deals as having happened
            if state.phase is Phase.DEALING and self.plan[state.street].draw:
                self._begin_draw(state)
            if state.phase is Phase.DEALING or state.phase is Phase.DRAWING:
                self._begin_betting(state)
            if state.phase is not Phase.BETTING:
                flag("WrongStreetAction", f"p{p + 1} bets when no betting is possible")
                return
        elif state.phase is not Phase.BETTING:
            flag("WrongStreetAction", f"p{p + 1} bets during the {state.phase.value}")
            return
        if state.statuses[p] is not Status.ACTIVE:
            flag("InactivePlayer", f"p{p + 1} cannot act ({state.statuses[p].value})")
            return
        if state.turn is None and state.to_act and p in state.to_act:
            # opener could not be worked out (unknown up cards): whoever acts first opens
            state.turn = p
            state.bring_in_pending = (self.variant.is_stud and state.street == 0 and self.bring_in > 0
                                      and state.max_bet == 0)
        if state.turn is not None and p != state.turn:
            flag("OutOfTurn", f"p{p + 1} acted but it is p{state.turn + 1}'s turn")
        if state.bring_in_pending and isinstance(action, CheckCall) and p == state.turn:
            flag("WrongStreetAction", f"p{p + 1} must bring in or complete, not check")
            action = PostBringIn(player=p + 1)

        if isinstance(action, Fold):
            state.statuses[p] = Status.FOLDED
            self._acted(state, p)
            if len(state.in_hand()) <= 1:
                self._return_uncalled(state)
                for i in range(state.player_count):
                    state.collected[i] += state.bets[i]
                    state.bets[i] = ZERO
                self._finish(state, flag)
            return
        if isinstance(action, PostBringIn):
            if not self.variant.is_stud or not state.bring_in_pending:
                flag("WrongStreetAction", f"p{p + 1} cannot bring in now")
                return
            self._put(state, p, self.bring_in)
            state.max_bet = max(state.max_bet, state.bets[p])
            state.bring_in_pending = False
            self._reopen(state, p)
            self._acted(state, p)
            return
        if isinstance(action, CheckCall):
            ceiling = self.all_in_to(state, p)
            self._put(state, p, state.max_bet if ceiling is None else min(state.max_bet, ceiling))
            self._acted(state, p)
            return
        # complete / bet / raise to
        to = action.amount.value
        ceiling = self.all_in_to(state, p)
        if ceiling is not None and to > ceiling:
            flag("AboveStack", f"p{p + 1} bets {_fmt(to)} with only {_fmt(ceiling)} available")
            to = ceiling
        if to <= state.max_bet:
            flag("BelowMinimum", f"p{p + 1}'s raise to {_fmt(to)} does not exceed the current bet")
            self._put(state, p, min(state.max_bet, ceiling) if ceiling is not None else state.max_bet)
            self._acted(state, p)
            return
        low, high = self.bet_bounds(state, p)
        all_in = ceiling is not None and to == ceiling
        if to < low and not all_in:
            flag("BelowMinimum", f"p{p + 1}'s raise to {_fmt(to)} is below the minimum {_fmt(low)}")
        if high is not None and to > high:
            flag("AboveCap", f"p{p + 1}'s raise to {_fmt(to)} exceeds the maximum {_fmt(high)}")
        if self.raise_cap is not None and self.variant.is_fixed_limit and state.raise_count >= self.raise_cap:
            flag("AboveCap", f"betting is capped at {self.raise_cap} bets")
        if not any(state.can_act(i) for i in state.in_hand() if i != p) and to > state.max_bet:
            flag("IllegalRaise", f"p{p + 1} raises with no opponent left to respond")
        increment = to - state.max_bet
        self._put(state, p, to)
        if increment >= state.min_increment:
            state.min_increment = increment
        state.max_bet = to
        state.raise_count += 1
        state.bring_in_pending = False
        self._reopen(state, p)
        self._acted(state, p)

    def _put(self, state: GameState, p: int, to: Decimal) -> None:
        delta = to - state.bets[p]
        if delta <= 0:
            return
        state.bets[p] = to
        if state.stacks[p] is not None:
            state.stacks[p] -= delta
            if state.stacks[p] == 0:
                state.statuses[p] = Status.ALL_IN

    def _reopen(self, state: GameState, p: int) -> None:
        state.to_act = [i for i in state.in_hand() if i != p and state.can_act(i)]

    def _acted(self, state: GameState, p: int) -> None:
        if p in state.to_act:
            state.to_act.remove(p)
        # players who went all-in or folded never act again
        state.to_act = [i for i in state.to_act if state.can_act(i)]
        if not state.to_act or len(state.in_hand()) <= 1:
            if len(state.in_hand()) <= 1:
                return
            self._end_street(state)
            return
        state.turn = self._first_from(state, (p + 1) % state.player_count)

    # -- results -------------------------------------------------------------

    @_exact
    def to_money(self, value: Optional[Decimal]) -> Optional[Money]:
        if value is None:
            return None
        if not self.float_form and value == value.to_integral_value():
            return Money(value.quantize(Decimal(1)), False)
        return Money(value, True)


def initial_state(doc: HandDocument, strictness: Strictness = Strictness.WARN) -> GameState:
    return Engine(doc).initial_state(strictness)


def apply_action(state: GameState, action: ActionRecord, doc: HandDocument,
                 strictness: Strictness = Strictness.WARN) -> tuple[GameState, list[Diagnostic]]:
    """Functional single step; ``doc`` supplies the stakes."""
    new = Engine(doc).apply(state, action, strictness)
    return new, list(new.diagnostics)


def finishing_stacks(state: GameState, engine: Optional[Engine] = None) -> list:
    """Per-player final stacks (``Money`` or ``None`` where unknowable)."""
    if not state.terminal or state.finishing is None:
        raise PHHError("the hand has not reached a terminal state", "NonTerminalState")
    if engine is None:
        return list(state.finishing)
    return [engine.to_money(v) for v in state.finishing]


class Replay(NamedTuple):
    snapshots: list[GameState]
    diagnostics: list[Diagnostic]
    engine: Engine

    @property
    def final(self) -> GameState:
        return self.snapshots[-1]

    @property
    def terminal(self) -> bool:
        return self.final.terminal

    def finishing_stacks(self) -> list[Optional[Money]]:
        return finishing_stacks(self.final, self.engine)

    def records(self) -> list[dict]:
        return [s.to_record() for s in self.snapshots]

    def dumps(self) -> str:
        return "\n".join(json.dumps(r, sort_keys=True) for r in self.records())


def replay(doc: HandDocument, strictness: Strictness = Strictness.WARN,
           raise_cap: Optional[int] = None) -> Replay:
    """Replay every action, returning one snapshot per step.

    Under ``STRICT`` the first rule transgression raises
    :class:`~phh.diagnostics.RuleViolation`.
    """
    strictness = Strictness(strictness)
    engine = Engine(doc, raise_cap=raise_cap)
    state = engine.initial_state(strictness)
    snapshots = [state]
    diagnostics = list(state.diagnostics)
    for index, action in enumerate(doc.actions):
        state = engine.apply(state, action, strictness, index)
        snapshots.append(state)
        diagnostics.extend(state.diagnostics)
    if state.terminal and doc.finishing_stacks is not None and len(doc.finishing_stacks) == doc.player_count:
        computed = finishing_stacks(state)
        for i, (expected, actual) in enumerate(zip(doc.finishing_stacks, computed)):
            if actual is not None and expected.value != actual:
                make = error if strictness is Strictness.STRICT else warning
                diagnostics.append(make("FinishingStackMismatch", "finishing_stacks",
                                        f"p{i + 1} finishes with {_fmt(actual)}, file says {expected}"))
    return Replay(snapshots, diagnostics, engine)


def _best(strengths: dict) -> list[int]:
    top = max(strengths.values())
    return [i for i, s in strengths.items() if s == top]
