import random
import time
from decimal import Decimal
from pathlib import Path

import pytest

import oracles
from handgen import generate_hand
from phh.actions import CheckCall, CompleteBetRaiseTo, read_action
from phh.core import Money, Variant, parse_cards
from phh.diagnostics import PHHError, RuleViolation
from phh.document import loads, parse_document
from phh.engine import (
    STREET_PLANS, Engine, Phase, Status, Strictness, apply_action, finishing_stacks, initial_state, replay,
)

FIXTURES = sorted((Path(__file__).parent / "fixtures").glob("*.phh"))
D = Decimal


def nt(stacks="[200, 200, 200]", blinds="[1, 2, 0]", antes=None, actions=()):
    count = stacks.count(",") + 1
    antes = antes or "[" + ", ".join(["0"] * count) + "]"
    body = ",\n".join(f'  "{a}"' for a in actions)
    return loads(f'variant = "NT"\nantes = {antes}\nblinds_or_straddles = {blinds}\nmin_bet = 2\n'
                 f"starting_stacks = {stacks}\nactions = [\n{body}\n]\n")


@pytest.fixture
def golden(golden_bytes):
    return parse_document(golden_bytes).document


def test_golden_posts(golden):
    state = initial_state(golden)
    assert state.stacks == [D(1105000), D(4190000), D(5910000), D(10765000)]
    assert state.bets == [D(75000), D(150000), D(0), D(0)]


def test_golden_replay(golden):
    start = time.perf_counter()
    result = replay(golden, Strictness.STRICT)
    elapsed = time.perf_counter() - start
    assert result.diagnostics == []
    assert len(result.snapshots) == 27
    assert result.terminal
    assert result.finishing_stacks() == [Money.parse(str(v)) for v in oracles.golden_finishing_by_hand()]
    assert elapsed < 0.5


def test_golden_short_all_in(golden):
    result = replay(golden, Strictness.STRICT)
    index = next(i for i, a in enumerate(golden.actions) if a == read_action("p1 cbr 280000"))
    after = result.snapshots[index + 1]
    assert after.stacks[0] == 0 and after.statuses[0] is Status.ALL_IN


def test_golden_draw_bookkeeping(golden):
    result = replay(golden, Strictness.STRICT)
    index = next(i for i, a in enumerate(golden.actions) if a == read_action("p4 sd Qh"))
    discarded, redrawn = result.snapshots[index + 1], result.snapshots[index + 2]
    assert parse_cards("Qh")[0] not in discarded.hole[3]
    assert len(redrawn.hole[3]) == 5 and parse_cards("4d")[0] in redrawn.hole[3]


def test_out_of_turn_strict(golden):
    engine = Engine(golden)
    state = engine.initial_state()
    for action in golden.actions[:4]:
        state = engine.apply(state, action)
    assert state.turn == 2
    with pytest.raises(RuleViolation) as info:
        engine.apply(state, CheckCall(player=2), Strictness.STRICT)
    assert info.value.code == "OutOfTurn"
    warned = engine.apply(state, CheckCall(player=2), Strictness.WARN)
    assert [d.code for d in warned.diagnostics] == ["OutOfTurn"]


def test_fold_to_big_blind():
    doc = nt(actions=["d dh p1 ????", "d dh p2 ????", "d dh p3 ????", "p3 f", "p1 f"])
    assert [m.value for m in replay(doc, Strictness.STRICT).finishing_stacks()] == [199, 201, 200]


POSTFLOP_CHECKS = ["d db 2h3h4s", "p1 cc", "p2 cc", "d db 8c", "p1 cc", "p2 cc", "d db 9c", "p1 cc", "p2 cc"]


def test_huge_stacks_stay_exact():
    big = 10 ** 40 + 1
    actions = ["d dh p1 AsAd", "d dh p2 KsKd", "d dh p3 7c2d", "p3 f", "p1 cbr 7", "p2 cc",
               *POSTFLOP_CHECKS, "p1 sm AsAd", "p2 sm KsKd"]
    result = replay(nt(stacks=f"[{big}, {big}, {big}]", actions=actions), Strictness.STRICT)
    assert [m.value for m in result.finishing_stacks()] == [big + 7, big - 7, big]
    assert result.final.known_chip_total() == 3 * big


def test_odd_unit_split_with_long_amounts():
    # pot of 4 + 3e-30 split two ways: 31 significant digits, the spare unit goes to p1
    unit = "0." + "0" * 29 + "1"
    actions = ["d dh p1 AsKd", "d dh p2 AhKc", "d dh p3 7c2d", "p3 f", "p1 cc", "p2 cc",
               *POSTFLOP_CHECKS, "p1 sm AsKd", "p2 sm AhKc"]
    doc = nt(stacks="[5, 5, 5]", antes=f"[0, 0, {unit}]", blinds=f"[1, 2.{unit[2:]}, 0]", actions=actions)
    stacks = [m.value for m in replay(doc, Strictness.STRICT).finishing_stacks()]
    # written out: the default 28-digit context would round D(5) + D(unit)
    assert stacks == [D("5." + unit[2:]), D(5), D("4." + "9" * 30)]


def test_empty_actions_are_not_terminal():
    result = replay(nt())
    assert not result.terminal
    with pytest.raises(PHHError) as info:
        result.finishing_stacks()
    assert info.value.code == "NonTerminalState"
    with pytest.raises(PHHError):
        finishing_stacks(result.final)


def test_finishing_stack_check(golden_text):
    good = loads(golden_text + "finishing_stacks = [0, 4190000, 5910000, 12095000]\n")
    assert replay(good, Strictness.STRICT).diagnostics == []
    bad = loads(golden_text + "finishing_stacks = [1, 4190000, 5910000, 12095000]\n")
    codes = [(d.code, d.is_error) for d in replay(bad, Strictness.WARN).diagnostics]
    assert codes == [("FinishingStackMismatch", False)]
    assert [d.is_error for d in replay(bad, Strictness.STRICT).diagnostics] == [True]


def test_heads_up_big_blind_ante():
    doc = loads('variant = "NT"\nantes = [0.0, 3.0]\nblinds_or_straddles = [1.0, 2.0]\nmin_bet = 2.0\n'
                "starting_stacks = [100.0, 100.0]\nactions = []\n")
    state = initial_state(doc)
    # heads-up reverses forced bets: the first player sits in the big blind
    assert state.collected == [D(3), D(0)]
    assert state.bets == [D(2), D(1)]


def test_button_straddle_posts():
    doc = nt(stacks="[200, 200, 200, 200, 200, 200]", blinds="[1, 2, 0, 0, 0, 4]")
    state = initial_state(doc)
    assert [b for b in state.bets if b] == [D(1), D(2), D(4)]
    engine = Engine(doc)
    for p in range(1, 7):
        state = engine.apply(state, read_action(f"d dh p{p} ????"))
    assert state.turn == 0


def test_pot_limit_cap():
    doc = loads('variant = "PO"\nantes = [0, 0]\nblinds_or_straddles = [1, 2]\nmin_bet = 2\n'
                'starting_stacks = [100, 100]\nactions = ["d dh p1 ????????", "d dh p2 ????????"]\n')
    engine = Engine(doc)
    state = engine.initial_state()
    for a in doc.actions:
        state = engine.apply(state, a)
    low, high = engine.bet_bounds(state, state.turn)
    assert (low, high) == (D(4), D(6))
    with pytest.raises(RuleViolation) as info:
        engine.apply(state, CompleteBetRaiseTo(player=state.turn + 1, amount=Money.parse("7")), Strictness.STRICT)
    assert info.value.code == "AboveCap"


def test_functional_steps_match_replay(golden):
    state = initial_state(golden, Strictness.STRICT)
    for action in golden.actions:
        state, diags = apply_action(state, action, golden, Strictness.STRICT)
        assert diags == []
    assert state.finishing == replay(golden).final.finishing


def test_player_out_of_range_always_raises():
    doc = nt()
    with pytest.raises(PHHError):
        apply_action(initial_state(doc), read_action("p7 f"), doc, Strictness.SILENT)


def test_every_variant_has_a_plan():
    assert set(STREET_PLANS) == set(Variant)
    hole = {v: sum(len(s.hole) for s in STREET_PLANS[v]) for v in Variant}
    assert hole[Variant.NT] == 2 and hole[Variant.PO] == 4 and hole[Variant.F7S] == 7
    assert hole[Variant.F2L3D] == 5 and hole[Variant.FB] == 4


@pytest.mark.parametrize("path", [p for p in FIXTURES if b"finishing_stacks" in p.read_bytes()],
                         ids=lambda p: p.stem)
def test_fixture_finishing_stacks(path):
    doc = parse_document(path.read_bytes()).document
    result = replay(doc, Strictness.STRICT)
    assert result.diagnostics == []
    assert [m.value for m in result.finishing_stacks()] == [m.value for m in doc.finishing_stacks]


def _generated(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        text, variant = generate_hand(rng)
        yield loads(text, "lenient"), text


def test_generated_hands_conserve_chips():
    for doc, _ in _generated(150, 21):
        result = replay(doc, Strictness.STRICT)
        total = result.snapshots[0].known_chip_total()
        pot = D(0)
        for state in result.snapshots:
            if total is not None:
                assert state.known_chip_total() == total
            if not state.terminal:
                # live bets may shrink when an uncalled bet goes back; settled pots never do
                current = sum(state.collected, D(0))
                assert current >= pot
                pot = current
        if result.terminal and total is not None:
            start = [s.value for s in doc.starting_stacks]
            assert sum(f - s for f, s in zip(result.final.finishing, start)) == 0


def test_replay_is_deterministic():
    for doc, text in _generated(40, 5):
        assert replay(doc).dumps() == replay(loads(text, "lenient")).dumps()


def test_fixed_limit_tiers():
    limited = {Variant.FT, Variant.FO8, Variant.F2L3D, Variant.FB}
    rng = random.Random(77)
    checked = 0
    while checked < 60:
        text, variant = generate_hand(rng, rng.choice(sorted(limited, key=str)))
        doc = loads(text, "lenient")
        result = replay(doc, Strictness.STRICT)
        for action, before in zip(doc.actions, result.snapshots):
            if not isinstance(action, CompleteBetRaiseTo):
                continue
            p = action.player - 1
            if before.stacks[p] is not None and action.amount.value >= before.stacks[p] + before.bets[p]:
                continue  # all in
            street = before.plan[before.street]
            unit = doc.big_bet.value if street.big_tier else doc.small_bet.value
            assert action.amount.value % unit == 0
            assert action.amount.value - before.max_bet <= unit
        checked += 1


def test_snapshot_records(golden):
    records = replay(golden).records()
    assert records[0]["step"] == 0 and records[-1]["terminal"]
    assert records[-1]["stacks"] == ["0", "4190000", "5910000", "12095000"]
    assert records[9]["pots"][0] == {"amount": "1050000", "eligible": [1, 4]}
    assert records[-1]["phase"] == Phase.TERMINAL.value
