import itertools
import random

import pytest

import evalcheck
import oracles
from phh.core import Variant, parse_cards
from phh.diagnostics import EvaluationError
from phh.evaluation import Comparison, EvaluationOrder, compare, evaluate, evaluate_for_variant

O = EvaluationOrder


def ev(order, hole, board="", omaha=False):
    return evaluate(order, parse_cards(hole), parse_cards(board), omaha=omaha)


def test_deuce_seven_bad_beat():
    arieh, yockey = ev(O.DEUCE_TO_SEVEN_LOW, "2h4d7c5c3c"), ev(O.DEUCE_TO_SEVEN_LOW, "7h6c4c3d2c")
    assert arieh > yockey
    assert compare(arieh, yockey) is Comparison.A_GREATER
    assert oracles.best("deuce-to-seven-low", "2h4d7c5c3c") > oracles.best("deuce-to-seven-low", "7h6c4c3d2c")


def test_eight_low_needs_qualifier():
    assert ev(O.EIGHT_OR_BETTER_LOW, "9s7h5d3c2s") is None
    assert ev(O.EIGHT_OR_BETTER_LOW, "8s7h5d3c2s").category == "8-low"


def test_badugi_best():
    top = ev(O.BADUGI, "As2c3d4h")
    assert top.category == "4-card badugi"
    assert oracles.best("badugi", "As2c3d4h") == (4, (-4, -3, -2, -1))
    rng = random.Random(3)
    for _ in range(3000):
        assert ev(O.BADUGI, "".join(rng.sample(evalcheck.FULL, 4))) <= top


def test_royal_flush_is_best():
    royal = ev(O.STANDARD_HIGH, "AsKsQsJsTs")
    assert royal.category == "straight flush"
    rng = random.Random(5)
    for _ in range(3000):
        other = ev(O.STANDARD_HIGH, "".join(rng.sample(evalcheck.FULL, 5)))
        assert other <= royal


def test_wheel_is_best_ace_five():
    wheel = ev(O.ACE_TO_FIVE_LOW, "Ah2c3d4s5h")
    assert ev(O.ACE_TO_FIVE_LOW, "Ah2h3h4h5h") == wheel
    rng = random.Random(9)
    for _ in range(3000):
        assert ev(O.ACE_TO_FIVE_LOW, "".join(rng.sample(evalcheck.FULL, 5))) <= wheel


def test_compare_examples():
    assert compare(ev(O.STANDARD_HIGH, "AsAd7c5h2s"), ev(O.STANDARD_HIGH, "KsKd7c5h2s")) is Comparison.A_GREATER
    assert compare(ev(O.STANDARD_HIGH, "AsKd7c5h2s"), ev(O.STANDARD_HIGH, "AhKc7d5s2h")) is Comparison.EQUAL


def test_short_deck_rules():
    flush, boat = ev(O.SHORT_DECK_HIGH, "As9s8s7sJs"), ev(O.SHORT_DECK_HIGH, "AsAdAc7s7d")
    assert flush > boat
    assert ev(O.SHORT_DECK_HIGH, "As6d7c8h9s").category == "straight"
    assert ev(O.STANDARD_HIGH, "As9s8s7sJs") < ev(O.STANDARD_HIGH, "AsAdAc7s7d")


def test_omaha_uses_two_hole_cards():
    # four spades in hand but only one on board: no flush in Omaha
    hole, board = "AsKsQsJs", "2s3h4d8c9h"
    assert ev(O.STANDARD_HIGH, hole, board, omaha=True).category == "high card"
    assert ev(O.STANDARD_HIGH, hole, board).category == "flush"


def test_cross_order_comparison_is_an_error():
    with pytest.raises(EvaluationError):
        compare(ev(O.STANDARD_HIGH, "AsKd7c5h2s"), ev(O.DEUCE_TO_SEVEN_LOW, "AsKd7c5h2s"))


@pytest.mark.parametrize("hole, code", [("As??7c5h2s", "UnknownCardInShowdown"), ("AsAs7c5h2s", "DuplicateCard"),
                                        ("AsKd", "WrongCardCount")])
def test_bad_input(hole, code):
    with pytest.raises(EvaluationError) as info:
        ev(O.STANDARD_HIGH, hole)
    assert info.value.code == code


def test_variant_orders():
    high, low = evaluate_for_variant(Variant.FO8, parse_cards("As2d9c9h"), parse_cards("3s4d5cKhQh"))
    assert high.order is O.STANDARD_HIGH and low.category == "5-low"
    high, low = evaluate_for_variant(Variant.N2L1D, parse_cards("7h6c4c3d2c"))
    assert high.order is O.DEUCE_TO_SEVEN_LOW and low is None


@pytest.mark.parametrize("order", evalcheck.ORDERS)
def test_oracle_agreement_sample(order):
    deals, problems = evalcheck.check_order(order, 1500, seed=11)
    assert problems == []


@pytest.mark.parametrize("order", evalcheck.ORDERS)
def test_total_order_laws(order):
    rng = random.Random(order)
    hands = []
    while len(hands) < 60:
        hole, board, omaha = evalcheck.random_deal(rng, order)
        strength = ev(order, hole, board, omaha)
        if strength is not None:
            hands.append(strength)
    for a, b, c in itertools.product(hands[:25], repeat=3):
        ab, ba = compare(a, b), compare(b, a)
        assert ab == -ba
        assert (ab is Comparison.EQUAL) == (a == b)
        if ab >= 0 and compare(b, c) >= 0:
            assert compare(a, c) >= 0


@pytest.mark.parametrize("order", evalcheck.ORDERS)
def test_input_order_and_suit_invariance(order):
    rng = random.Random("inv" + order)
    for _ in range(300):
        hole, board, omaha = evalcheck.random_deal(rng, order)
        base = ev(order, hole, board, omaha)
        h, b = oracles.split(hole), oracles.split(board)
        rng.shuffle(h)
        rng.shuffle(b)
        assert ev(order, "".join(r + s for r, s in h), "".join(r + s for r, s in b), omaha) == base
        # relabelling suits consistently never changes strength
        mapping = dict(zip("cdhs", rng.sample("cdhs", 4)))
        relabel = lambda cs: "".join(r + mapping[s] for r, s in cs)  # noqa: E731
        assert ev(order, relabel(h), relabel(b), omaha) == base
