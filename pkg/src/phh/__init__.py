"""Poker hand history (``.phh``) files: parsing, validation, replay and tools."""

from phh.actions import (
    Action, CheckCall, CompleteBetRaiseTo, DealBoard, DealHole, Disclosure, Fold, NoOp, Policy,
    PostBringIn, ShowMuck, StandPatDiscard, parse_action, read_action, serialize_action,
)
from phh.conformance import ConformanceReport, StackCheck, Verdict, check, round_trip, validate_positions
from phh.core import Card, Money, Rank, Suit, Variant, parse_card, parse_cards, serialize_cards
from phh.diagnostics import Diagnostic, DocumentError, PHHError, RuleViolation, Severity
from phh.document import HandDocument, Style, load, loads, parse_document, serialize_document
from phh.engine import GameState, Strictness, apply_action, finishing_stacks, initial_state, replay
from phh.evaluation import Comparison, EvaluatedStrength, EvaluationOrder, compare, evaluate

__version__ = "0.1.0"
