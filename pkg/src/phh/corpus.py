"""Corpus-level measurements: file size statistics and parser throughput."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from phh.actions import Policy
from phh.conformance import validate_positions
from phh.document import parse_document
from phh.engine import Strictness, replay


@dataclass(frozen=True)
class FileCounts:
    name: str
    newlines: int
    words: int
    bytes: int


def count_bytes(data: bytes, name: str = "-") -> FileCounts:
    """Counts as ``wc`` gives them: newline characters, whitespace-delimited words, bytes."""
    return FileCounts(name, data.count(b"\n"), len(data.split()), len(data))


@dataclass
class CorpusStats:
    per_file: list[FileCounts] = field(default_factory=list)

    @property
    def files(self) -> int:
        return len(self.per_file)

    def _mean(self, attr: str) -> Fraction:
        if not self.per_file:
            return Fraction(0)
        return Fraction(sum(getattr(c, attr) for c in self.per_file), len(self.per_file))

    @property
    def newlines(self) -> Fraction:
        return self._mean("newlines")

    @property
    def words(self) -> Fraction:
        return self._mean("words")

    @property
    def bytes(self) -> Fraction:
        return self._mean("bytes")

    def to_dict(self) -> dict:
        return {
            "files": self.files,
            "newlines": float(self.newlines),
            "words": float(self.words),
            "bytes": float(self.bytes),
            "per_file": [vars(c) for c in self.per_file],
        }


def corpus_stats(items: Iterable[tuple[str, bytes]]) -> CorpusStats:
    return CorpusStats([count_bytes(data, name) for name, data in items])


@dataclass
class BenchResult:
    hands: int
    seconds: float
    repeat: int = 1
    round_seconds: list[float] = field(default_factory=list)
    replay_seconds: Optional[float] = None

    @property
    def throughput(self) -> float:
        return self.hands / self.seconds if self.seconds > 0 else float("inf")

    @property
    def ms_per_hand(self) -> float:
        return 1000 * self.seconds / self.hands if self.hands else 0.0

    def to_dict(self) -> dict:
        out = {
            "hands": self.hands,
            "seconds": self.seconds,
            "hands_per_second": self.throughput,
            "ms_per_hand": self.ms_per_hand,
            "repeat": self.repeat,
            "round_seconds": list(self.round_seconds),
        }
        if self.replay_seconds is not None:
            out["replay_seconds"] = self.replay_seconds
        return out


def parse_and_validate(data: bytes, policy: Policy = Policy.STRICT) -> bool:
    parsed = parse_document(data, policy)
    if not parsed.ok:
        return False
    return not any(d.is_error for d in validate_positions(parsed.document))


def _work(chunk: Sequence[bytes]) -> int:
    return sum(parse_and_validate(data) for data in chunk)


def _replay_all(corpus: Sequence[bytes]) -> None:
    for data in corpus:
        replay(parse_document(data).document, Strictness.SILENT)


def bench(corpus: Sequence[bytes], repeat: int = 1, with_replay: bool = False,
          parallel: int = 1) -> BenchResult:
    """Time parse plus validation over an in-memory corpus.

    ``corpus`` must already be loaded; nothing here touches the disk. Engine
    time is measured separately when ``with_replay`` is set.
    """
    repeat = max(1, repeat)
    rounds = []
    pool = ProcessPoolExecutor(parallel) if parallel > 1 else None
    try:
        for _ in range(repeat):
            start = time.perf_counter()
            if pool is None:
                for data in corpus:
                    parse_and_validate(data)
            else:
                size = max(1, len(corpus) // (parallel * 4))
                chunks = [corpus[i:i + size] for i in range(0, len(corpus), size)]
                list(pool.map(_work, chunks))
            rounds.append(time.perf_counter() - start)
    finally:
        if pool is not None:
            pool.shutdown()
    result = BenchResult(len(corpus) * repeat, sum(rounds), repeat, rounds)
    if with_replay:
        start = time.perf_counter()
        for _ in range(repeat):
            _replay_all(corpus)
        result.replay_seconds = time.perf_counter() - start
    return result


def default_workers() -> int:
    return os.cpu_count() or 1
