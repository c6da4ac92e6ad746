"""Shared fixtures and builders for the fenrank test suite."""

from __future__ import annotations

from datetime import datetime, timedelta

import pytest

from fenrank.fen import FenRecord, parse_fen
from fenrank.rng import SplitMix64, derive_stream
from fenrank.store import CompositionRecord, Label, PreferenceDb
from fenrank.synth import board_to_fen, mutate, random_base

# Two aligned study positions; they differ only in piece placement, so their
# padded buffers line up byte for byte.
FEN_A = "3Q4/1p4kp/1q2p1p1/4Pp2/p1P2P2/P5PK/1P5P/8 b - - 0 1"
FEN_B = "6k1/1p1r2pp/p1q2p2/3p4/1P6/P1PQ3P/5PP1/3R2K1 w - - 0 1"

# Consecutive study-list compositions with a hand-counted byte diff; the
# frozen change value for this pair is 30 quanta (see test_fen).
ORACLE_FEN_1 = "8/8/2Q5/1b6/1r6/5B2/k1N5/2K5 w - - 0 1"
ORACLE_FEN_2 = "8/5K1k/8/8/7N/1p6/8/B7 w - - 0 1"

EPOCH = datetime(2021, 3, 1)


def make_record(fen_text: str, ordinal: int, minutes: int | None = None) -> CompositionRecord:
    when = None if minutes is None else EPOCH + timedelta(minutes=minutes)
    return CompositionRecord(fen=parse_fen(fen_text), generated_at=when, source_ordinal=ordinal)


def make_db(label: Label, fen_texts: list[str], *, step: int = 10) -> PreferenceDb:
    records = tuple(
        make_record(text, ordinal=i, minutes=i * step) for i, text in enumerate(fen_texts)
    )
    return PreferenceDb(label=label, records=records)


def synth_fens(seed: int, count: int, *, depth: tuple[int, int] = (2, 12)) -> list[str]:
    """Distinct mutated FENs sharing one base board, aligned for byte diffs."""
    rng = derive_stream(seed, 0)
    base = random_base(rng, extra_pieces=22)
    seen: set[str] = set()
    out: list[str] = []
    while len(out) < count:
        board = mutate(base, rng, rng.randint(depth[0], depth[1]))
        text = board_to_fen(board)
        if text in seen:
            continue
        seen.add(text)
        out.append(text)
    return out


@pytest.fixture
def fen_pair() -> tuple[FenRecord, FenRecord]:
    return parse_fen(FEN_A), parse_fen(FEN_B)


@pytest.fixture
def small_dbs() -> tuple[PreferenceDb, PreferenceDb]:
    liked = make_db(Label.LIKED, synth_fens(101, 12))
    disliked = make_db(Label.DISLIKED, synth_fens(202, 15))
    return liked, disliked


@pytest.fixture
def rng() -> SplitMix64:
    return SplitMix64(0xDEADBEEF)
