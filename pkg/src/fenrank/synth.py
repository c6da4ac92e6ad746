"""Synthetic preference stores for demos and end-to-end checks.

Both streams are independent mutations of one base layout. A mutation
only swaps the identity of an occupied non-king square, never its
occupancy, so every generated FEN has the same length and the byte
buffers stay aligned; the CV between two variants is then essentially
the number of squares where their mutation sets disagree. Liked records
mutate at a shallower depth than disliked records, which separates the
two CV distributions by a small margin while leaving the paired tests
near the significance boundary, where substitution flips are possible in
both directions.

Candidate positions come from the same construction: liked-like ones at
very shallow depth (their substituted CV pulls the liked chunk mean
down), disliked-like ones deeper than the disliked stream (pushing it
up).
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from .fen import FenRecord, parse_fen
from .rng import SplitMix64, derive_stream
from .store import CompositionRecord, Label, PreferenceDb, Store

_PIECE_POOL = "QRBNqrbn"
_EPOCH = datetime(2021, 3, 1)


@dataclass(frozen=True)
class SynthConfig:
    liked_size: int = 520
    disliked_size: int = 560
    extra_pieces: int = 22
    liked_depth: tuple[int, int] = (2, 12)
    disliked_depth: tuple[int, int] = (3, 13)
    liked_candidate_depth: tuple[int, int] = (1, 3)
    disliked_candidate_depth: tuple[int, int] = (14, 18)
    candidates_per_side: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.liked_size < 1 or self.disliked_size < 1:
            raise ValueError("database sizes must be at least 1")
        if not 0 <= self.extra_pieces <= 62:
            raise ValueError("extra_pieces must fit on the board beside two kings")
        if self.candidates_per_side < 0:
            raise ValueError("candidates_per_side must be non-negative")
        for lo, hi in (
            self.liked_depth,
            self.disliked_depth,
            self.liked_candidate_depth,
            self.disliked_candidate_depth,
        ):
            if not 1 <= lo <= hi:
                raise ValueError(f"bad depth range ({lo}, {hi})")


@dataclass(frozen=True)
class SynthResult:
    liked: PreferenceDb
    disliked: PreferenceDb
    liked_candidates: tuple[FenRecord, ...]
    disliked_candidates: tuple[FenRecord, ...]


def board_to_fen(board: list[str], side: str = "w") -> str:
    """Serialize a 64-square list (a8..h1 reading order) to FEN text."""
    ranks = []
    for r in range(8):
        out = []
        run = 0
        for sq in board[r * 8 : (r + 1) * 8]:
            if sq:
                if run:
                    out.append(str(run))
                    run = 0
                out.append(sq)
            else:
                run += 1
        if run:
            out.append(str(run))
        ranks.append("".join(out))
    return "/".join(ranks) + f" {side} - - 0 1"


def random_base(rng: SplitMix64, extra_pieces: int) -> list[str]:
    """A base layout: two kings plus ``extra_pieces`` random pieces."""
    board = [""] * 64
    white_king = rng.randint(0, 63)
    board[white_king] = "K"
    while True:
        black_king = rng.randint(0, 63)
        if not board[black_king]:
            break
    board[black_king] = "k"
    placed = 0
    while placed < extra_pieces:
        square = rng.randint(0, 63)
        if board[square]:
            continue
        board[square] = _PIECE_POOL[rng.randint(0, len(_PIECE_POOL) - 1)]
        placed += 1
    return board


def mutate(base: list[str], rng: SplitMix64, depth: int) -> list[str]:
    """Swap piece identity on ``depth`` distinct occupied non-king squares."""
    board = list(base)
    occupied = [i for i, sq in enumerate(board) if sq and sq not in "Kk"]
    depth = min(depth, len(occupied))
    for pick in rng.sample_indices(len(occupied), depth):
        square = occupied[pick]
        choices = [p for p in _PIECE_POOL if p != board[square]]
        board[square] = choices[rng.randint(0, len(choices) - 1)]
    return board


def _fresh_variant(
    base: list[str],
    rng: SplitMix64,
    depth_range: tuple[int, int],
    seen: set[str],
) -> FenRecord:
    # Regenerate on text collision so databases never contain duplicates.
    while True:
        depth = rng.randint(depth_range[0], depth_range[1])
        text = board_to_fen(mutate(base, rng, depth))
        if text not in seen:
            seen.add(text)
            return parse_fen(text)


def _stream_records(
    base: list[str],
    rng: SplitMix64,
    count: int,
    depth_range: tuple[int, int],
    seen: set[str],
    minute_offset: int,
) -> tuple[CompositionRecord, ...]:
    records = []
    for i in range(count):
        fen = _fresh_variant(base, rng, depth_range, seen)
        stamp = _EPOCH + timedelta(minutes=10 * i + minute_offset)
        records.append(
            CompositionRecord(fen=fen, generated_at=stamp, source_ordinal=i, meta={})
        )
    return tuple(records)


def build_synthetic(config: SynthConfig = SynthConfig()) -> SynthResult:
    """Generate a liked/disliked store pair plus held-out candidates.

    Liked records sit at even 10-minute marks from a fixed epoch and
    disliked records 5 minutes after each, interleaving the streams so
    holdout cutoffs land inside both databases. All output is a pure
    function of the config.
    """
    base = random_base(derive_stream(config.seed, 0), config.extra_pieces)
    seen: set[str] = set()
    liked_records = _stream_records(
        base, derive_stream(config.seed, 1), config.liked_size, config.liked_depth, seen, 0
    )
    disliked_records = _stream_records(
        base,
        derive_stream(config.seed, 2),
        config.disliked_size,
        config.disliked_depth,
        seen,
        5,
    )
    cand_rng = derive_stream(config.seed, 3)
    liked_candidates = tuple(
        _fresh_variant(base, cand_rng, config.liked_candidate_depth, seen)
        for _ in range(config.candidates_per_side)
    )
    disliked_candidates = tuple(
        _fresh_variant(base, cand_rng, config.disliked_candidate_depth, seen)
        for _ in range(config.candidates_per_side)
    )
    return SynthResult(
        liked=PreferenceDb(label=Label.LIKED, records=liked_records),
        disliked=PreferenceDb(label=Label.DISLIKED, records=disliked_records),
        liked_candidates=liked_candidates,
        disliked_candidates=disliked_candidates,
    )


def install_stores(store: Store, config: SynthConfig = SynthConfig()) -> SynthResult:
    """Generate and persist a synthetic store pair."""
    result = build_synthetic(config)
    store.save(result.liked)
    store.save(result.disliked)
    return result
