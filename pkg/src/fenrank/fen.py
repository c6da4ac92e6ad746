"""FEN parsing, validation, and the byte-level change metric.

Positions are compared on their raw FEN text laid into a fixed 128-byte
buffer padded with spaces. The change value (CV) between two positions is
the percentage of byte positions that differ, so every CV is an integer
multiple of 100/128 = 0.78125. Comparing text rather than board structure
is deliberate: the metric is cheap, total, and sensitive to every encoded
detail of a position.
"""
from __future__ import annotations

from dataclasses import dataclass

BUFFER_LEN = 128
FILL_CHAR = " "
CV_QUANTUM = 100.0 / BUFFER_LEN

_PIECES = frozenset("pnbrqkPNBRQK")
_DIGITS = frozenset("12345678")
_FILES = "abcdefgh"


class FenError(ValueError):
    """Base class for FEN validation failures."""


class MalformedFen(FenError):
    """Structurally invalid FEN text."""


class IllegalPosition(FenError):
    """Well-formed FEN describing an unusable position (bad king count)."""


class FenTooLong(FenError):
    """FEN text does not fit the 128-byte comparison buffer."""


@dataclass(frozen=True)
class FenRecord:
    """A validated position.

    ``text`` is the original FEN with surrounding whitespace stripped;
    it is the comparison basis, so two records with different text are
    different positions even when the boards agree. ``board`` holds the
    expanded placement as eight ranks from rank 8 down to rank 1, each a
    tuple of eight piece letters with "" for an empty square.
    """

    text: str
    board: tuple[tuple[str, ...], ...]
    side_to_move: str
    castling: str
    en_passant: str
    halfmove: int
    fullmove: int

    def squares(self) -> tuple[str, ...]:
        """Flatten the board in reading order: a8..h8 first, a1..h1 last."""
        return tuple(piece for rank in self.board for piece in rank)

    def piece_count(self) -> int:
        return sum(1 for sq in self.squares() if sq)

    def normalized(self) -> str:
        """Re-serialize the parsed fields to canonical FEN text."""
        ranks = []
        for rank in self.board:
            out = []
            run = 0
            for sq in rank:
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
        return " ".join(
            (
                "/".join(ranks),
                self.side_to_move,
                self.castling,
                self.en_passant,
                str(self.halfmove),
                str(self.fullmove),
            )
        )


def _parse_placement(placement: str) -> tuple[tuple[str, ...], ...]:
    ranks = placement.split("/")
    if len(ranks) != 8:
        raise MalformedFen(f"expected 8 ranks, got {len(ranks)}")
    rows = []
    for index, rank in enumerate(ranks):
        row: list[str] = []
        prev_digit = False
        for ch in rank:
            if ch in _PIECES:
                row.append(ch)
                prev_digit = False
            elif ch in _DIGITS:
                # canonical FEN coalesces runs; "44" is never written for "8"
                if prev_digit:
                    raise MalformedFen(f"adjacent digits in rank {8 - index}")
                row.extend([""] * int(ch))
                prev_digit = True
            else:
                raise MalformedFen(f"illegal character {ch!r} in rank {8 - index}")
        if len(row) != 8:
            raise MalformedFen(f"rank {8 - index} spans {len(row)} squares, expected 8")
        rows.append(tuple(row))
    return tuple(rows)


def parse_fen(text: str) -> FenRecord:
    """Parse and validate a FEN string.

    Raises MalformedFen for structural problems and IllegalPosition when
    the placement does not contain exactly one king per side. Validation
    stops at plausibility; it does not check reachability or legality of
    the position beyond king counts.
    """
    if text is None or not text.strip():
        raise MalformedFen("empty FEN")
    stripped = text.strip()
    fields = stripped.split()
    if len(fields) != 6:
        raise MalformedFen(f"expected 6 fields, got {len(fields)}")
    placement, side, castling, en_passant, halfmove_s, fullmove_s = fields

    board = _parse_placement(placement)
    flat = [p for rank in board for p in rank]
    if flat.count("K") != 1 or flat.count("k") != 1:
        raise IllegalPosition(
            f"need exactly one king per side, got {flat.count('K')} white / {flat.count('k')} black"
        )

    if side not in ("w", "b"):
        raise MalformedFen(f"side to move must be 'w' or 'b', got {side!r}")

    if castling != "-":
        if not castling or any(ch not in "KQkq" for ch in castling):
            raise MalformedFen(f"bad castling field {castling!r}")
        if len(set(castling)) != len(castling):
            raise MalformedFen(f"repeated castling right in {castling!r}")

    if en_passant != "-":
        if len(en_passant) != 2 or en_passant[0] not in _FILES or en_passant[1] not in "36":
            raise MalformedFen(f"bad en passant square {en_passant!r}")

    if not halfmove_s.isdigit():
        raise MalformedFen(f"halfmove clock must be a non-negative integer, got {halfmove_s!r}")
    if not fullmove_s.isdigit() or int(fullmove_s) < 1:
        raise MalformedFen(f"fullmove number must be a positive integer, got {fullmove_s!r}")

    return FenRecord(
        text=stripped,
        board=board,
        side_to_move=side,
        castling=castling,
        en_passant=en_passant,
        halfmove=int(halfmove_s),
        fullmove=int(fullmove_s),
    )


def canonical_buffer(fen: FenRecord) -> bytes:
    """Lay the FEN text into the fixed comparison buffer.

    The text occupies the leading bytes; the remainder is space fill. The
    result always has length BUFFER_LEN.
    """
    raw = fen.text.encode("ascii")
    if len(raw) > BUFFER_LEN:
        raise FenTooLong(f"FEN is {len(raw)} bytes, buffer holds {BUFFER_LEN}")
    return raw.ljust(BUFFER_LEN, FILL_CHAR.encode("ascii"))


def change_value(a: FenRecord, b: FenRecord) -> float:
    """Percentage of buffer positions where the two encodings differ."""
    buf_a = canonical_buffer(a)
    buf_b = canonical_buffer(b)
    mismatches = sum(1 for x, y in zip(buf_a, buf_b) if x != y)
    return mismatches * CV_QUANTUM


def format_cv(cv: float) -> str:
    """Display form of a change value: three decimals, ties to even."""
    return f"{cv:.3f}"
