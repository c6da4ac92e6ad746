"""Ordered preference databases and their on-disk form.

A preference database is a chronologically ordered sequence of positions a
single user liked or disliked. Order is the learning signal, so it is an
invariant here: records sort by timestamp, undated records after dated
ones, ties broken by source ordinal.

On disk a store directory holds one PGN file per label plus a TSV sidecar
carrying the ordering metadata:

    <root>/liked.pgn      games with SetUp/FEN tag pairs
    <root>/liked.tsv      ordinal <TAB> iso-timestamp-or-dash <TAB> fen <TAB> label
    <root>/disliked.pgn
    <root>/disliked.tsv

The PGN is authoritative for position content, the sidecar for ordering.
Writes go through a temp file and os.replace so a crash never leaves a
half-written database.
"""
from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterator, Mapping

from .fen import FenError, FenRecord, parse_fen


class StoreError(Exception):
    """Base class for database and persistence failures."""


class NoUsableGames(StoreError):
    """A PGN source contained no game with a valid FEN tag."""


class DuplicateFen(StoreError):
    """The same FEN text appears twice within one database."""


class HoldoutTooLarge(StoreError):
    """A holdout split was asked for more records than the database holds."""


class StoreCorrupt(StoreError):
    """PGN and sidecar disagree, or a persisted file fails validation."""


class Label(enum.Enum):
    LIKED = "liked"
    DISLIKED = "disliked"

    @classmethod
    def from_string(cls, value: str) -> "Label":
        try:
            return cls(value.lower())
        except ValueError:
            raise StoreError(f"unknown label {value!r}") from None


@dataclass(frozen=True)
class CompositionRecord:
    """One position with its provenance.

    ``generated_at`` is None for undated records. ``source_ordinal`` is
    the record's position in its source file and must be unique within a
    database. ``meta`` carries verbatim PGN tags that are not consumed by
    the store itself.
    """

    fen: FenRecord
    generated_at: datetime | None
    source_ordinal: int
    meta: Mapping[str, str] = field(default_factory=dict)


def record_sort_key(record: CompositionRecord) -> tuple:
    undated = record.generated_at is None
    return (undated, record.generated_at or datetime.min, record.source_ordinal)


@dataclass(frozen=True)
class PreferenceDb:
    """Chronologically ordered records under one label."""

    label: Label
    records: tuple[CompositionRecord, ...]

    def __post_init__(self):
        keys = [record_sort_key(r) for r in self.records]
        if any(a > b for a, b in zip(keys, keys[1:])):
            raise StoreError("records out of chronological order")
        ordinals = [r.source_ordinal for r in self.records]
        if len(set(ordinals)) != len(ordinals):
            raise StoreError("duplicate source ordinals")
        texts = [r.fen.text for r in self.records]
        if len(set(texts)) != len(texts):
            raise DuplicateFen(f"duplicate FEN within {self.label.value} database")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[CompositionRecord]:
        return iter(self.records)

    def fens(self) -> tuple[FenRecord, ...]:
        return tuple(r.fen for r in self.records)

    def fen_texts(self) -> frozenset[str]:
        return frozenset(r.fen.text for r in self.records)


@dataclass(frozen=True)
class IngestResult:
    db: PreferenceDb
    ingested: int
    skipped_no_fen: int
    skipped_invalid: int
    skipped_duplicate: int


_TAG_RE = re.compile(r'^\[([A-Za-z0-9_]+)\s+"(.*)"\]\s*$')
# Tags the store consumes; everything else round-trips through record.meta.
_CONSUMED_TAGS = ("FEN", "SetUp", "Date", "Time", "UTCTime")


def _unescape(value: str) -> str:
    return value.replace('\\"', '"').replace("\\\\", "\\")


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def iter_pgn_games(text: str) -> Iterator[dict[str, str]]:
    """Yield the tag mapping of each game in a PGN text.

    Movetext is skipped; a tag line after movetext starts the next game.
    """
    tags: dict[str, str] = {}
    in_movetext = False
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            if tags:
                in_movetext = True
            continue
        match = _TAG_RE.match(stripped)
        if match:
            if in_movetext and tags:
                yield tags
                tags = {}
                in_movetext = False
            tags[match.group(1)] = _unescape(match.group(2))
        elif tags:
            in_movetext = True
    if tags:
        yield tags


def parse_timestamp(tags: Mapping[str, str]) -> datetime | None:
    """Timestamp from Date plus optional Time/UTCTime; '?' means unknown."""
    date = tags.get("Date")
    if not date or "?" in date:
        return None
    try:
        stamp = datetime.strptime(date, "%Y.%m.%d")
    except ValueError:
        return None
    clock = tags.get("Time") or tags.get("UTCTime")
    if clock and "?" not in clock:
        try:
            stamp = datetime.combine(
                stamp.date(), datetime.strptime(clock, "%H:%M:%S").time()
            )
        except ValueError:
            pass
    return stamp


def records_from_pgn(text: str, label: Label) -> IngestResult:
    """Build a database from PGN text, skipping unusable games."""
    records: list[CompositionRecord] = []
    seen: set[str] = set()
    skipped_no_fen = 0
    skipped_invalid = 0
    skipped_duplicate = 0
    for ordinal, tags in enumerate(iter_pgn_games(text)):
        fen_text = tags.get("FEN")
        if fen_text is None:
            skipped_no_fen += 1
            continue
        try:
            fen = parse_fen(fen_text)
        except FenError:
            skipped_invalid += 1
            continue
        if fen.text in seen:
            skipped_duplicate += 1
            continue
        seen.add(fen.text)
        meta = {k: v for k, v in tags.items() if k not in _CONSUMED_TAGS}
        records.append(
            CompositionRecord(
                fen=fen,
                generated_at=parse_timestamp(tags),
                source_ordinal=ordinal,
                meta=meta,
            )
        )
    if not records:
        raise NoUsableGames(f"no usable games for {label.value} database")
    ordered = tuple(sorted(records, key=record_sort_key))
    return IngestResult(
        db=PreferenceDb(label=label, records=ordered),
        ingested=len(records),
        skipped_no_fen=skipped_no_fen,
        skipped_invalid=skipped_invalid,
        skipped_duplicate=skipped_duplicate,
    )


def ingest_pgn(path: str | Path, label: Label) -> IngestResult:
    text = Path(path).read_text(encoding="utf-8", errors="replace")
    return records_from_pgn(text, label)


def truncate_before(db: PreferenceDb, cutoff: datetime) -> PreferenceDb:
    """Keep the prefix of records dated strictly before ``cutoff``.

    Undated records sort after all dated ones and are never part of the
    prefix.
    """
    kept = tuple(
        r for r in db.records if r.generated_at is not None and r.generated_at < cutoff
    )
    return PreferenceDb(label=db.label, records=kept)


def split_holdout(db: PreferenceDb, n: int) -> tuple[PreferenceDb, list[FenRecord]]:
    """Split off the newest ``n`` records as a holdout.

    Returns the remaining database and the held-out FENs in chronological
    order. n = 0 returns the database unchanged and an empty holdout.
    """
    train, held = split_holdout_records(db, n)
    return train, [r.fen for r in held]


def split_holdout_records(
    db: PreferenceDb, n: int
) -> tuple[PreferenceDb, tuple[CompositionRecord, ...]]:
    if n < 0:
        raise HoldoutTooLarge(f"holdout size must be non-negative, got {n}")
    if n >= len(db.records):
        raise HoldoutTooLarge(
            f"holdout of {n} leaves no training data in a database of {len(db.records)}"
        )
    if n == 0:
        return db, ()
    train = PreferenceDb(label=db.label, records=db.records[:-n])
    return train, db.records[-n:]


def _record_to_pgn(record: CompositionRecord) -> str:
    lines = []
    if record.generated_at is not None:
        lines.append(f'[Date "{record.generated_at.strftime("%Y.%m.%d")}"]')
        lines.append(f'[Time "{record.generated_at.strftime("%H:%M:%S")}"]')
    else:
        lines.append('[Date "????.??.??"]')
    lines.append('[SetUp "1"]')
    lines.append(f'[FEN "{_escape(record.fen.text)}"]')
    for key in sorted(record.meta):
        lines.append(f'[{key} "{_escape(record.meta[key])}"]')
    terminator = record.meta.get("Result", "*")
    return "\n".join(lines) + "\n\n" + terminator + "\n"


def _record_to_tsv(record: CompositionRecord, label: Label) -> str:
    stamp = record.generated_at.isoformat() if record.generated_at else "-"
    return f"{record.source_ordinal}\t{stamp}\t{record.fen.text}\t{label.value}"


class Store:
    """Directory-backed persistence for the liked/disliked pair."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def pgn_path(self, label: Label) -> Path:
        return self.root / f"{label.value}.pgn"

    def tsv_path(self, label: Label) -> Path:
        return self.root / f"{label.value}.tsv"

    def exists(self, label: Label) -> bool:
        return self.pgn_path(label).exists() and self.tsv_path(label).exists()

    def save(self, db: PreferenceDb) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        pgn = "\n".join(_record_to_pgn(r) for r in db.records)
        tsv = "\n".join(_record_to_tsv(r, db.label) for r in db.records)
        if tsv:
            tsv += "\n"
        _atomic_write(self.pgn_path(db.label), pgn)
        _atomic_write(self.tsv_path(db.label), tsv)

    def load(self, label: Label) -> PreferenceDb:
        if not self.exists(label):
            raise FileNotFoundError(
                f"no {label.value} database under {self.root}"
            )
        games = list(iter_pgn_games(self.pgn_path(label).read_text(encoding="utf-8")))
        rows = [
            line.split("\t")
            for line in self.tsv_path(label).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        if len(games) != len(rows):
            raise StoreCorrupt(
                f"{label.value}: {len(games)} games but {len(rows)} sidecar rows"
            )
        records = []
        for tags, row in zip(games, rows):
            if len(row) != 4:
                raise StoreCorrupt(f"{label.value}: bad sidecar row {row!r}")
            ordinal_s, stamp_s, fen_text, row_label = row
            if row_label != label.value:
                raise StoreCorrupt(f"{label.value}: sidecar row labeled {row_label!r}")
            try:
                fen = parse_fen(tags.get("FEN", ""))
            except FenError as exc:
                raise StoreCorrupt(f"{label.value}: bad stored FEN: {exc}") from exc
            if fen.text != fen_text:
                raise StoreCorrupt(
                    f"{label.value}: PGN and sidecar disagree on record {ordinal_s}"
                )
            stamp = None if stamp_s == "-" else datetime.fromisoformat(stamp_s)
            meta = {k: v for k, v in tags.items() if k not in _CONSUMED_TAGS}
            records.append(
                CompositionRecord(
                    fen=fen,
                    generated_at=stamp,
                    source_ordinal=int(ordinal_s),
                    meta=meta,
                )
            )
        return PreferenceDb(label=label, records=tuple(records))

    def ingest_file(self, path: str | Path, label: Label) -> IngestResult:
        """Ingest a PGN file, merging into any existing database.

        New records keep their relative file order; their ordinals are
        offset past the existing ones so ordinals stay unique. Records
        whose FEN already exists under this label are skipped.
        """
        result = ingest_pgn(path, label)
        if not self.exists(label):
            self.save(result.db)
            return result
        existing = self.load(label)
        known = existing.fen_texts()
        offset = max((r.source_ordinal for r in existing.records), default=-1) + 1
        fresh = []
        duplicates = result.skipped_duplicate
        for record in result.db.records:
            if record.fen.text in known:
                duplicates += 1
                continue
            fresh.append(
                CompositionRecord(
                    fen=record.fen,
                    generated_at=record.generated_at,
                    source_ordinal=record.source_ordinal + offset,
                    meta=record.meta,
                )
            )
        merged = PreferenceDb(
            label=label,
            records=tuple(sorted(existing.records + tuple(fresh), key=record_sort_key)),
        )
        self.save(merged)
        return IngestResult(
            db=merged,
            ingested=len(fresh),
            skipped_no_fen=result.skipped_no_fen,
            skipped_invalid=result.skipped_invalid,
            skipped_duplicate=duplicates,
        )

    def append_verdict(
        self, db: PreferenceDb, record: CompositionRecord
    ) -> PreferenceDb:
        """Insert one verdict record at its chronological position and persist.

        The write is atomic and durable before this returns; the caller
        may acknowledge the verdict once it does.
        """
        if record.fen.text in db.fen_texts():
            raise DuplicateFen(f"{record.fen.text!r} already in {db.label.value}")
        updated = PreferenceDb(
            label=db.label,
            records=tuple(sorted(db.records + (record,), key=record_sort_key)),
        )
        self.save(updated)
        return updated

    def load_pair(self) -> tuple[PreferenceDb, PreferenceDb, list[str]]:
        """Load both databases, resolving any FEN present in both.

        The record with the newer timestamp wins; an undated record loses
        to a dated one. On a full tie the liked side wins. Each resolution
        produces a warning string.
        """
        liked = self.load(Label.LIKED)
        disliked = self.load(Label.DISLIKED)
        overlap = liked.fen_texts() & disliked.fen_texts()
        if not overlap:
            return liked, disliked, []
        warnings = []
        liked_by_text = {r.fen.text: r for r in liked.records}
        disliked_by_text = {r.fen.text: r for r in disliked.records}
        drop_liked: set[str] = set()
        drop_disliked: set[str] = set()
        for text in sorted(overlap):
            l_rec = liked_by_text[text]
            d_rec = disliked_by_text[text]
            l_stamp = l_rec.generated_at or datetime.min
            d_stamp = d_rec.generated_at or datetime.min
            if d_stamp > l_stamp:
                drop_liked.add(text)
                winner = Label.DISLIKED
            else:
                drop_disliked.add(text)
                winner = Label.LIKED
            warnings.append(
                f"{text!r} appears in both databases; keeping the {winner.value} verdict"
            )
        if drop_liked:
            liked = PreferenceDb(
                label=Label.LIKED,
                records=tuple(r for r in liked.records if r.fen.text not in drop_liked),
            )
        if drop_disliked:
            disliked = PreferenceDb(
                label=Label.DISLIKED,
                records=tuple(
                    r for r in disliked.records if r.fen.text not in drop_disliked
                ),
            )
        return liked, disliked, warnings


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(data)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)
    # Make the rename itself durable.
    dir_fd = os.open(path.parent, os.O_RDONLY)
    try:
        os.fsync(dir_fd)
    finally:
        os.close(dir_fd)
