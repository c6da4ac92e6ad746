"""Core ranking method: CV sequences, chunked paired t-tests, ARP scores.

Both databases are turned into global change-value sequences (first CV is
0 by definition). A scoring cycle at sample size s cuts each sequence
into floor(len/s) consecutive chunks, discarding the remainder. Every
liked chunk meets every disliked chunk twice: T1 compares the original
CVs, T2 repeats the comparison after the candidate FEN is substituted
into the liked chunk's last slot, its CV recomputed from the penultimate
FEN and the candidate. A flip from insignificant to significant counts
POS, the reverse counts NEG, anything else counts nothing. The cycle's
rank percentage is POS/(POS+NEG)*100, and the candidate's final score
(ARP) is the mean over several cycles run at randomly increasing sizes.

Scoring is deterministic: candidate i always draws from the RNG stream
derived from (config.seed, i), so results do not depend on worker count
or scheduling.
"""
from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .fen import FenRecord, change_value
from .rng import SplitMix64, derive_stream
from .stats import sample_moments, welch_stat
from .store import Label, PreferenceDb

Metric = Callable[[FenRecord, FenRecord], float]

# Reserved stream indexes; candidate ordinals occupy 0, 1, 2, ...
SHARED_SIZES_STREAM = -1
BASELINE_PICK_STREAM = -2


class EngineError(Exception):
    """Base class for ranking failures."""


class EmptyDatabase(EngineError):
    """A CV sequence needs at least one record."""


class NoChunks(EngineError):
    """A sequence is shorter than one chunk at the requested size."""


class DatabaseTooSmall(EngineError):
    """A database cannot support the configured chunk sizes."""


class ChunkSizeMismatch(EngineError):
    """Paired chunks must have the same sample size."""


class NoCandidates(EngineError):
    """Ranking needs at least one candidate."""


class Transition(enum.Enum):
    POS = "pos"
    NEG = "neg"
    NONE = "none"


@dataclass(frozen=True)
class CvSequence:
    """A database's FENs with their global change values, in order."""

    source_label: Label
    fens: tuple[FenRecord, ...]
    cvs: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.cvs)

    def entries(self) -> tuple[tuple[FenRecord, float], ...]:
        return tuple(zip(self.fens, self.cvs))


@dataclass(frozen=True)
class Chunk:
    """A contiguous slice of a CvSequence.

    The CVs are the global ones: a chunk's first CV links back to the
    record before the chunk (or is the database's leading 0), and nothing
    is recomputed at chunk boundaries.
    """

    start_index: int
    fens: tuple[FenRecord, ...]
    cvs: tuple[float, ...]


@dataclass(frozen=True)
class CycleConfig:
    """Knobs for one scoring run."""

    first_size_min: int = 30
    first_size_max: int = 40
    increment_min: int = 1
    increment_max: int = 10
    size_cap: int = 60
    cycles: int = 3
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.first_size_min <= self.first_size_max <= self.size_cap:
            raise ValueError(
                "need 2 <= first_size_min <= first_size_max <= size_cap, got "
                f"{self.first_size_min}/{self.first_size_max}/{self.size_cap}"
            )
        if self.increment_min < 0 or self.increment_min > self.increment_max:
            raise ValueError(
                f"bad increment range [{self.increment_min}, {self.increment_max}]"
            )
        if self.cycles < 1:
            raise ValueError(f"cycles must be >= 1, got {self.cycles}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class CycleResult:
    """Counts and rank percentage for one cycle.

    ``tests`` counts significance decisions (two per chunk pair), which
    equals 2 * floor(L/s) * floor(D/s).
    """

    sample_size: int
    pos: int
    neg: int
    rp: float
    neutral: bool
    tests: int


@dataclass(frozen=True)
class CandidateScore:
    fen: FenRecord
    cycles: tuple[CycleResult, ...]
    arp: float


def rank_percentage(pos: int, neg: int) -> tuple[float, bool]:
    """RP for one cycle plus the neutral flag (no transitions -> RP 50)."""
    if pos + neg == 0:
        return 50.0, True
    return pos / (pos + neg) * 100.0, False


def average_rank_percentage(rps: Sequence[float]) -> float:
    """ARP: the plain mean of the cycle rank percentages."""
    return sum(rps) / len(rps)


def build_cv_sequence(db: PreferenceDb, metric: Metric = change_value) -> CvSequence:
    """Compute the database's CV sequence once, globally, in order."""
    if len(db.records) == 0:
        raise EmptyDatabase(f"{db.label.value} database is empty")
    fens = db.fens()
    cvs = [0.0]
    for prev, cur in zip(fens, fens[1:]):
        cvs.append(metric(prev, cur))
    return CvSequence(source_label=db.label, fens=fens, cvs=tuple(cvs))


def partition_chunks(seq: CvSequence, s: int) -> list[Chunk]:
    """Consecutive non-overlapping chunks of size s; remainder discarded."""
    if s < 2:
        raise ValueError(f"sample size must be >= 2, got {s}")
    count = len(seq) // s
    if count == 0:
        raise NoChunks(
            f"{seq.source_label.value} sequence of {len(seq)} yields no chunk at size {s}"
        )
    return [
        Chunk(
            start_index=i * s,
            fens=seq.fens[i * s : (i + 1) * s],
            cvs=seq.cvs[i * s : (i + 1) * s],
        )
        for i in range(count)
    ]


def substitute_last(chunk: Chunk, new_fen: FenRecord, metric: Metric = change_value) -> list[float]:
    """CV list with the candidate in the last slot; the chunk is untouched.

    Only the final CV changes: it becomes the change value between the
    chunk's penultimate FEN and the candidate.
    """
    cvs = list(chunk.cvs)
    cvs[-1] = metric(chunk.fens[-2], new_fen)
    return cvs


def paired_test(
    ld_chunk: Chunk,
    dd_chunk: Chunk,
    new_fen: FenRecord,
    alpha: float = 0.05,
    metric: Metric = change_value,
) -> Transition:
    """T1/T2 on one chunk pair; POS, NEG, or NONE."""
    if len(ld_chunk.cvs) != len(dd_chunk.cvs):
        raise ChunkSizeMismatch(
            f"liked chunk of {len(ld_chunk.cvs)} vs disliked chunk of {len(dd_chunk.cvs)}"
        )
    n2, m2, v2 = sample_moments(dd_chunk.cvs)
    n1, m1, v1 = sample_moments(ld_chunk.cvs)
    t1_sig = welch_stat(n1, m1, v1, n2, m2, v2)[2] < alpha
    ns, ms, vs = sample_moments(substitute_last(ld_chunk, new_fen, metric))
    t2_sig = welch_stat(ns, ms, vs, n2, m2, v2)[2] < alpha
    if not t1_sig and t2_sig:
        return Transition.POS
    if t1_sig and not t2_sig:
        return Transition.NEG
    return Transition.NONE


def run_cycle(
    new_fen: FenRecord,
    ld_seq: CvSequence,
    dd_seq: CvSequence,
    s: int,
    alpha: float = 0.05,
    metric: Metric = change_value,
    t1_cache: Optional[dict] = None,
) -> CycleResult:
    """One full pass over all liked x disliked chunk pairs at size s.

    Chunk moments are computed once per chunk rather than once per pair;
    both routes reduce to the same sample_moments/welch_stat arithmetic,
    so the speedup cannot change any decision. ``t1_cache`` (keyed by
    size and chunk start indexes) lets batch callers reuse T1 decisions,
    which do not depend on the candidate; cache hits still count toward
    ``tests``.
    """
    try:
        ld_chunks = partition_chunks(ld_seq, s)
        dd_chunks = partition_chunks(dd_seq, s)
    except NoChunks as exc:
        raise DatabaseTooSmall(str(exc)) from exc
    dd_moments = [sample_moments(c.cvs) for c in dd_chunks]
    pos = 0
    neg = 0
    tests = 0
    for ld_chunk in ld_chunks:
        n1, m1, v1 = sample_moments(ld_chunk.cvs)
        ns, ms, vs = sample_moments(substitute_last(ld_chunk, new_fen, metric))
        for d_index, (n2, m2, v2) in enumerate(dd_moments):
            key = (s, ld_chunk.start_index, d_index)
            if t1_cache is not None and key in t1_cache:
                t1_sig = t1_cache[key]
            else:
                t1_sig = welch_stat(n1, m1, v1, n2, m2, v2)[2] < alpha
                if t1_cache is not None:
                    t1_cache[key] = t1_sig
            t2_sig = welch_stat(ns, ms, vs, n2, m2, v2)[2] < alpha
            tests += 2
            if t1_sig != t2_sig:
                if t2_sig:
                    pos += 1
                else:
                    neg += 1
    rp, neutral = rank_percentage(pos, neg)
    return CycleResult(sample_size=s, pos=pos, neg=neg, rp=rp, neutral=neutral, tests=tests)


def draw_sizes(rng: SplitMix64, config: CycleConfig) -> tuple[int, ...]:
    """Sample the cycle sizes: a uniform start, then capped uniform increments."""
    size = rng.randint(config.first_size_min, config.first_size_max)
    sizes = [size]
    for _ in range(config.cycles - 1):
        size = min(config.size_cap, size + rng.randint(config.increment_min, config.increment_max))
        sizes.append(size)
    return tuple(sizes)


def max_required_size(config: CycleConfig) -> int:
    """Largest sample size any draw under ``config`` can produce."""
    return min(
        config.size_cap,
        config.first_size_max + (config.cycles - 1) * config.increment_max,
    )


def _check_database_sizes(ld_seq: CvSequence, dd_seq: CvSequence, config: CycleConfig) -> None:
    # Guard at the maximum possible size so failure does not depend on the draw.
    need = max_required_size(config)
    if len(ld_seq) < need or len(dd_seq) < need:
        raise DatabaseTooSmall(
            f"need at least {need} records per database for this config, "
            f"have {len(ld_seq)} liked / {len(dd_seq)} disliked"
        )


def score_candidate_with_sizes(
    new_fen: FenRecord,
    ld_seq: CvSequence,
    dd_seq: CvSequence,
    sizes: Sequence[int],
    alpha: float,
    metric: Metric = change_value,
    t1_cache: Optional[dict] = None,
) -> CandidateScore:
    """Score one candidate at explicit cycle sizes (POS/NEG reset per cycle)."""
    cycles = tuple(
        run_cycle(new_fen, ld_seq, dd_seq, s, alpha, metric, t1_cache) for s in sizes
    )
    arp = average_rank_percentage([c.rp for c in cycles])
    return CandidateScore(fen=new_fen, cycles=cycles, arp=arp)


def score_candidate(
    new_fen: FenRecord,
    ld_seq: CvSequence,
    dd_seq: CvSequence,
    config: CycleConfig,
    rng: SplitMix64,
    metric: Metric = change_value,
) -> CandidateScore:
    """Score one candidate, drawing its cycle sizes from ``rng``."""
    _check_database_sizes(ld_seq, dd_seq, config)
    sizes = draw_sizes(rng, config)
    return score_candidate_with_sizes(new_fen, ld_seq, dd_seq, sizes, config.alpha, metric)


def _score_one(
    fen: FenRecord,
    index: int,
    ld_seq: CvSequence,
    dd_seq: CvSequence,
    config: CycleConfig,
    shared_sizes: Optional[tuple[int, ...]],
    metric: Metric,
    t1_cache: Optional[dict],
) -> CandidateScore:
    if shared_sizes is None:
        rng = derive_stream(config.seed, index)
        return score_candidate(fen, ld_seq, dd_seq, config, rng, metric)
    return score_candidate_with_sizes(
        fen, ld_seq, dd_seq, shared_sizes, config.alpha, metric, t1_cache
    )


_POOL_CTX: dict = {}


def _pool_init(ld_seq, dd_seq, config, shared_sizes, metric):
    _POOL_CTX["args"] = (ld_seq, dd_seq, config, shared_sizes, metric)
    _POOL_CTX["cache"] = {} if shared_sizes is not None else None


def _pool_score(item: tuple[int, FenRecord]) -> tuple[int, CandidateScore]:
    index, fen = item
    ld_seq, dd_seq, config, shared_sizes, metric = _POOL_CTX["args"]
    return index, _score_one(
        fen, index, ld_seq, dd_seq, config, shared_sizes, metric, _POOL_CTX["cache"]
    )


def score_collection(
    candidates: Iterable[FenRecord],
    ld_seq: CvSequence,
    dd_seq: CvSequence,
    config: CycleConfig,
    *,
    workers: int = 1,
    shared_sizes: bool = False,
    progress: Optional[Callable[[int, int], None]] = None,
    metric: Metric = change_value,
) -> list[CandidateScore]:
    """Score candidates in input order.

    Default mode draws fresh cycle sizes per candidate from its own
    stream. ``shared_sizes`` draws one size progression for the whole
    batch (stream index SHARED_SIZES_STREAM) and reuses cached T1
    decisions across candidates; the scores differ from default mode but
    are statistically comparable. With ``workers`` > 1 candidates fan
    out to a process pool, which requires a picklable metric; results
    are identical to the single-worker run.
    """
    pending = list(candidates)
    if not pending:
        raise NoCandidates("no candidates to score")
    _check_database_sizes(ld_seq, dd_seq, config)
    shared = (
        draw_sizes(derive_stream(config.seed, SHARED_SIZES_STREAM), config)
        if shared_sizes
        else None
    )
    total = len(pending)
    results: list[Optional[CandidateScore]] = [None] * total
    if workers <= 1:
        cache: Optional[dict] = {} if shared_sizes else None
        for index, fen in enumerate(pending):
            results[index] = _score_one(
                fen, index, ld_seq, dd_seq, config, shared, metric, cache
            )
            if progress:
                progress(index + 1, total)
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_pool_init,
            initargs=(ld_seq, dd_seq, config, shared, metric),
        ) as pool:
            futures = [
                pool.submit(_pool_score, (index, fen))
                for index, fen in enumerate(pending)
            ]
            done = 0
            for future in as_completed(futures):
                index, score = future.result()
                results[index] = score
                done += 1
                if progress:
                    progress(done, total)
    return [score for score in results if score is not None]


def rank_collection(
    candidates: Iterable[FenRecord],
    ld_seq: CvSequence,
    dd_seq: CvSequence,
    config: CycleConfig,
    *,
    workers: int = 1,
    shared_sizes: bool = False,
    progress: Optional[Callable[[int, int], None]] = None,
    metric: Metric = change_value,
) -> list[CandidateScore]:
    """Score and sort by ARP descending; ties keep input order."""
    scores = score_collection(
        candidates,
        ld_seq,
        dd_seq,
        config,
        workers=workers,
        shared_sizes=shared_sizes,
        progress=progress,
        metric=metric,
    )
    return sorted(scores, key=lambda score: -score.arp)
