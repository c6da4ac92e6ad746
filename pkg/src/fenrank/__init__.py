"""Preference learning and ranking for chess composition FENs.

Learn a single user's taste from ordered liked/disliked position
databases and rank unseen positions by how well they fit the liked side,
using byte-level change values and repeated Welch t-tests.
"""
from .engine import (
    CandidateScore,
    Chunk,
    CvSequence,
    CycleConfig,
    CycleResult,
    DatabaseTooSmall,
    Transition,
    average_rank_percentage,
    build_cv_sequence,
    paired_test,
    partition_chunks,
    rank_collection,
    rank_percentage,
    run_cycle,
    score_candidate,
    score_collection,
    substitute_last,
)
from .evaluate import (
    EvaluationReport,
    build_protocol,
    evaluate,
    evaluate_fixture,
    load_fixture,
    top_half_count,
)
from .fen import (
    BUFFER_LEN,
    CV_QUANTUM,
    FenError,
    FenRecord,
    canonical_buffer,
    change_value,
    format_cv,
    parse_fen,
)
from .rng import SplitMix64, derive_stream
from .stats import TTestResult, descriptive, two_tailed_p, welch_ttest
from .store import (
    CompositionRecord,
    Label,
    PreferenceDb,
    Store,
    ingest_pgn,
    split_holdout,
    truncate_before,
)

__version__ = "0.1.0"

__all__ = [
    "BUFFER_LEN",
    "CV_QUANTUM",
    "CandidateScore",
    "Chunk",
    "CompositionRecord",
    "CvSequence",
    "CycleConfig",
    "CycleResult",
    "DatabaseTooSmall",
    "EvaluationReport",
    "FenError",
    "FenRecord",
    "Label",
    "PreferenceDb",
    "SplitMix64",
    "Store",
    "TTestResult",
    "Transition",
    "average_rank_percentage",
    "build_cv_sequence",
    "build_protocol",
    "canonical_buffer",
    "change_value",
    "derive_stream",
    "descriptive",
    "evaluate",
    "evaluate_fixture",
    "format_cv",
    "ingest_pgn",
    "load_fixture",
    "paired_test",
    "parse_fen",
    "partition_chunks",
    "rank_collection",
    "rank_percentage",
    "run_cycle",
    "score_candidate",
    "score_collection",
    "split_holdout",
    "substitute_last",
    "top_half_count",
    "truncate_before",
    "two_tailed_p",
    "welch_ttest",
    "__version__",
]
