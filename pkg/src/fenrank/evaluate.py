"""Holdout evaluation: does the ranking separate liked from disliked?

The protocol holds out the newest n liked records as the target group,
truncates the disliked database at the earliest target timestamp so
training only sees older material, and draws groups of post-cutoff
disliked records as baselines. Every held-out FEN is scored against the
training sequences; each baseline group is then compared to the target
group with a Welch test, and a top-half placement count says how often
target members outrank baseline members.

Fixture mode runs the same report assembly on externally supplied score
lists, with no engine and no RNG involved. A reference fixture (one
target group and three baseline groups of 20 ARPs each) ships with the
package for regression checks.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .engine import (
    CandidateScore,
    CycleConfig,
    build_cv_sequence,
    score_collection,
)
from .fen import FenRecord
from .rng import SplitMix64
from .stats import SummaryStats, TTestResult, descriptive, welch_ttest
from .store import PreferenceDb, split_holdout_records, truncate_before


class ProtocolError(Exception):
    """A protocol precondition failed."""


class InsufficientBaseline(ProtocolError):
    """Not enough (or not evenly divisible) baseline records."""


class LengthMismatch(ProtocolError):
    """Top-half comparison needs equal group sizes."""


TARGET_FIXTURE = "target_scores.csv"
BASELINE_FIXTURE = "baseline_scores.csv"


@dataclass(frozen=True)
class ProtocolInputs:
    train_liked: PreferenceDb
    train_disliked: PreferenceDb
    target_fens: tuple[FenRecord, ...]
    baseline_groups: tuple[tuple[str, tuple[FenRecord, ...]], ...]
    cutoff: datetime


@dataclass(frozen=True)
class GroupReport:
    label: str
    arps: tuple[float, ...]
    ttest: TTestResult
    top_half: int
    fraction: float
    stats: SummaryStats


@dataclass(frozen=True)
class EvaluationReport:
    target_arps: tuple[float, ...]
    target_stats: SummaryStats
    groups: tuple[GroupReport, ...]
    target_scores: Optional[tuple[CandidateScore, ...]] = None
    baseline_scores: Optional[tuple[tuple[str, tuple[CandidateScore, ...]], ...]] = None


def group_labels(count: int) -> list[str]:
    return [chr(ord("A") + i) if i < 26 else f"G{i + 1}" for i in range(count)]


def build_protocol(
    liked: PreferenceDb,
    disliked: PreferenceDb,
    holdout_n: int,
    baseline_total: int,
    baseline_groups: int,
    rng: SplitMix64,
    *,
    sequential: bool = False,
) -> ProtocolInputs:
    """Split the databases into training material, target, and baselines.

    The target is the newest ``holdout_n`` liked records. The disliked
    training set is truncated strictly before the earliest target
    timestamp; baseline records are drawn from the dated disliked records
    at or after that cutoff (randomly by default, the oldest
    ``baseline_total`` when ``sequential``) and split in chronological
    order into equal groups.
    """
    if holdout_n <= 0:
        raise ProtocolError("holdout must contain at least one record")
    if baseline_groups < 1:
        raise ProtocolError("need at least one baseline group")
    if baseline_total % baseline_groups != 0:
        raise InsufficientBaseline(
            f"{baseline_total} records do not divide into {baseline_groups} equal groups"
        )
    train_liked, held = split_holdout_records(liked, holdout_n)
    stamps = [record.generated_at for record in held]
    if any(stamp is None for stamp in stamps):
        raise ProtocolError("holdout records must be dated to anchor the cutoff")
    cutoff = min(stamps)
    train_disliked = truncate_before(disliked, cutoff)
    pool = [
        record
        for record in disliked.records
        if record.generated_at is not None and record.generated_at >= cutoff
    ]
    if len(pool) < baseline_total:
        raise InsufficientBaseline(
            f"need {baseline_total} disliked records at or after {cutoff.isoformat()}, "
            f"have {len(pool)}"
        )
    if sequential:
        picked = pool[:baseline_total]
    else:
        picked = [pool[i] for i in rng.sample_indices(len(pool), baseline_total)]
    per_group = baseline_total // baseline_groups
    labels = group_labels(baseline_groups)
    groups = tuple(
        (
            labels[g],
            tuple(record.fen for record in picked[g * per_group : (g + 1) * per_group]),
        )
        for g in range(baseline_groups)
    )
    return ProtocolInputs(
        train_liked=train_liked,
        train_disliked=train_disliked,
        target_fens=tuple(record.fen for record in held),
        baseline_groups=groups,
        cutoff=cutoff,
    )


def top_half_count(target: Sequence[float], baseline: Sequence[float]) -> int:
    """Count target members in the top half of the merged, descending list.

    Ties rank target values ahead of baseline values, then input order.
    """
    if len(target) != len(baseline):
        raise LengthMismatch(f"target has {len(target)} values, baseline {len(baseline)}")
    n = len(target)
    merged = [(value, 0, i) for i, value in enumerate(target)]
    merged += [(value, 1, i) for i, value in enumerate(baseline)]
    merged.sort(key=lambda entry: (-entry[0], entry[1], entry[2]))
    return sum(1 for entry in merged[:n] if entry[1] == 0)


def assemble_report(
    target_arps: Sequence[float],
    baseline_arps: Sequence[tuple[str, Sequence[float]]],
    alpha: float = 0.05,
    target_scores: Optional[tuple[CandidateScore, ...]] = None,
    baseline_scores: Optional[tuple[tuple[str, tuple[CandidateScore, ...]], ...]] = None,
) -> EvaluationReport:
    target = tuple(target_arps)
    groups = []
    for label, arps in baseline_arps:
        arps = tuple(arps)
        count = top_half_count(target, arps)
        groups.append(
            GroupReport(
                label=label,
                arps=arps,
                ttest=welch_ttest(target, arps, alpha),
                top_half=count,
                fraction=count / len(target),
                stats=descriptive(arps),
            )
        )
    return EvaluationReport(
        target_arps=target,
        target_stats=descriptive(target),
        groups=tuple(groups),
        target_scores=target_scores,
        baseline_scores=baseline_scores,
    )


def evaluate(
    protocol: ProtocolInputs,
    config: CycleConfig,
    *,
    workers: int = 1,
    progress=None,
) -> EvaluationReport:
    """Score target and baseline FENs against the training sequences.

    All positions are scored in one batch (target first, then the groups
    in order), so each gets a distinct candidate RNG stream and the whole
    report is deterministic given the databases and config.seed.
    """
    ld_seq = build_cv_sequence(protocol.train_liked)
    dd_seq = build_cv_sequence(protocol.train_disliked)
    batch = list(protocol.target_fens)
    for _, fens in protocol.baseline_groups:
        batch.extend(fens)
    scores = score_collection(
        batch, ld_seq, dd_seq, config, workers=workers, progress=progress
    )
    cursor = len(protocol.target_fens)
    target_scores = tuple(scores[:cursor])
    baseline_scores = []
    for label, fens in protocol.baseline_groups:
        baseline_scores.append((label, tuple(scores[cursor : cursor + len(fens)])))
        cursor += len(fens)
    return assemble_report(
        tuple(score.arp for score in target_scores),
        [(label, tuple(s.arp for s in grp)) for label, grp in baseline_scores],
        config.alpha,
        target_scores,
        tuple(baseline_scores),
    )


def evaluate_fixture(
    target_arps: Sequence[float],
    baseline_arps: Sequence[tuple[str, Sequence[float]]],
    alpha: float = 0.05,
) -> EvaluationReport:
    """Assemble a report from externally supplied ARPs; no engine, no RNG."""
    return assemble_report(target_arps, baseline_arps, alpha)


def _read_target_csv(text: str) -> tuple[float, ...]:
    rows = list(csv.DictReader(text.splitlines()))
    return tuple(float(row["arp"]) for row in rows)


def _read_baseline_csv(text: str) -> list[tuple[str, tuple[float, ...]]]:
    rows = list(csv.DictReader(text.splitlines()))
    labels = [name for name in rows[0].keys() if name != "idx"]
    return [(label, tuple(float(row[label]) for row in rows)) for label in labels]


def load_fixture(
    target_path: Optional[str | Path] = None,
    baseline_path: Optional[str | Path] = None,
) -> tuple[tuple[float, ...], list[tuple[str, tuple[float, ...]]]]:
    """Read fixture score lists, defaulting to the bundled reference CSVs."""
    if target_path is None:
        target_text = (resources.files("fenrank") / "data" / TARGET_FIXTURE).read_text()
    else:
        target_text = Path(target_path).read_text(encoding="utf-8")
    if baseline_path is None:
        baseline_text = (resources.files("fenrank") / "data" / BASELINE_FIXTURE).read_text()
    else:
        baseline_text = Path(baseline_path).read_text(encoding="utf-8")
    return _read_target_csv(target_text), _read_baseline_csv(baseline_text)


def report_to_dict(report: EvaluationReport) -> dict:
    """Full-precision JSON form of a report."""

    def score_dict(score: CandidateScore) -> dict:
        return {
            "fen": score.fen.text,
            "arp": score.arp,
            "cycles": [
                {
                    "size": c.sample_size,
                    "pos": c.pos,
                    "neg": c.neg,
                    "rp": c.rp,
                    "neutral": c.neutral,
                }
                for c in score.cycles
            ],
        }

    payload: dict = {
        "target": {
            "arps": list(report.target_arps),
            "stats": {
                "mean": report.target_stats.mean,
                "median": report.target_stats.median,
                "max": report.target_stats.max,
            },
        },
        "groups": [
            {
                "label": g.label,
                "arps": list(g.arps),
                "stats": {"mean": g.stats.mean, "median": g.stats.median, "max": g.stats.max},
                "t": g.ttest.t,
                "df": g.ttest.df,
                "df_floor": g.ttest.df_floor,
                "p": g.ttest.p,
                "significant": g.ttest.significant,
                "top_half": g.top_half,
                "fraction": g.fraction,
            }
            for g in report.groups
        ],
    }
    if report.target_scores is not None:
        payload["target"]["scores"] = [score_dict(s) for s in report.target_scores]
    if report.baseline_scores is not None:
        for entry, (_, scores) in zip(payload["groups"], report.baseline_scores):
            entry["scores"] = [score_dict(s) for s in scores]
    return payload


def render_text(report: EvaluationReport) -> str:
    """Aligned plain-text form of a report."""
    lines = []
    stats = report.target_stats
    lines.append(
        f"target  n={len(report.target_arps):<3d} "
        f"mean={stats.mean:7.2f}  median={stats.median:7.2f}  max={stats.max:7.2f}"
    )
    for g in report.groups:
        lines.append(
            f"group {g.label}  n={len(g.arps):<3d} "
            f"mean={g.stats.mean:7.2f}  median={g.stats.median:7.2f}  max={g.stats.max:7.2f}"
        )
    lines.append("")
    for g in report.groups:
        verdict = "significant" if g.ttest.significant else "not significant"
        lines.append(
            f"target vs {g.label}: t = {g.ttest.t:.3f}, df = {g.ttest.df_floor}, "
            f"p = {g.ttest.p:.3f} ({verdict} at alpha {g.ttest.alpha:g}); "
            f"top half {g.top_half}/{len(report.target_arps)} ({g.fraction * 100:.2f}%)"
        )
    mean_fraction = (
        sum(g.fraction for g in report.groups) / len(report.groups) if report.groups else 0.0
    )
    lines.append(f"mean top-half fraction: {mean_fraction * 100:.2f}%")
    return "\n".join(lines) + "\n"
