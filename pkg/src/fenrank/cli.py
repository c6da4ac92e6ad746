"""Command-line interface.

Subcommands:
    ingest     add PGN games to the liked or disliked store
    rank       score candidate FENs against the stores and print a ranking
    evaluate   run the holdout protocol, or fixture mode on score CSVs
    stats      inspect a store's change-value sequence
    serve      start the triage HTTP service

Exit codes are stable: 0 success, 1 I/O, 2 data, 3 method guard, 64 usage.
The store directory comes from --store, the FENRANK_STORE environment
variable, or ./fenrank_store, in that order. A --config file holds
key=value overrides for the scoring configuration; explicit flags win
over the file.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path
from typing import Optional

from .engine import (
    CycleConfig,
    DatabaseTooSmall,
    EmptyDatabase,
    EngineError,
    NoCandidates,
    build_cv_sequence,
    rank_collection,
)
from .evaluate import (
    ProtocolError,
    build_protocol,
    evaluate,
    evaluate_fixture,
    load_fixture,
    render_text,
    report_to_dict,
)
from .fen import CV_QUANTUM, FenError, change_value, format_cv, parse_fen
from .rng import derive_stream
from .stats import StatsError, descriptive
from .store import (
    Label,
    NoUsableGames,
    Store,
    StoreError,
    records_from_pgn,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_DATA = 2
EXIT_GUARD = 3
EXIT_USAGE = 64

STORE_ENV = "FENRANK_STORE"
DEFAULT_STORE = "fenrank_store"

# Stream index for the evaluation baseline draw; candidates use 0, 1, ...
_BASELINE_STREAM = -2


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this CLI promises 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return number


def _store_root(args) -> Path:
    if args.store:
        return Path(args.store)
    env = os.environ.get(STORE_ENV)
    if env:
        return Path(env)
    return Path(DEFAULT_STORE)


_CONFIG_FIELDS = {f.name: f.type for f in dataclass_fields(CycleConfig)}


def load_config_file(path: str | Path) -> dict:
    """Parse key=value lines; blank lines and # comments are ignored."""
    values: dict = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{line_no}: expected key=value, got {raw!r}", EXIT_USAGE)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_FIELDS:
            raise CliError(f"{path}:{line_no}: unknown setting {key!r}", EXIT_USAGE)
        try:
            values[key] = float(value) if key == "alpha" else int(value)
        except ValueError:
            raise CliError(f"{path}:{line_no}: bad value for {key}: {value!r}", EXIT_USAGE) from None
    return values


def _cycle_config(args) -> CycleConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    try:
        return CycleConfig(**values)
    except ValueError as exc:
        raise CliError(f"bad configuration: {exc}", EXIT_USAGE) from exc


def _load_candidates(path: str | Path) -> list:
    """Candidate FENs from a PGN file or a newline-delimited FEN list."""
    text = Path(path).read_text(encoding="utf-8", errors="replace")
    body = text.lstrip()
    if not body:
        raise CliError(f"{path}: no candidates found", EXIT_DATA)
    try:
        if body.startswith("["):
            result = records_from_pgn(text, Label.LIKED)
            return [record.fen for record in result.db.records]
        fens = []
        for line_no, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                fens.append(parse_fen(line))
            except FenError as exc:
                raise CliError(f"{path}:{line_no}: {exc}", EXIT_DATA) from exc
        if not fens:
            raise CliError(f"{path}: no candidates found", EXIT_DATA)
        return fens
    except NoUsableGames as exc:
        raise CliError(f"{path}: {exc}", EXIT_DATA) from exc


def cmd_ingest(args) -> int:
    store = Store(_store_root(args))
    result = store.ingest_file(args.pgn, Label.from_string(args.label))
    skipped = result.skipped_no_fen + result.skipped_invalid + result.skipped_duplicate
    print(f"{result.ingested} ingested, {skipped} skipped")
    if skipped:
        print(
            f"skipped: {skipped} (no FEN tag: {result.skipped_no_fen}, "
            f"invalid FEN: {result.skipped_invalid}, duplicate: {result.skipped_duplicate})",
            file=sys.stderr,
        )
    print(f"{result.db.label.value} database now holds {len(result.db)} records")
    return EXIT_OK


def _emit_ranking_csv(scores, out) -> None:
    cycle_count = len(scores[0].cycles) if scores else 0
    header = ["rank", "fen"] + [f"rp{i + 1}" for i in range(cycle_count)] + ["arp"]
    out.write(",".join(header) + "\n")
    for position, score in enumerate(scores, 1):
        cells = [str(position), f'"{score.fen.text}"']
        cells += [f"{c.rp:.2f}" for c in score.cycles]
        cells.append(f"{score.arp:.2f}")
        out.write(",".join(cells) + "\n")


def _emit_ranking_json(scores, config: CycleConfig, out) -> None:
    payload = {
        "seed": config.seed,
        "results": [
            {
                "rank": position,
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
            for position, score in enumerate(scores, 1)
        ],
    }
    out.write(json.dumps(payload, indent=2) + "\n")


def cmd_rank(args) -> int:
    config = _cycle_config(args)
    store = Store(_store_root(args))
    liked, disliked, warnings = store.load_pair()
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    candidates = _load_candidates(args.candidates)
    ld_seq = build_cv_sequence(liked)
    dd_seq = build_cv_sequence(disliked)
    scores = rank_collection(
        candidates,
        ld_seq,
        dd_seq,
        config,
        workers=args.workers,
        shared_sizes=args.shared_sizes,
    )
    if args.format == "json":
        _emit_ranking_json(scores, config, sys.stdout)
    else:
        _emit_ranking_csv(scores, sys.stdout)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    config = _cycle_config(args)
    if args.fixture or args.fixture_target or args.fixture_baseline:
        target, baseline = load_fixture(args.fixture_target, args.fixture_baseline)
        report = evaluate_fixture(target, baseline, config.alpha)
    else:
        store = Store(_store_root(args))
        liked, disliked, warnings = store.load_pair()
        for warning in warnings:
            print(f"warning: {warning}", file=sys.stderr)
        protocol = build_protocol(
            liked,
            disliked,
            args.holdout,
            args.baseline,
            args.groups,
            derive_stream(config.seed, _BASELINE_STREAM),
            sequential=args.sequential,
        )
        report = evaluate(protocol, config, workers=args.workers)
    if args.out:
        Path(args.out).write_text(
            json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8"
        )
    if args.format == "json":
        print(json.dumps(report_to_dict(report), indent=2))
    else:
        sys.stdout.write(render_text(report))
    return EXIT_OK


def cmd_stats(args) -> int:
    store = Store(_store_root(args))
    label = Label.from_string(args.db)
    db = store.load(label)
    try:
        seq = build_cv_sequence(db)
    except EmptyDatabase:
        print(f"error: {label.value} store is empty", file=sys.stderr)
        return EXIT_IO
    print(f"{label.value}: {len(db)} records")
    if len(db) <= 50:
        print("ordinal\ttimestamp\tcv")
        for record, cv in zip(db.records, seq.cvs):
            stamp = record.generated_at.isoformat() if record.generated_at else "-"
            print(f"{record.source_ordinal}\t{stamp}\t{format_cv(cv)}")
    summary = descriptive(seq.cvs)
    print(
        f"count {len(seq.cvs)}, mean {format_cv(summary.mean)}, "
        f"median {format_cv(summary.median)}, max {format_cv(summary.max)}"
    )
    exact = all(cv == round(cv / CV_QUANTUM) * CV_QUANTUM for cv in seq.cvs)
    if exact:
        print(f"quantization: OK (all change values are multiples of {CV_QUANTUM})")
    else:
        print("quantization: FAILED", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import TriageService, create_app

    config = _cycle_config(args)
    store = Store(_store_root(args))
    service = TriageService(store, config, workers=args.workers)
    app = create_app(service)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="fenrank", description=__doc__.splitlines()[0])
    parser.add_argument("--store", help=f"store directory (default ${STORE_ENV} or ./{DEFAULT_STORE})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="add PGN games to a store")
    p_ingest.add_argument("pgn", help="PGN file to ingest")
    p_ingest.add_argument("--label", required=True, choices=["liked", "disliked"])
    p_ingest.set_defaults(func=cmd_ingest)

    p_rank = sub.add_parser("rank", help="rank candidate FENs")
    p_rank.add_argument("candidates", help="PGN file or newline-delimited FEN list")
    p_rank.add_argument("--seed", type=int, default=None)
    p_rank.add_argument("--format", choices=["csv", "json"], default="csv")
    p_rank.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1)
    p_rank.add_argument("--config", help="key=value overrides for the scoring configuration")
    p_rank.add_argument(
        "--shared-sizes",
        action="store_true",
        help="draw one size progression for the whole batch (enables T1 caching)",
    )
    p_rank.set_defaults(func=cmd_rank)

    p_eval = sub.add_parser("evaluate", help="run the holdout evaluation protocol")
    p_eval.add_argument("--holdout", type=_positive_int, default=20)
    p_eval.add_argument("--baseline", type=_positive_int, default=60)
    p_eval.add_argument("--groups", type=_positive_int, default=3)
    p_eval.add_argument("--seed", type=int, default=None)
    p_eval.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1)
    p_eval.add_argument("--config", help="key=value overrides for the scoring configuration")
    p_eval.add_argument("--sequential", action="store_true", help="take the oldest baseline records instead of sampling")
    p_eval.add_argument("--fixture", action="store_true", help="evaluate the bundled reference score CSVs")
    p_eval.add_argument("--fixture-target", help="target score CSV (implies fixture mode)")
    p_eval.add_argument("--fixture-baseline", help="baseline score CSV (implies fixture mode)")
    p_eval.add_argument("--format", choices=["text", "json"], default="text")
    p_eval.add_argument("--out", help="also write the JSON report to this file")
    p_eval.set_defaults(func=cmd_evaluate)

    p_stats = sub.add_parser("stats", help="inspect a store's change values")
    p_stats.add_argument("--db", required=True, choices=["liked", "disliked"])
    p_stats.set_defaults(func=cmd_stats)

    p_serve = sub.add_parser("serve", help="start the triage HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--seed", type=int, default=None)
    p_serve.add_argument("--workers", type=_positive_int, default=1)
    p_serve.add_argument("--config", help="key=value overrides for the scoring configuration")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DatabaseTooSmall, EmptyDatabase, ProtocolError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (FenError, StoreError, NoCandidates, StatsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
