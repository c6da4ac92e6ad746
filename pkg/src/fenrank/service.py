"""Local triage service: ranked queues plus like/dislike verdicts.

One ranking job runs at a time in a background thread against immutable
snapshots of the stores taken at submission. When a job finishes, its
ranking becomes the queue; queue entry ids are the rank positions of the
latest DONE job. Verdicts append to the matching store (the write is
durable before the response goes out) and never trigger re-ranking by
themselves; a new job picks up everything acknowledged so far.

All endpoints live under /v1. The board payload lists 64 squares in
reading order (a8..h8 first, a1..h1 last).
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .engine import (
    CandidateScore,
    CycleConfig,
    build_cv_sequence,
    rank_collection,
)
from .fen import FenError, FenRecord, parse_fen
from .store import (
    CompositionRecord,
    DuplicateFen,
    Label,
    NoUsableGames,
    Store,
    StoreError,
    records_from_pgn,
)


class ServiceError(Exception):
    pass


class JobAlreadyRunning(ServiceError):
    pass


class UnknownJob(ServiceError):
    pass


class NoQueue(ServiceError):
    pass


class UnknownQueueFen(ServiceError):
    pass


class VerdictAlreadySet(ServiceError):
    pass


class JobState(Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


class Verdict(Enum):
    PENDING = "pending"
    LIKED = "liked"
    DISLIKED = "disliked"


@dataclass
class RankJob:
    id: str
    state: JobState
    total: int
    done: int
    seed: int
    created_at: datetime
    error: Optional[str] = None
    result: Optional[list[CandidateScore]] = None


@dataclass
class QueueEntry:
    id: int
    rank: int
    score: CandidateScore
    verdict: Verdict = Verdict.PENDING


class TriageService:
    """State machine behind the HTTP surface; usable directly in tests."""

    def __init__(self, store: Store, config: CycleConfig, workers: int = 1, now=datetime.now):
        self._store = store
        self._config = config
        self._workers = workers
        self._now = now
        self._lock = threading.Lock()
        self._jobs: dict[str, RankJob] = {}
        self._active: Optional[RankJob] = None
        self._queue: list[QueueEntry] = []
        self._has_ranking = False
        self._job_counter = itertools.count(1)

    # -- jobs ------------------------------------------------------------

    def submit_job(self, candidates: list[FenRecord], seed: Optional[int] = None) -> str:
        """Queue a ranking job over a snapshot of the current stores."""
        with self._lock:
            if self._active and self._active.state in (JobState.QUEUED, JobState.RUNNING):
                raise JobAlreadyRunning(f"job {self._active.id} is {self._active.state.value}")
            liked, disliked, _ = self._store.load_pair()
            job = RankJob(
                id=f"job-{next(self._job_counter)}",
                state=JobState.QUEUED,
                total=len(candidates),
                done=0,
                seed=self._config.seed if seed is None else seed,
                created_at=self._now(),
            )
            self._jobs[job.id] = job
            self._active = job
        thread = threading.Thread(
            target=self._run_job, args=(job, candidates, liked, disliked), daemon=True
        )
        thread.start()
        return job.id

    def _run_job(self, job: RankJob, candidates, liked, disliked) -> None:
        with self._lock:
            job.state = JobState.RUNNING

        def on_progress(done: int, total: int) -> None:
            with self._lock:
                job.done = done

        try:
            config = replace(self._config, seed=job.seed)
            ld_seq = build_cv_sequence(liked)
            dd_seq = build_cv_sequence(disliked)
            scores = rank_collection(
                candidates,
                ld_seq,
                dd_seq,
                config,
                workers=self._workers,
                progress=on_progress,
            )
        except Exception as exc:
            with self._lock:
                job.error = str(exc)
                job.state = JobState.FAILED
            return
        with self._lock:
            job.result = scores
            job.done = job.total
            job.state = JobState.DONE
            self._queue = [
                QueueEntry(id=position, rank=position, score=score)
                for position, score in enumerate(scores, 1)
            ]
            self._has_ranking = True

    def job_status(self, job_id: str) -> dict:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise UnknownJob(job_id)
            progress = job.done / job.total if job.total else 0.0
            payload = {
                "id": job.id,
                "state": job.state.value,
                "total": job.total,
                "done": job.done,
                "progress": progress,
                "seed": job.seed,
                "created_at": job.created_at.isoformat(),
            }
            if job.error is not None:
                payload["error"] = job.error
            if job.state is JobState.DONE:
                payload["result_size"] = len(job.result or [])
            return payload

    # -- queue -----------------------------------------------------------

    def _entry_payload(self, entry: QueueEntry) -> dict:
        return {
            "id": entry.id,
            "rank": entry.rank,
            "fen": entry.score.fen.text,
            "arp": entry.score.arp,
            "verdict": entry.verdict.value,
        }

    def queue(self) -> list[dict]:
        with self._lock:
            if not self._has_ranking:
                raise NoQueue("no completed ranking yet")
            return [self._entry_payload(entry) for entry in self._queue]

    def record_verdict(self, fen_text: str, verdict: Label) -> dict:
        """Record one verdict; durable in the store before returning."""
        with self._lock:
            entry = next(
                (e for e in self._queue if e.score.fen.text == fen_text), None
            )
            if entry is None:
                raise UnknownQueueFen(fen_text)
            if entry.verdict is not Verdict.PENDING:
                raise VerdictAlreadySet(f"verdict already {entry.verdict.value}")
            db = self._store.load(verdict)
            ordinal = max((r.source_ordinal for r in db.records), default=-1) + 1
            record = CompositionRecord(
                fen=entry.score.fen,
                generated_at=self._now(),
                source_ordinal=ordinal,
                meta={},
            )
            self._store.append_verdict(db, record)
            entry.verdict = Verdict(verdict.value)
            return self._entry_payload(entry)

    def position(self, entry_id: int) -> dict:
        with self._lock:
            entry = next((e for e in self._queue if e.id == entry_id), None)
            if entry is None:
                raise UnknownQueueFen(str(entry_id))
            fen = entry.score.fen
            payload = self._entry_payload(entry)
            payload["squares"] = list(fen.squares())
            payload["side_to_move"] = fen.side_to_move
            return payload


class JobRequest(BaseModel):
    candidates: Optional[list[str]] = None
    pgn: Optional[str] = None
    seed: Optional[int] = None


class VerdictRequest(BaseModel):
    fen: str
    verdict: str


def _candidates_from_request(request: JobRequest) -> list[FenRecord]:
    if request.candidates:
        fens = []
        for index, text in enumerate(request.candidates):
            try:
                fens.append(parse_fen(text))
            except FenError as exc:
                raise HTTPException(422, f"candidate {index}: {exc}") from exc
        return fens
    if request.pgn:
        try:
            result = records_from_pgn(request.pgn, Label.LIKED)
        except NoUsableGames as exc:
            raise HTTPException(422, str(exc)) from exc
        return [record.fen for record in result.db.records]
    raise HTTPException(422, "provide a candidates list or a pgn string")


def create_app(service: TriageService) -> FastAPI:
    app = FastAPI(title="fenrank triage service", version="1")
    # The browser UI is served as static files from a separate local port.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/v1/jobs", status_code=202)
    def post_jobs(request: JobRequest):
        candidates = _candidates_from_request(request)
        try:
            job_id = service.submit_job(candidates, request.seed)
        except JobAlreadyRunning as exc:
            raise HTTPException(409, str(exc)) from exc
        except (FileNotFoundError, StoreError) as exc:
            raise HTTPException(409, f"stores not populated: {exc}") from exc
        return {"id": job_id}

    @app.get("/v1/jobs/{job_id}")
    def get_job(job_id: str):
        try:
            return service.job_status(job_id)
        except UnknownJob as exc:
            raise HTTPException(404, f"unknown job {exc}") from exc

    @app.get("/v1/queue")
    def get_queue():
        try:
            return {"entries": service.queue()}
        except NoQueue as exc:
            raise HTTPException(404, str(exc)) from exc

    @app.post("/v1/verdict")
    def post_verdict(request: VerdictRequest):
        if request.verdict not in (Label.LIKED.value, Label.DISLIKED.value):
            raise HTTPException(422, f"verdict must be liked or disliked, got {request.verdict!r}")
        try:
            return service.record_verdict(request.fen, Label(request.verdict))
        except UnknownQueueFen as exc:
            raise HTTPException(404, f"fen not in queue: {exc}") from exc
        except (VerdictAlreadySet, DuplicateFen) as exc:
            raise HTTPException(409, str(exc)) from exc
        except (StoreError, FileNotFoundError) as exc:
            raise HTTPException(500, str(exc)) from exc

    @app.get("/v1/positions/{entry_id}")
    def get_position(entry_id: int):
        try:
            return service.position(entry_id)
        except UnknownQueueFen as exc:
            raise HTTPException(404, f"no queue entry {exc}") from exc

    return app
