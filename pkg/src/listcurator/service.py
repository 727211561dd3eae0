"""HTTP curation service: live sessions where a curator accepts or rejects
recommended users, growing the seed set and recomputing recommendations.

Sessions persist as append-only JSONL logs; state is rebuilt by replaying the
log, so a restarted service resumes exactly where it stopped.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from fastapi import APIRouter, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from scipy import sparse

from .aggregate import build_panel, svd_aggregate
from .corpus import Dataset, load_dataset
from .evaluate import cohesion as _cohesion_entry
from .recommend import Ranking
from .validation import row_norms
from .views import DEFAULT_CRITERIA, ProfileMatrix, build_view, check_criterion


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class _Session:
    session_id: str
    dataset_id: str
    criteria: tuple[str, ...]
    original_seeds: tuple[str, ...]
    accepted: list[str] = field(default_factory=list)
    rejected: set[str] = field(default_factory=set)
    log: list[dict] = field(default_factory=list)
    row_sums: dict[str, sparse.csr_matrix] = field(default_factory=dict)
    seed_count: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)
    cache: dict | None = None

    @property
    def seed_ids(self) -> list[str]:
        return list(self.original_seeds) + self.accepted


def _cosine_to(X: sparse.csr_matrix, center: sparse.csr_matrix) -> np.ndarray:
    center_norm = float(np.sqrt(center.multiply(center).sum()))
    if center_norm == 0.0:
        return np.zeros(X.shape[0])
    dots = np.asarray((X @ center.T).todense()).ravel()
    norms = row_norms(X)
    scores = np.zeros(X.shape[0])
    nz = norms > 0
    scores[nz] = dots[nz] / (norms[nz] * center_norm)
    return np.minimum(scores, 1.0)


class CurationEngine:
    """Session bookkeeping and recommendation recomputation over loaded datasets."""

    def __init__(
        self,
        datasets: Mapping[str, Dataset],
        store_dir: str | Path | None = None,
        default_criteria: Sequence[str] = DEFAULT_CRITERIA,
    ):
        self._datasets = dict(datasets)
        self._default_criteria = tuple(default_criteria)
        self._views: dict[tuple[str, str], ProfileMatrix] = {}
        self._sessions: dict[str, _Session] = {}
        self._registry_lock = threading.Lock()
        self._store_dir = Path(store_dir) if store_dir is not None else None
        if self._store_dir is not None:
            self._store_dir.mkdir(parents=True, exist_ok=True)
            self._replay_store()

    # -- datasets ---------------------------------------------------------

    def dataset_ids(self) -> list[str]:
        return sorted(self._datasets)

    def dataset(self, dataset_id: str) -> Dataset:
        try:
            return self._datasets[dataset_id]
        except KeyError:
            raise ServiceError(404, "unknown_dataset", f"unknown dataset {dataset_id!r}") from None

    def dataset_summaries(self) -> list[dict]:
        out = []
        for did in self.dataset_ids():
            ds = self._datasets[did]
            out.append(
                {
                    "dataset_id": did,
                    "users": len(ds.users),
                    "seed_users": len(ds.seed_ids),
                    "tweets": len(ds.tweets),
                    "lists": len(ds.lists),
                }
            )
        return out

    def view(self, dataset_id: str, criterion: str) -> ProfileMatrix:
        key = (dataset_id, criterion)
        if key not in self._views:
            self._views[key] = build_view(self.dataset(dataset_id), criterion)
        return self._views[key]

    # -- session lifecycle ------------------------------------------------

    def create_session(
        self,
        dataset_id: str,
        criteria: Sequence[str] | None = None,
        session_id: str | None = None,
    ) -> dict:
        dataset = self.dataset(dataset_id)
        tags = tuple(criteria) if criteria else self._default_criteria
        if len(tags) < 2:
            raise ServiceError(400, "invalid_criteria", "need at least 2 criteria to aggregate")
        for tag in tags:
            try:
                check_criterion(tag)
            except ValueError as exc:
                raise ServiceError(400, "invalid_criteria", str(exc)) from None

        session = _Session(
            session_id=session_id or uuid.uuid4().hex,
            dataset_id=dataset_id,
            criteria=tags,
            original_seeds=tuple(sorted(dataset.seed_ids)),
        )
        session.seed_count = len(session.original_seeds)
        for tag in tags:
            view = self.view(dataset_id, tag)
            rows = [view.user_index[u] for u in session.original_seeds]
            ones = sparse.csr_matrix(np.ones((1, len(rows))))
            session.row_sums[tag] = (ones @ view.matrix[rows]).tocsr()

        with self._registry_lock:
            if session.session_id in self._sessions:
                raise ServiceError(409, "session_exists", f"session {session.session_id!r} already exists")
            self._sessions[session.session_id] = session
        if session_id is None:
            self._persist(session, {"type": "create", "session_id": session.session_id,
                                    "dataset_id": dataset_id, "criteria": list(tags),
                                    "at": time.time()})
        self._ranked(session)
        return self.session_summary(session.session_id)

    def _session(self, session_id: str) -> _Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise ServiceError(404, "unknown_session", f"unknown session {session_id!r}") from None

    def session_summary(self, session_id: str) -> dict:
        session = self._session(session_id)
        dataset = self.dataset(session.dataset_id)
        candidates = len(dataset.users) - session.seed_count - len(session.rejected)
        return {
            "session_id": session.session_id,
            "dataset_id": session.dataset_id,
            "criteria": list(session.criteria),
            "seed_count": session.seed_count,
            "rejected_count": len(session.rejected),
            "candidate_count": candidates,
            "decisions": len(session.log),
        }

    # -- recommendation computation ----------------------------------------

    def _ranked(self, session: _Session) -> dict:
        if session.cache is not None:
            return session.cache
        dataset = self.dataset(session.dataset_id)
        excluded = set(session.seed_ids) | session.rejected
        candidates = sorted(u for u in dataset.user_ids if u not in excluded)
        if not candidates:
            session.cache = {"candidates": [], "aggregate": None, "raw": {}, "standardized": {}}
            return session.cache

        rankings = []
        raw_scores: dict[str, dict[str, float]] = {}
        for tag in session.criteria:
            view = self.view(session.dataset_id, tag)
            center = session.row_sums[tag].multiply(1.0 / session.seed_count).tocsr()
            rows = [view.user_index[u] for u in candidates]
            scores = _cosine_to(view.matrix[rows], center)
            raw_scores[tag] = dict(zip(candidates, scores))
            entries = sorted(zip(candidates, scores), key=lambda item: (-item[1], item[0]))
            rankings.append(Ranking(criterion=tag, entries=tuple(entries), candidates=frozenset(candidates)))

        panel = build_panel(rankings)
        aggregate = svd_aggregate(panel)
        standardized = {
            tag: dict(zip(panel.candidates, panel.scores[:, j]))
            for j, tag in enumerate(panel.columns)
        }
        session.cache = {
            "candidates": candidates,
            "aggregate": aggregate,
            "raw": raw_scores,
            "standardized": standardized,
        }
        return session.cache

    def recommendations(self, session_id: str, k: int) -> dict:
        if k < 1:
            raise ServiceError(400, "invalid_k", "k must be at least 1")
        session = self._session(session_id)
        with session.lock:
            computed = self._ranked(session)
            dataset = self.dataset(session.dataset_id)
            aggregate = computed["aggregate"]
            entries = aggregate.entries[:k] if aggregate is not None else ()
            items = []
            for i, (user_id, score) in enumerate(entries):
                items.append(
                    {
                        "rank": i + 1,
                        "user_id": user_id,
                        "screen_name": dataset.by_id[user_id].screen_name,
                        "score": float(score),
                        "criteria": {
                            tag: {
                                "score": float(computed["raw"][tag][user_id]),
                                "standardized": float(computed["standardized"][tag][user_id]),
                            }
                            for tag in session.criteria
                        },
                    }
                )
            return {
                "session_id": session_id,
                "k": k,
                "returned": len(items),
                "truncated": k > len(computed["candidates"]),
                "degenerate": bool(aggregate.degenerate) if aggregate is not None else False,
                "items": items,
            }

    # -- decisions ----------------------------------------------------------

    def decide(self, session_id: str, user_id: str, action: str, curator: str = "curator") -> dict:
        if action not in ("accept", "reject"):
            raise ServiceError(400, "invalid_action", f"action must be accept or reject, got {action!r}")
        session = self._session(session_id)
        with session.lock:
            self._apply_decision(session, user_id, action, curator, at=time.time(), persist=True)
        return self.session_summary(session_id)

    def _apply_decision(
        self, session: _Session, user_id: str, action: str, curator: str, at: float, persist: bool
    ) -> None:
        dataset = self.dataset(session.dataset_id)
        if user_id not in dataset.by_id:
            raise ServiceError(404, "unknown_user", f"unknown user {user_id!r}")
        if user_id in session.seed_ids or user_id in session.rejected:
            raise ServiceError(409, "already_decided", f"user {user_id!r} already decided")

        record = {
            "type": "decision",
            "seq": len(session.log) + 1,
            "user_id": user_id,
            "action": action,
            "curator": curator,
            "at": at,
        }
        if action == "accept":
            session.accepted.append(user_id)
            session.seed_count += 1
            for tag in session.criteria:
                view = self.view(session.dataset_id, tag)
                session.row_sums[tag] = (session.row_sums[tag] + view.row(user_id)).tocsr()
        else:
            session.rejected.add(user_id)
        session.log.append(record)
        session.cache = None
        if persist:
            self._persist(session, record)

    # -- export and diagnostics ---------------------------------------------

    def export(self, session_id: str) -> dict:
        session = self._session(session_id)
        dataset = self.dataset(session.dataset_id)
        with session.lock:
            accept_seq = {
                rec["user_id"]: rec["seq"] for rec in session.log if rec["action"] == "accept"
            }
            members = [
                {"user_id": u, "screen_name": dataset.by_id[u].screen_name, "origin": "seed", "seq": None}
                for u in session.original_seeds
            ]
            members.extend(
                {
                    "user_id": u,
                    "screen_name": dataset.by_id[u].screen_name,
                    "origin": "accepted",
                    "seq": accept_seq[u],
                }
                for u in session.accepted
            )
            return {
                "session_id": session_id,
                "dataset_id": session.dataset_id,
                "members": members,
                "decisions": [
                    {"seq": rec["seq"], "user_id": rec["user_id"], "action": rec["action"],
                     "curator": rec["curator"]}
                    for rec in session.log
                ],
            }

    def cohesion(self, session_id: str, randomizations: int = 1000, rng_seed: int = 0) -> dict:
        session = self._session(session_id)
        with session.lock:
            seeds = session.seed_ids
        entries = []
        for tag in session.criteria:
            view = self.view(session.dataset_id, tag)
            entry = _cohesion_entry(view, seeds, randomizations=randomizations, rng_seed=rng_seed)
            entries.append(
                {
                    "criterion": entry.criterion,
                    "raw": entry.raw,
                    "expected": entry.expected,
                    "corrected": entry.corrected,
                    "randomizations": entry.randomizations,
                    "null_std": entry.null_std,
                    "expected_se": entry.expected_se,
                }
            )
        return {"session_id": session_id, "seed_count": len(seeds), "entries": entries}

    # -- persistence ----------------------------------------------------------

    def _persist(self, session: _Session, record: dict) -> None:
        if self._store_dir is None:
            return
        path = self._store_dir / f"{session.session_id}.jsonl"
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def _replay_store(self) -> None:
        for path in sorted(self._store_dir.glob("*.jsonl")):
            with path.open("r", encoding="utf-8") as fh:
                lines = [json.loads(line) for line in fh if line.strip()]
            if not lines or lines[0].get("type") != "create":
                continue
            header = lines[0]
            self.create_session(
                header["dataset_id"],
                criteria=header.get("criteria"),
                session_id=header["session_id"],
            )
            session = self._sessions[header["session_id"]]
            for rec in lines[1:]:
                if rec.get("type") != "decision":
                    continue
                self._apply_decision(
                    session, rec["user_id"], rec["action"], rec.get("curator", "curator"),
                    at=rec.get("at", 0.0), persist=False,
                )


def load_engine(data_root: str | Path, store_dir: str | Path | None = None) -> CurationEngine:
    """Load every bundle directory under ``data_root`` into an engine."""
    root = Path(data_root)
    datasets = {}
    for child in sorted(root.iterdir()) if root.is_dir() else []:
        if child.is_dir() and (child / "users.jsonl").is_file():
            datasets[child.name] = load_dataset(child)
    if not datasets:
        raise ValueError(f"no dataset bundles found under {root}")
    return CurationEngine(datasets, store_dir=store_dir)


class CreateSessionBody(BaseModel):
    dataset_id: str
    criteria: list[str] | None = None


class DecisionBody(BaseModel):
    user_id: str
    action: str
    curator: str = "curator"


def create_app(engine: CurationEngine, token: str | None = None) -> FastAPI:
    """FastAPI application exposing the /v1 curation API."""
    app = FastAPI(title="list curation service", version="1")

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"code": "invalid_request", "message": str(exc)})

    router = APIRouter(prefix="/v1")

    def check_token(request: Request) -> None:
        if token is not None and request.headers.get("x-auth-token") != token:
            raise ServiceError(401, "unauthorized", "missing or invalid auth token")

    @router.get("/datasets")
    def list_datasets(request: Request):
        check_token(request)
        return {"datasets": engine.dataset_summaries()}

    @router.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody, request: Request):
        check_token(request)
        return engine.create_session(body.dataset_id, criteria=body.criteria)

    @router.get("/sessions/{session_id}")
    def get_session(session_id: str, request: Request):
        check_token(request)
        return engine.session_summary(session_id)

    @router.get("/sessions/{session_id}/recommendations")
    def recommendations(session_id: str, request: Request, k: int = 10):
        check_token(request)
        return engine.recommendations(session_id, k)

    @router.post("/sessions/{session_id}/decisions")
    def decide(session_id: str, body: DecisionBody, request: Request):
        check_token(request)
        return engine.decide(session_id, body.user_id, body.action, curator=body.curator)

    @router.get("/sessions/{session_id}/export")
    def export(session_id: str, request: Request):
        check_token(request)
        return engine.export(session_id)

    @router.get("/sessions/{session_id}/cohesion")
    def session_cohesion(session_id: str, request: Request, randomizations: int = 1000):
        check_token(request)
        if randomizations < 100:
            raise ServiceError(400, "invalid_randomizations", "need at least 100 randomizations")
        return engine.cohesion(session_id, randomizations=randomizations)

    app.include_router(router)
    return app
