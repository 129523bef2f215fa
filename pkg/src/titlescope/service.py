"""HTTP service exposing the active-learning loop to human annotators.

Three fixed annotators (opaque bearer tokens from config) each read the
whole open batch and vote title by title. Votes are persisted append-only
before they are acknowledged and replays with the same idempotency key or
identical verdict are acknowledged without effect. Closing an iteration
resolves consensus, retrains the scorer and opens the next batch; the
transition is atomic and the service answers "busy" to concurrent closes.

Endpoints (all JSON):
    GET  /v1/batch/current
    GET  /v1/items?n=
    POST /v1/votes            [{title_id, verdict: "H"|"N", idempotency_key}]
    POST /v1/iterations/close {"force": bool}
    GET  /v1/progress
    GET  /v1/metrics/history
"""

from __future__ import annotations

import datetime as dt
import threading
from typing import Mapping

from fastapi import Depends, FastAPI, HTTPException, Request
from pydantic import BaseModel

from .active import ActiveLoop
from .corpus import CorpusError, LabelRecord

__all__ = ["AnnotationController", "create_app"]


class VoteIn(BaseModel):
    title_id: str
    verdict: str
    idempotency_key: str | None = None


class CloseIn(BaseModel):
    force: bool = False


class AnnotationController:
    """Mediates between HTTP handlers and the loop/store."""

    def __init__(self, loop: ActiveLoop, annotators: tuple[str, ...]):
        self.loop = loop
        self.annotators = annotators
        self._retrain_lock = threading.Lock()

    @property
    def store(self):
        return self.loop.store

    def batch_open(self) -> bool:
        return self.loop.state.iteration >= 1 and bool(self.loop.state.batch_ids)

    def current_batch(self) -> dict:
        if not self.batch_open():
            raise HTTPException(status_code=409, detail="no open batch")
        state = self.loop.state
        return {
            "iteration": state.iteration,
            "batch_size": len(state.batch_ids),
            "open": True,
        }

    def items_for(self, annotator: str, n: int) -> list[dict]:
        if not self.batch_open():
            raise HTTPException(status_code=409, detail="no open batch")
        state = self.loop.state
        out = []
        for tid in state.batch_ids:
            votes = self.store.votes_for(tid, iteration=state.iteration)
            if any(v.annotator_id == annotator for v in votes):
                continue
            out.append({"title_id": tid, "text": self.store.get(tid).text})
            if len(out) >= n:
                break
        return out

    def submit_votes(self, annotator: str, votes: list[VoteIn]) -> list[dict]:
        if not self.batch_open():
            raise HTTPException(status_code=409, detail="no open batch")
        state = self.loop.state
        batch = set(state.batch_ids)
        results = []
        for vote in votes:
            if vote.title_id not in batch:
                results.append(
                    {"title_id": vote.title_id, "status": "rejected",
                     "reason": "title not in open batch"}
                )
                continue
            if vote.verdict not in ("H", "N"):
                results.append(
                    {"title_id": vote.title_id, "status": "rejected",
                     "reason": f"bad verdict {vote.verdict!r}"}
                )
                continue
            existing = [
                v
                for v in self.store.votes_for(vote.title_id, state.iteration)
                if v.annotator_id == annotator
            ]
            if existing:
                if existing[0].verdict == vote.verdict:
                    results.append(
                        {"title_id": vote.title_id, "status": "ok", "idempotent": True}
                    )
                else:
                    results.append(
                        {"title_id": vote.title_id, "status": "conflict",
                         "reason": "differing verdict already recorded"}
                    )
                continue
            try:
                self.store.add_vote(
                    LabelRecord(
                        title_id=vote.title_id,
                        annotator_id=annotator,
                        verdict=vote.verdict,
                        iteration=state.iteration,
                        recorded_at=dt.datetime.now(dt.timezone.utc).isoformat(),
                        idempotency_key=vote.idempotency_key,
                    )
                )
            except CorpusError as exc:
                results.append(
                    {"title_id": vote.title_id, "status": "rejected", "reason": str(exc)}
                )
                continue
            results.append({"title_id": vote.title_id, "status": "ok"})
        return results

    def progress(self) -> dict:
        if not self.batch_open():
            raise HTTPException(status_code=409, detail="no open batch")
        state = self.loop.state
        per_annotator = {a: 0 for a in self.annotators}
        for tid in state.batch_ids:
            for v in self.store.votes_for(tid, iteration=state.iteration):
                if v.annotator_id in per_annotator:
                    per_annotator[v.annotator_id] += 1
        complete = all(n == len(state.batch_ids) for n in per_annotator.values())
        return {
            "iteration": state.iteration,
            "batch_size": len(state.batch_ids),
            "votes_by_annotator": per_annotator,
            "complete": complete,
            "labeled_total": len(self.store.partition().labeled_ids),
        }

    def metrics_history(self) -> list[dict]:
        return list(self.loop.state.metrics_history)

    def close_and_retrain(self, force: bool = False) -> dict:
        if not self.batch_open():
            raise HTTPException(status_code=409, detail="no open batch")
        if not self._retrain_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="busy: retraining in progress")
        try:
            state = self.loop.state
            votes: dict[str, list[str]] = {}
            incomplete = []
            for tid in state.batch_ids:
                recorded = self.store.votes_for(tid, iteration=state.iteration)
                votes[tid] = [v.verdict for v in recorded]
                voters = {v.annotator_id for v in recorded}
                if not set(self.annotators) <= voters:
                    incomplete.append(tid)
            if incomplete and not force:
                raise HTTPException(
                    status_code=409,
                    detail=f"batch incomplete: {len(incomplete)} titles await votes "
                    "(pass force=true to close anyway)",
                )
            try:
                new_state = self.loop.run_iteration(votes, allow_missing=force)
            except HTTPException:
                raise
            except Exception as exc:
                # Atomic transition: the loop left the iteration open.
                raise HTTPException(
                    status_code=500, detail=f"retraining failed: {exc}"
                ) from exc
            return {
                "iteration": new_state.iteration,
                "metrics": new_state.metrics_history[-1],
            }
        finally:
            self._retrain_lock.release()


def create_app(
    controller: AnnotationController, tokens: Mapping[str, str]
) -> FastAPI:
    """Build the FastAPI app; ``tokens`` maps bearer token -> annotator id."""
    app = FastAPI(title="titlescope annotation service")

    def annotator(request: Request) -> str:
        auth = request.headers.get("Authorization", "")
        if not auth.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        token = auth.removeprefix("Bearer ").strip()
        if token not in tokens:
            raise HTTPException(status_code=401, detail="unknown token")
        return tokens[token]

    @app.get("/v1/batch/current")
    def batch_current(_: str = Depends(annotator)):
        return controller.current_batch()

    @app.get("/v1/items")
    def items(n: int = 10, who: str = Depends(annotator)):
        return controller.items_for(who, n)

    @app.post("/v1/votes")
    def votes(body: list[VoteIn], who: str = Depends(annotator)):
        return controller.submit_votes(who, body)

    @app.post("/v1/iterations/close")
    def close(body: CloseIn | None = None, _: str = Depends(annotator)):
        return controller.close_and_retrain(force=bool(body and body.force))

    @app.get("/v1/progress")
    def progress(_: str = Depends(annotator)):
        return controller.progress()

    @app.get("/v1/metrics/history")
    def history(_: str = Depends(annotator)):
        return controller.metrics_history()

    return app
