"""Protocol-conformant HTTP surface around the transformer classifier.

    GET  /health -> 200 with the model card
    POST /train  {"examples": [{"text": str, "label": 0|1}, ...]} -> {"status": "ok"}
    POST /score  {"titles": [str, ...]} -> {"probs": [float, ...]}

Training runs one job at a time (concurrent /train gets 409 busy); out of
memory and other runtime failures surface as protocol errors, never as
silently truncated responses.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException

from .config import AdapterConfig
from .model import TitleClassifier

__all__ = ["create_app"]


def create_app(
    config: AdapterConfig | None = None,
    classifier: TitleClassifier | None = None,
    checkpoint_dir: str | Path | None = None,
) -> FastAPI:
    clf = classifier or TitleClassifier(config)
    app = FastAPI(title="titlescope transformer scorer")
    train_lock = threading.Lock()

    @app.get("/health")
    def health():
        return {"status": "ok", **clf.model_card()}

    @app.post("/train")
    def train(body: dict):
        examples = body.get("examples")
        if not isinstance(examples, list) or not examples:
            raise HTTPException(status_code=422, detail="body must carry 'examples'")
        try:
            texts = [str(e["text"]) for e in examples]
            labels = [int(e["label"]) for e in examples]
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=f"bad example: {exc}") from exc
        if any(l not in (0, 1) for l in labels):
            raise HTTPException(status_code=422, detail="labels must be 0 or 1")
        if not train_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="busy: training in progress")
        try:
            clf.train(texts, labels)
            if checkpoint_dir is not None:
                clf.save(Path(checkpoint_dir) / "latest")
        except HTTPException:
            raise
        except (RuntimeError, MemoryError, ValueError) as exc:
            raise HTTPException(status_code=507, detail=f"training failed: {exc}") from exc
        finally:
            train_lock.release()
        return {"status": "ok"}

    @app.post("/score")
    def score(body: dict):
        titles = body.get("titles")
        if not isinstance(titles, list):
            raise HTTPException(status_code=422, detail="body must carry 'titles'")
        try:
            probs = clf.score([str(t) for t in titles])
        except (RuntimeError, MemoryError) as exc:
            raise HTTPException(status_code=507, detail=f"scoring failed: {exc}") from exc
        if len(probs) != len(titles):
            # never answer with a silently truncated batch
            raise HTTPException(status_code=500, detail="internal length mismatch")
        return {"probs": [float(p) for p in probs]}

    return app
