"""Title scorers: trainable pipelines over raw titles plus the external
HTTP scorer protocol client.

Every scorer exposes the same surface — ``fit(texts, labels)`` and
``score_titles(texts) -> probabilities`` — so the active-learning loop and
the trend analyses can swap classifiers freely. The external protocol keeps
transformer models out of this package entirely:

    POST /score {"titles": [...]}   -> {"probs": [...]}  (same length/order)
    POST /train {"examples": [{"text": ..., "label": 0|1}, ...]} -> {"status": "ok"}
    GET  /health                    -> 200
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import httpx
import numpy as np

from .boosting import GbtModel, train_gbt
from .features import (
    CooccurrenceMatrix,
    binary_matrix,
    build_cooccurrence,
    build_vocab,
    cooc_mean_matrix,
)
from .linear import LogRegModel, train_l1_logreg
from .textprep import Normalizer, default_normalizer

__all__ = [
    "ScorerHandle",
    "TitleScorer",
    "ScoringError",
    "LogRegTitleScorer",
    "GbtTitleScorer",
    "ExternalScorerClient",
    "ExternalTitleScorer",
    "make_scorer",
    "load_scorer",
]


@dataclass(frozen=True)
class ScorerHandle:
    kind: str  # "logreg" | "gbt" | "external"
    endpoint: str | None = None

    def __post_init__(self):
        if self.kind not in ("logreg", "gbt", "external"):
            raise ValueError(f"unknown scorer kind {self.kind!r}")
        if self.kind == "external" and not self.endpoint:
            raise ValueError("external scorer requires an endpoint URL")


class TitleScorer(Protocol):
    scorer_id: str

    def fit(self, texts: Sequence[str], labels: Sequence[int]) -> None: ...

    def score_titles(self, texts: Sequence[str]) -> np.ndarray: ...


class ScoringError(RuntimeError):
    """Scoring aborted; ``scored`` holds probabilities for the prefix of
    titles that completed, enabling checkpoint resume."""

    def __init__(self, message: str, scored: list[float] | None = None):
        super().__init__(message)
        self.scored = scored or []


class LogRegTitleScorer:
    """Binarized bag-of-words + L1 logistic regression over raw titles.

    The vocabulary is rebuilt from the training texts on every fit so no
    unlabeled data leaks into the representation.
    """

    scorer_id = "logreg-bow"

    def __init__(
        self,
        lam: float = 1e-3,
        min_df: float = 0.005,
        normalizer: Normalizer | None = None,
    ):
        self.lam = lam
        self.min_df = min_df
        self.normalizer = normalizer or default_normalizer()
        self.model: LogRegModel | None = None

    def fit(self, texts: Sequence[str], labels: Sequence[int]) -> None:
        docs = [self.normalizer.normalize(t) for t in texts]
        vocab = build_vocab(docs, self.min_df)
        X = binary_matrix(docs, vocab)
        self.model = train_l1_logreg(X, np.asarray(labels), lam=self.lam, vocab=vocab)

    def score_titles(self, texts: Sequence[str]) -> np.ndarray:
        if self.model is None or self.model.vocab is None:
            raise ScoringError("scorer has not been trained")
        docs = [self.normalizer.normalize(t) for t in texts]
        X = binary_matrix(docs, self.model.vocab)
        return self.model.predict_proba(X)

    def save(self, path: str | Path) -> None:
        if self.model is None:
            raise ScoringError("nothing to save: scorer has not been trained")
        self.model.save(path)

    def load(self, path: str | Path) -> None:
        self.model = LogRegModel.load(path)


class GbtTitleScorer:
    """Bigram co-occurrence mean vectors + gradient-boosted trees.

    Mirrors the bag-of-words reference setup: the co-occurrence matrix is
    built from the training split only and each title is the mean of its
    tokens' co-occurrence rows.
    """

    scorer_id = "gbt-bow"

    def __init__(
        self,
        n_estimators: int = 200,
        depth: int = 3,
        learning_rate: float = 0.1,
        min_df: float = 0.005,
        normalizer: Normalizer | None = None,
    ):
        self.n_estimators = n_estimators
        self.depth = depth
        self.learning_rate = learning_rate
        self.min_df = min_df
        self.normalizer = normalizer or default_normalizer()
        self.model: GbtModel | None = None
        self.cooc: CooccurrenceMatrix | None = None

    def fit(self, texts: Sequence[str], labels: Sequence[int]) -> None:
        docs = [self.normalizer.normalize(t) for t in texts]
        vocab = build_vocab(docs, self.min_df)
        self.cooc = build_cooccurrence(docs, vocab)
        X = cooc_mean_matrix(docs, self.cooc)
        self.model = train_gbt(
            X,
            np.asarray(labels),
            n_estimators=self.n_estimators,
            depth=self.depth,
            learning_rate=self.learning_rate,
        )

    def score_titles(self, texts: Sequence[str]) -> np.ndarray:
        if self.model is None or self.cooc is None:
            raise ScoringError("scorer has not been trained")
        docs = [self.normalizer.normalize(t) for t in texts]
        X = cooc_mean_matrix(docs, self.cooc)
        return self.model.predict_proba(X)


class ExternalScorerClient:
    """HTTP client for the external scorer wire protocol.

    A preconfigured ``httpx.Client`` may be injected (e.g. with an ASGI
    transport in tests); otherwise one is built for the base URL.
    """

    def __init__(
        self,
        base_url: str,
        timeout: float = 60.0,
        batch_size: int = 256,
        http: httpx.Client | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.batch_size = batch_size
        self._http = http or httpx.Client(timeout=timeout)

    def health(self) -> bool:
        try:
            resp = self._http.get(f"{self.base_url}/health", timeout=self.timeout)
            return resp.status_code == 200
        except httpx.HTTPError:
            return False

    def score(self, titles: Sequence[str], scored: list[float] | None = None) -> np.ndarray:
        """Score titles in batches; ``scored`` resumes from a partial run."""
        probs: list[float] = list(scored) if scored else []
        while len(probs) < len(titles):
            batch = list(titles[len(probs) : len(probs) + self.batch_size])
            try:
                resp = self._http.post(
                    f"{self.base_url}/score",
                    json={"titles": batch},
                    timeout=self.timeout,
                )
                resp.raise_for_status()
                got = resp.json()["probs"]
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                raise ScoringError(
                    f"external scorer failed after {len(probs)} titles: {exc}",
                    scored=probs,
                ) from exc
            if len(got) != len(batch):
                raise ScoringError(
                    f"protocol violation: sent {len(batch)} titles, got {len(got)} probs",
                    scored=probs,
                )
            probs.extend(float(p) for p in got)
        return np.asarray(probs)

    def train(self, texts: Sequence[str], labels: Sequence[int]) -> None:
        examples = [
            {"text": t, "label": int(l)} for t, l in zip(texts, labels, strict=True)
        ]
        try:
            resp = self._http.post(
                f"{self.base_url}/train",
                json={"examples": examples},
                timeout=None,  # training is synchronous and unbounded
            )
            resp.raise_for_status()
            status = resp.json().get("status")
        except (httpx.HTTPError, ValueError) as exc:
            raise ScoringError(f"external training failed: {exc}") from exc
        if status != "ok":
            raise ScoringError(f"external training returned status {status!r}")


class ExternalTitleScorer:
    """TitleScorer facade over the protocol client."""

    def __init__(self, client: ExternalScorerClient):
        self.client = client
        self.scorer_id = f"external:{client.base_url}"

    def fit(self, texts: Sequence[str], labels: Sequence[int]) -> None:
        self.client.train(texts, labels)

    def score_titles(self, texts: Sequence[str]) -> np.ndarray:
        return self.client.score(texts)


def make_scorer(handle: ScorerHandle, **kwargs) -> TitleScorer:
    if handle.kind == "logreg":
        return LogRegTitleScorer(**kwargs)
    if handle.kind == "gbt":
        return GbtTitleScorer(**kwargs)
    client = ExternalScorerClient(handle.endpoint, **kwargs)
    if not client.health():
        raise ScoringError(f"external scorer at {handle.endpoint} is unreachable")
    return ExternalTitleScorer(client)


def load_scorer(path: str | Path) -> LogRegTitleScorer:
    """Reload a saved logistic title scorer artifact."""
    scorer = LogRegTitleScorer()
    scorer.load(path)
    return scorer


def protocol_app(scorer: TitleScorer):
    """Wrap any title scorer in the external-protocol HTTP surface.

    Lets internal scorers stand behind the same wire contract as remote
    ones, which is how the protocol conformance suite exercises both.
    """
    from fastapi import FastAPI, HTTPException

    app = FastAPI(title=f"scorer: {getattr(scorer, 'scorer_id', 'unknown')}")

    @app.get("/health")
    def health():
        return {"status": "ok", "scorer_id": getattr(scorer, "scorer_id", "unknown")}

    @app.post("/score")
    def score(body: dict):
        titles = body.get("titles")
        if not isinstance(titles, list):
            raise HTTPException(status_code=422, detail="body must carry 'titles'")
        try:
            probs = scorer.score_titles([str(t) for t in titles])
        except ScoringError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"probs": [float(p) for p in probs]}

    @app.post("/train")
    def train(body: dict):
        examples = body.get("examples")
        if not isinstance(examples, list) or not examples:
            raise HTTPException(status_code=422, detail="body must carry 'examples'")
        texts = [str(e["text"]) for e in examples]
        labels = [int(e["label"]) for e in examples]
        try:
            scorer.fit(texts, labels)
        except Exception as exc:  # surface as protocol error, never silent
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"status": "ok"}

    return app
