import numpy as np
import pytest

from titlescope.scoring import (
    ExternalScorerClient,
    ExternalTitleScorer,
    GbtTitleScorer,
    LogRegTitleScorer,
    ScorerHandle,
    ScoringError,
    protocol_app,
)

from .protocol_conformance import check_protocol


def asgi_client(app, timeout=10.0, batch_size=256) -> ExternalScorerClient:
    # TestClient is a synchronous httpx.Client wired straight to the app.
    from fastapi.testclient import TestClient

    return ExternalScorerClient(
        "http://testserver", timeout=timeout, batch_size=batch_size, http=TestClient(app)
    )


class TestScorerHandle:
    def test_kinds_validated(self):
        with pytest.raises(ValueError):
            ScorerHandle(kind="nonsense")

    def test_external_requires_endpoint(self):
        with pytest.raises(ValueError):
            ScorerHandle(kind="external")


class TestLogRegPipeline:
    def test_fit_score_separates(self):
        texts = [f"slam outrage attack {i}" for i in range(20)] + [
            f"calm garden recipe {i}" for i in range(20)
        ]
        labels = [1] * 20 + [0] * 20
        scorer = LogRegTitleScorer(min_df=0.0)
        scorer.fit(texts, labels)
        probs = scorer.score_titles(["slam outrage tonight", "calm garden tips"])
        assert probs[0] > 0.5 > probs[1]

    def test_unfitted_scorer_raises(self):
        with pytest.raises(ScoringError):
            LogRegTitleScorer().score_titles(["anything"])

    def test_save_load_roundtrip(self, tmp_path):
        texts = [f"slam attack {i}" for i in range(10)] + [
            f"calm recipe {i}" for i in range(10)
        ]
        scorer = LogRegTitleScorer(min_df=0.0)
        scorer.fit(texts, [1] * 10 + [0] * 10)
        path = tmp_path / "scorer.json"
        scorer.save(path)
        again = LogRegTitleScorer()
        again.load(path)
        batch = ["slam verdict", "recipe corner"]
        assert np.allclose(again.score_titles(batch), scorer.score_titles(batch))


class TestGbtPipeline:
    def test_fit_score_separates(self):
        texts = [f"slam outrage attack {i}" for i in range(30)] + [
            f"calm garden recipe {i}" for i in range(30)
        ]
        labels = [1] * 30 + [0] * 30
        scorer = GbtTitleScorer(n_estimators=30, min_df=0.0)
        scorer.fit(texts, labels)
        probs = scorer.score_titles(["slam outrage now", "garden recipe now"])
        assert probs[0] > 0.5 > probs[1]


class TestExternalClient:
    def test_conformance_against_internal_scorer(self):
        client = asgi_client(protocol_app(LogRegTitleScorer(min_df=0.0)))
        accuracy = check_protocol(client)
        assert accuracy >= 0.9

    def test_batched_scoring_order_preserved(self):
        scorer = LogRegTitleScorer(min_df=0.0)
        texts = [f"slam attack {i}" for i in range(10)] + [
            f"calm recipe {i}" for i in range(10)
        ]
        scorer.fit(texts, [1] * 10 + [0] * 10)
        client = asgi_client(protocol_app(scorer), batch_size=3)
        probs = client.score(texts)
        direct = scorer.score_titles(texts)
        assert np.allclose(probs, direct, atol=1e-9)

    def test_health_false_when_unreachable(self):
        client = ExternalScorerClient("http://127.0.0.1:1", timeout=0.2)
        assert not client.health()

    def test_length_mismatch_is_protocol_error(self):
        from fastapi import FastAPI

        bad = FastAPI()

        @bad.get("/health")
        def health():
            return {"status": "ok"}

        @bad.post("/score")
        def score(body: dict):
            return {"probs": [0.5]}  # always one prob, violating the contract

        client = asgi_client(bad, batch_size=10)
        with pytest.raises(ScoringError):
            client.score(["a", "b", "c"])

    def test_partial_failure_carries_scored_prefix(self):
        from fastapi import FastAPI, HTTPException

        calls = {"n": 0}
        flaky = FastAPI()

        @flaky.post("/score")
        def score(body: dict):
            calls["n"] += 1
            if calls["n"] > 1:
                raise HTTPException(status_code=503, detail="down")
            return {"probs": [0.25] * len(body["titles"])}

        client = asgi_client(flaky, batch_size=2)
        with pytest.raises(ScoringError) as err:
            client.score(["a", "b", "c", "d", "e"])
        assert err.value.scored == [0.25, 0.25]
        # resume completes without rescoring the prefix (2 batches remain)
        calls["n"] = -10
        probs = client.score(["a", "b", "c", "d", "e"], scored=err.value.scored)
        assert len(probs) == 5

    def test_train_status_checked(self):
        from fastapi import FastAPI

        app = FastAPI()

        @app.post("/train")
        def train(body: dict):
            return {"status": "error"}

        client = asgi_client(app)
        with pytest.raises(ScoringError):
            client.train(["x"], [1])

    def test_external_title_scorer_facade(self):
        client = asgi_client(protocol_app(LogRegTitleScorer(min_df=0.0)))
        scorer = ExternalTitleScorer(client)
        texts = [f"slam attack {i}" for i in range(10)] + [
            f"calm recipe {i}" for i in range(10)
        ]
        scorer.fit(texts, [1] * 10 + [0] * 10)
        probs = scorer.score_titles(["slam attack today"])
        assert probs[0] > 0.5
