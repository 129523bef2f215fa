import datetime as dt

import numpy as np
import pytest
from fastapi.testclient import TestClient

from titlescope.active import ActiveLoop, BatchSpec
from titlescope.corpus import ConsensusLabel, CorpusStore, TitleRecord
from titlescope.scoring import LogRegTitleScorer
from titlescope.service import AnnotationController, create_app

TOKENS = {"tok-a": "ann-a", "tok-b": "ann-b", "tok-c": "ann-c"}


def auth(token):
    return {"Authorization": f"Bearer {token}"}


def build_world(batch_size=12, seed=0, n=240):
    rng = np.random.default_rng(seed)
    records, labels = [], {}
    for i in range(n):
        year = 2014 + i % 9
        hyper = rng.random() < 0.3
        text = ("slam panic attack " if hyper else "calm garden news ") + f"story {i}"
        tid = f"t{i:04d}"
        records.append(
            TitleRecord(tid, text, "NBC", "Left", dt.date(year, 1 + i % 12, 2))
        )
        labels[tid] = int(hyper)
    store = CorpusStore(None)
    store.add_records(records)
    val_ids = [r.id for r in records[:30]]
    store.set_validation_ids(val_ids)
    for tid in val_ids:
        store.set_consensus(ConsensusLabel(tid, "H" if labels[tid] else "N", 0))
    loop = ActiveLoop(
        store,
        LogRegTitleScorer(min_df=0.0),
        BatchSpec(batch_size=batch_size, top_fraction=0.9, candidate_sample_size=80),
        seed=seed,
    )
    loop.bootstrap({tid: ("H" if labels[tid] else "N") for tid in loop.seed_sample(30)})
    controller = AnnotationController(loop, tuple(sorted(TOKENS.values())))
    return TestClient(create_app(controller, TOKENS)), controller, labels


@pytest.fixture()
def world():
    return build_world()


class TestAuth:
    def test_missing_token_rejected(self, world):
        client, _, _ = world
        assert client.get("/v1/batch/current").status_code == 401

    def test_unknown_token_rejected(self, world):
        client, _, _ = world
        assert client.get("/v1/batch/current", headers=auth("nope")).status_code == 401


class TestItemsAndVotes:
    def test_fresh_session_gets_first_items(self, world):
        client, controller, _ = world
        resp = client.get("/v1/items?n=5", headers=auth("tok-a"))
        assert resp.status_code == 200
        items = resp.json()
        assert len(items) == 5
        assert [i["title_id"] for i in items] == list(
            controller.loop.state.batch_ids[:5]
        )
        assert all("text" in i for i in items)

    def test_items_skip_already_voted(self, world):
        client, controller, labels = world
        first = client.get("/v1/items?n=1", headers=auth("tok-a")).json()[0]
        votes = [{"title_id": first["title_id"], "verdict": "H", "idempotency_key": "k1"}]
        assert client.post("/v1/votes", json=votes, headers=auth("tok-a")).json()[0][
            "status"
        ] == "ok"
        nxt = client.get("/v1/items?n=1", headers=auth("tok-a")).json()[0]
        assert nxt["title_id"] != first["title_id"]
        # a different annotator still sees the first item
        other = client.get("/v1/items?n=1", headers=auth("tok-b")).json()[0]
        assert other["title_id"] == first["title_id"]

    def test_exhausted_batch_returns_empty(self, world):
        client, controller, labels = world
        batch = controller.loop.state.batch_ids
        votes = [
            {"title_id": tid, "verdict": "H", "idempotency_key": f"k{tid}"}
            for tid in batch
        ]
        client.post("/v1/votes", json=votes, headers=auth("tok-a"))
        assert client.get("/v1/items?n=10", headers=auth("tok-a")).json() == []

    def test_idempotent_replay(self, world):
        client, controller, _ = world
        tid = controller.loop.state.batch_ids[0]
        vote = [{"title_id": tid, "verdict": "H", "idempotency_key": "dup"}]
        first = client.post("/v1/votes", json=vote, headers=auth("tok-a")).json()[0]
        again = client.post("/v1/votes", json=vote, headers=auth("tok-a")).json()[0]
        assert first["status"] == "ok"
        assert again == {"title_id": tid, "status": "ok", "idempotent": True}
        assert len(controller.store.votes_for(tid)) == 1

    def test_changed_verdict_conflicts(self, world):
        client, controller, _ = world
        tid = controller.loop.state.batch_ids[0]
        client.post(
            "/v1/votes",
            json=[{"title_id": tid, "verdict": "H", "idempotency_key": "x1"}],
            headers=auth("tok-a"),
        )
        resp = client.post(
            "/v1/votes",
            json=[{"title_id": tid, "verdict": "N", "idempotency_key": "x2"}],
            headers=auth("tok-a"),
        ).json()[0]
        assert resp["status"] == "conflict"

    def test_vote_outside_batch_rejected(self, world):
        client, _, _ = world
        resp = client.post(
            "/v1/votes",
            json=[{"title_id": "t9999", "verdict": "H", "idempotency_key": "z"}],
            headers=auth("tok-a"),
        ).json()[0]
        assert resp["status"] == "rejected"

    def test_bad_verdict_rejected(self, world):
        client, controller, _ = world
        tid = controller.loop.state.batch_ids[0]
        resp = client.post(
            "/v1/votes",
            json=[{"title_id": tid, "verdict": "X", "idempotency_key": "z"}],
            headers=auth("tok-a"),
        ).json()[0]
        assert resp["status"] == "rejected"


class TestProgressAndClose:
    def vote_all(self, client, controller, labels, tokens=("tok-a", "tok-b", "tok-c")):
        for token in tokens:
            votes = [
                {
                    "title_id": tid,
                    "verdict": "H" if labels[tid] else "N",
                    "idempotency_key": f"{token}-{tid}",
                }
                for tid in controller.loop.state.batch_ids
            ]
            resp = client.post("/v1/votes", json=votes, headers=auth(token))
            assert all(v["status"] == "ok" for v in resp.json())

    def test_progress_counts_match_store(self, world):
        client, controller, labels = world
        self.vote_all(client, controller, labels, tokens=("tok-a",))
        progress = client.get("/v1/progress", headers=auth("tok-b")).json()
        batch = controller.loop.state.batch_ids
        assert progress["votes_by_annotator"]["ann-a"] == len(batch)
        assert progress["votes_by_annotator"]["ann-b"] == 0
        assert not progress["complete"]
        store_total = sum(
            1
            for tid in batch
            for v in controller.store.votes_for(tid, controller.loop.state.iteration)
        )
        assert store_total == len(batch)

    def test_close_incomplete_batch_409(self, world):
        client, _, _ = world
        resp = client.post("/v1/iterations/close", json={}, headers=auth("tok-a"))
        assert resp.status_code == 409

    def test_full_cycle_close(self, world):
        client, controller, labels = world
        self.vote_all(client, controller, labels)
        assert client.get("/v1/progress", headers=auth("tok-a")).json()["complete"]
        resp = client.post("/v1/iterations/close", json={}, headers=auth("tok-a"))
        assert resp.status_code == 200
        body = resp.json()
        assert body["iteration"] == 2
        assert {"accuracy", "precision", "recall", "f1"} <= set(body["metrics"])
        history = client.get("/v1/metrics/history", headers=auth("tok-a")).json()
        assert len(history) == 2

    def test_force_close_with_missing_annotator(self, world):
        client, controller, labels = world
        self.vote_all(client, controller, labels, tokens=("tok-a", "tok-b"))
        resp = client.post(
            "/v1/iterations/close", json={"force": True}, headers=auth("tok-a")
        )
        assert resp.status_code == 200
        # two matching votes form a strict majority, so labels were resolved
        assert len(controller.store.partition().labeled_ids) > 30

    def test_busy_while_retraining(self, world):
        client, controller, labels = world
        self.vote_all(client, controller, labels)
        assert controller._retrain_lock.acquire(blocking=False)
        try:
            resp = client.post("/v1/iterations/close", json={}, headers=auth("tok-a"))
            assert resp.status_code == 409
            assert "busy" in resp.json()["detail"]
        finally:
            controller._retrain_lock.release()

    def test_crash_during_retrain_leaves_iteration_open(self, world):
        client, controller, labels = world
        self.vote_all(client, controller, labels)

        class Exploding:
            scorer_id = "exploding"

            def fit(self, texts, labels):
                raise RuntimeError("injected retrain crash")

            def score_titles(self, texts):
                return np.full(len(texts), 0.5)

        state_before = controller.loop.state
        labeled_before = controller.store.partition().labeled_ids
        controller.loop.scorer = Exploding()
        resp = client.post("/v1/iterations/close", json={}, headers=auth("tok-a"))
        assert resp.status_code == 500
        assert "retraining failed" in resp.json()["detail"]
        assert controller.loop.state == state_before
        assert controller.store.partition().labeled_ids == labeled_before
        # the batch is still open and votable
        assert client.get("/v1/batch/current", headers=auth("tok-a")).json()["open"]


def test_no_open_batch_is_409():
    store = CorpusStore(None)
    store.add_records(
        [TitleRecord("t0", "Calm title", "NBC", "Left", dt.date(2015, 1, 1))]
    )
    loop = ActiveLoop(store, LogRegTitleScorer(), BatchSpec(batch_size=5), seed=0)
    controller = AnnotationController(loop, ("ann-a",))
    client = TestClient(create_app(controller, TOKENS))
    for path in ("/v1/batch/current", "/v1/items?n=3", "/v1/progress"):
        assert client.get(path, headers=auth("tok-a")).status_code == 409
    assert (
        client.post("/v1/votes", json=[], headers=auth("tok-a")).status_code == 409
    )
