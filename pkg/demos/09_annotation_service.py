#!/usr/bin/env python3
"""Drive the annotation HTTP service headlessly: three annotators fetch
items, vote with idempotency keys (every request retried once), and an
operator closes the iteration to trigger consensus + retraining.

To serve the same API over a real socket:  titlescope active serve --config run.toml
"""

import numpy as np
from fastapi.testclient import TestClient

from titlescope import ActiveLoop, BatchSpec, ConsensusLabel, CorpusStore
from titlescope import FixtureSpec, generate_fixture
from titlescope.scoring import LogRegTitleScorer
from titlescope.service import AnnotationController, create_app

data = generate_fixture(FixtureSpec(n_titles=800, seed=21))
store = CorpusStore(None)
store.add_records(data.records)
rng = np.random.default_rng(3)
ids = sorted(data.labels)
val_ids = sorted(np.array(ids)[rng.choice(len(ids), 80, replace=False)])
store.set_validation_ids(val_ids)
for tid in val_ids:
    store.set_consensus(ConsensusLabel(tid, "H" if data.labels[tid] else "N", 0))

loop = ActiveLoop(
    store, LogRegTitleScorer(min_df=0.0),
    BatchSpec(batch_size=40, top_fraction=0.9, candidate_sample_size=300), seed=4,
)
loop.bootstrap({tid: ("H" if data.labels[tid] else "N") for tid in loop.seed_sample(60)})

tokens = {"tok-a": "ann-a", "tok-b": "ann-b", "tok-c": "ann-c"}
controller = AnnotationController(loop, tuple(sorted(tokens.values())))
client = TestClient(create_app(controller, tokens))

print(client.get("/v1/batch/current", headers={"Authorization": "Bearer tok-a"}).json())

for token in tokens:
    headers = {"Authorization": f"Bearer {token}"}
    voted = 0
    while True:
        items = client.get("/v1/items?n=10", headers=headers).json()
        if not items:
            break
        votes = [
            {
                "title_id": it["title_id"],
                "verdict": "H" if data.labels[it["title_id"]] else "N",
                "idempotency_key": f"{token}:{it['title_id']}",
            }
            for it in items
        ]
        client.post("/v1/votes", json=votes, headers=headers)
        # a network retry replays the same keys; the service stays exactly-once
        replay = client.post("/v1/votes", json=votes, headers=headers).json()
        assert all(v.get("idempotent") for v in replay)
        voted += len(votes)
    print(f"{tokens[token]} voted on {voted} titles (with one retry per request)")

progress = client.get("/v1/progress", headers={"Authorization": "Bearer tok-a"}).json()
print(f"progress: {progress['votes_by_annotator']}, complete={progress['complete']}")

closed = client.post(
    "/v1/iterations/close", json={}, headers={"Authorization": "Bearer tok-a"}
).json()
print(f"closed -> iteration {closed['iteration']}, "
      f"validation F1 {closed['metrics']['f1']:.3f}")
history = client.get(
    "/v1/metrics/history", headers={"Authorization": "Bearer tok-a"}
).json()
print(f"metrics history now has {len(history)} rows")
