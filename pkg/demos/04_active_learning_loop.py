#!/usr/bin/env python3
"""The human-guided labeling loop, scripted end to end with an oracle
annotator: bootstrap on a seed sample, then rank -> batch -> consensus ->
retrain for four iterations, tracking validation metrics."""

import numpy as np

from titlescope import ActiveLoop, BatchSpec, ConsensusLabel, CorpusStore
from titlescope import FixtureSpec, generate_fixture
from titlescope.scoring import LogRegTitleScorer

data = generate_fixture(FixtureSpec())
store = CorpusStore(None)
store.add_records(data.records)

# Hold out a validation set with known labels.
rng = np.random.default_rng(99)
all_ids = sorted(data.labels)
val_ids = sorted(np.array(all_ids)[rng.choice(len(all_ids), 400, replace=False)])
store.set_validation_ids(val_ids)
for tid in val_ids:
    store.set_consensus(ConsensusLabel(tid, "H" if data.labels[tid] else "N", 0))

loop = ActiveLoop(
    store,
    LogRegTitleScorer(),
    BatchSpec(batch_size=500, top_fraction=0.9),
    seed=1,
)

# Bootstrap: label a random seed sample, train, open batch 1.
seed_ids = loop.seed_sample(60)
loop.bootstrap({tid: ("H" if data.labels[tid] else "N") for tid in seed_ids})
print(f"bootstrap on {len(seed_ids)} seed labels")

# Three oracle annotators agree with the planted ground truth.
for _ in range(4):
    batch = loop.last_batch
    hyper_share = np.mean([data.labels[t] for t in batch.ids])
    print(
        f"iteration {loop.state.iteration}: batch {len(batch.ids)} "
        f"({len(batch.top_ids)} ranked + {len(batch.random_ids)} random), "
        f"{hyper_share:.0%} actually hyperpartisan"
    )
    votes = {tid: ["H" if data.labels[tid] else "N"] * 3 for tid in batch.ids}
    loop.run_iteration(votes)

print("\nvalidation metrics per iteration:")
print("iter  acc    P      R      F1")
for m in loop.state.metrics_history:
    print(
        f"{m['iteration']:>4}  {m['accuracy']:.3f}  {m['precision']:.3f}  "
        f"{m['recall']:.3f}  {m['f1']:.3f}"
    )
print(f"\nlabeled pool now holds {len(store.partition().labeled_ids)} titles")
