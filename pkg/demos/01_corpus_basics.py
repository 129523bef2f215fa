#!/usr/bin/env python3
"""Corpus store walkthrough: generate a synthetic corpus, ingest it,
query slices and summarize labeled counts per year."""

import datetime as dt
import tempfile
from pathlib import Path

from titlescope import ConsensusLabel, CorpusStore, FixtureSpec, write_fixture

workdir = Path(tempfile.mkdtemp(prefix="titlescope_demo_"))
print(f"working in {workdir}\n")

# 1. Generate a small planted-signal corpus and ingest it.
data = write_fixture(workdir / "fx", FixtureSpec(n_titles=600, seed=42))
store = CorpusStore(workdir / "corpus")
report = store.ingest(workdir / "fx" / "corpus.jsonl")
print(f"ingested {report.count} titles, rejected {report.rejected}")

# Re-ingesting the same file rejects every row (duplicate ids).
report = store.ingest(workdir / "fx" / "corpus.jsonl")
print(f"re-ingest: {report.count} accepted, {report.rejected} duplicates rejected\n")

# 2. Query slices.
right_2016 = store.query(
    bias_group="Right", date_range=(dt.date(2016, 1, 1), dt.date(2016, 12, 31))
)
print(f"Right-leaning 2016 titles: {len(right_2016)}")
print("first three:")
for rec in right_2016[:3]:
    print(f"  {rec.date} {rec.outlet:>20}: {rec.text[:60]}")

# 3. Attach ground-truth consensus labels and summarize per year.
for tid, label in data.labels.items():
    store.set_consensus(ConsensusLabel(tid, "H" if label else "N", 0))

print("\nyear  hyper  non-hyper")
for year, hyper, nonhyper in store.summarize("labeled"):
    print(f"{year}  {hyper:5d}  {nonhyper:9d}")
