#!/usr/bin/env python3
"""Hyperpartisan-proportion trends: monthly series per bias group, relative
change against the 2014 baseline, scorer-swap robustness, and the
deterministic figure-data files."""

import tempfile
from pathlib import Path

import numpy as np

from titlescope import FixtureSpec, generate_fixture, monthly_proportion
from titlescope.analysis import predict_corpus, trend_analysis
from titlescope.scoring import GbtTitleScorer, LogRegTitleScorer
from titlescope.trends import emit_figure_data, signs_agree, yearly_proportions

data = generate_fixture(FixtureSpec())
id2rec = {r.id: r for r in data.records}
rng = np.random.default_rng(1)
train_ids = sorted(np.array(sorted(data.labels))[rng.choice(len(data.labels), 2200, replace=False)])
texts = [id2rec[t].text for t in train_ids]
labels = [data.labels[t] for t in train_ids]

lr = LogRegTitleScorer()
lr.fit(texts, labels)
preds = predict_corpus(lr, data.records)

proportions, changes = trend_analysis(data.records, preds, lr.scorer_id)
print("yearly hyperpartisan proportion by group (logistic scorer):")
print("year   " + "  ".join(f"{s.bias_group:>7}" for s in proportions))
yearly = {s.bias_group: yearly_proportions(s) for s in proportions}
for year in range(2014, 2023):
    row = "  ".join(f"{yearly[s.bias_group][year]:7.3f}" for s in proportions)
    print(f"{year}   {row}")

print("\nrelative change vs 2014 baseline (yearly means):")
for rc in changes:
    peak_year, peak = max(rc.yearly, key=lambda yv: yv[1])
    print(f"  {rc.bias_group:>7}: baseline {rc.baseline:.3f}, "
          f"peak {peak:+.1f}% in {peak_year}")

# Swap in the boosted-tree scorer: trend signs should not change.
gbt = GbtTitleScorer()
gbt.fit(texts, labels)
preds_gbt = predict_corpus(gbt, data.records)
agreement = all(
    signs_agree(
        yearly_proportions(monthly_proportion(data.records, preds, g)),
        yearly_proportions(monthly_proportion(data.records, preds_gbt, g)),
    )
    for g in ("Left", "Central", "Right", None)
)
print(f"\nscorer swap (L1-LR vs GBT): year-over-year signs agree = {agreement}")

out = Path(tempfile.mkdtemp(prefix="titlescope_figs_"))
manifest = emit_figure_data(
    out,
    proportion_series=proportions,
    change_series=changes,
    scorer_id=lr.scorer_id,
    config_hash="demo",
    extra={"seed": 1},
)
print(f"\nfigure data written to {out}: {', '.join(manifest['files'])}")
