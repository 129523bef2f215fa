#!/usr/bin/env python3
"""Which words drive predicted hyperpartisanship? Approximate the scorer
with L1 logistic regression per (period, group) cell and rank terms by
exact linear Shapley values, aggregated over CV folds."""

from titlescope import FixtureSpec, generate_fixture
from titlescope.analysis import predict_corpus, term_importance_analysis
from titlescope.scoring import LogRegTitleScorer
from titlescope.shapley import ANALYSIS_PERIODS, report_to_markdown

data = generate_fixture(FixtureSpec())
id2rec = {r.id: r for r in data.records}

# Train a scorer on ground truth, then (as in production) take its
# inference over the whole corpus as the labels to explain.
scorer = LogRegTitleScorer()
train_ids = sorted(data.labels)[:2200]
scorer.fit([id2rec[t].text for t in train_ids], [data.labels[t] for t in train_ids])
predictions = predict_corpus(scorer, data.records)
print(f"scorer flags {sum(predictions.values())} of {len(predictions)} titles\n")

reports = term_importance_analysis(
    data.records,
    predictions,
    periods=ANALYSIS_PERIODS,
    min_df=0.005,
    lam=1e-3,
    k=5,
    seed=0,
)

for rep in reports:
    if rep.period != "trump_admin" or rep.bias_group != "Right":
        continue
    print(f"{rep.bias_group} / {rep.period} / {rep.direction}:")
    for t in rep.ranked_terms[:8]:
        print(f"  {t.term:<14} in {t.occurrences}/5 folds, mean |phi| {t.mean_abs_phi:.4f}")
    print()

print("full period x group x direction table (markdown):\n")
print(report_to_markdown(reports)[:1200], "...")
