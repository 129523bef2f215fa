#!/usr/bin/env python3
"""Classical learners on the planted-signal corpus: binarized bag-of-words
with L1 logistic regression, co-occurrence features with boosted trees,
5-fold cross-validation and inter-annotator agreement."""

import numpy as np

from titlescope import (
    FixtureSpec,
    build_cooccurrence,
    build_vocab,
    cohens_kappa,
    generate_fixture,
    kfold_cv,
    train_gbt,
    train_l1_logreg,
)
from titlescope.features import binary_matrix, cooc_mean_matrix
from titlescope.textprep import default_normalizer

data = generate_fixture(FixtureSpec(n_titles=1500, seed=2))
norm = default_normalizer()
docs = [norm.normalize(r.text) for r in data.records]
y = np.array([data.labels[r.id] for r in data.records])
print(f"{len(docs)} titles, {y.mean():.1%} hyperpartisan")

# Document-frequency-filtered vocabulary (0.5% threshold).
vocab = build_vocab(docs, min_df=0.005)
print(f"vocabulary: {len(vocab)} terms\n")

# L1 logistic regression on binarized bag-of-words.
X_bin = binary_matrix(docs, vocab)
folds = kfold_cv(
    X_bin, y,
    trainer=lambda Xt, yt: train_l1_logreg(Xt, yt, lam=1e-3, vocab=vocab),
    k=5, seed=0,
)
print("L1 logistic regression, 5-fold CV:")
for f in folds:
    m = f.metrics
    nonzero = int(np.sum(f.model.weights != 0))
    print(
        f"  fold {f.fold}: acc={m.accuracy:.3f} P={m.precision:.3f} "
        f"R={m.recall:.3f} F1={m.f1:.3f}  ({nonzero} nonzero weights)"
    )
print(f"  mean accuracy: {np.mean([f.metrics.accuracy for f in folds]):.3f}\n")

# Gradient-boosted trees on bigram co-occurrence mean vectors.
cooc = build_cooccurrence(docs, vocab)
X_cooc = cooc_mean_matrix(docs, cooc)
folds_gbt = kfold_cv(
    X_cooc, y,
    trainer=lambda Xt, yt: train_gbt(Xt, yt, n_estimators=100, depth=3),
    k=5, seed=0,
)
print("gradient-boosted trees on co-occurrence features, 5-fold CV:")
print(f"  mean accuracy: {np.mean([f.metrics.accuracy for f in folds_gbt]):.3f}\n")

# Agreement between two simulated annotators who disagree 15% of the time.
rng = np.random.default_rng(0)
a = np.where(y == 1, "H", "N")
flips = rng.random(len(a)) < 0.15
b = np.where(flips, np.where(a == "H", "N", "H"), a)
print(f"Cohen's kappa between two noisy annotators: {cohens_kappa(a, b):.2f}")
