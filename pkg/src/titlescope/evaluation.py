"""Binary classification metrics, stratified k-fold CV, Cohen's kappa.

The hyperpartisan class (label 1, verdict "H") is always the positive class.
Precision is defined as 0 when nothing is predicted positive, and F1 as 0
when precision + recall is 0.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Metrics",
    "f1_from_pr",
    "evaluate",
    "cohens_kappa",
    "FoldResult",
    "stratified_folds",
    "kfold_cv",
]


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def f1_from_pr(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall (0 when both vanish)."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate(pred: Sequence[int], true: Sequence[int]) -> Metrics:
    pred = np.asarray(pred).ravel()
    true = np.asarray(true).ravel()
    if len(pred) != len(true):
        raise ValueError(f"length mismatch: {len(pred)} predictions, {len(true)} labels")
    if len(pred) == 0:
        raise ValueError("cannot evaluate empty label vectors")
    tp = int(np.sum((pred == 1) & (true == 1)))
    fp = int(np.sum((pred == 1) & (true == 0)))
    fn = int(np.sum((pred == 0) & (true == 1)))
    accuracy = float(np.mean(pred == true))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    return Metrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1_from_pr(precision, recall),
    )


def cohens_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """Inter-annotator agreement: (p_o - p_e) / (1 - p_e)."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ValueError("cannot compute kappa on empty label vectors")
    n = len(a)
    p_o = float(np.mean(a == b))
    categories = np.unique(np.concatenate([a, b]))
    p_e = 0.0
    for c in categories:
        p_e += float(np.mean(a == c)) * float(np.mean(b == c))
    if p_e >= 1.0:
        # Both raters constant on the same category; perfect agreement.
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


@dataclass
class FoldResult:
    fold: int
    train_idx: np.ndarray
    test_idx: np.ndarray
    model: object
    metrics: Metrics


def stratified_folds(
    y: Sequence[int], k: int, seed: int = 0
) -> list[np.ndarray]:
    """Disjoint test folds covering all samples, sizes within 1, stratified
    by label (each class spread round-robin after a seeded shuffle)."""
    y = np.asarray(y).ravel()
    n = len(y)
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} exceeds dataset size {n}")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        rng.shuffle(members)
        for pos, sample in enumerate(members):
            folds[(offset + pos) % k].append(int(sample))
        offset += len(members)
    return [np.asarray(sorted(f), dtype=np.int64) for f in folds]


def kfold_cv(
    X,
    y: Sequence[int],
    trainer: Callable[[object, np.ndarray], object],
    k: int = 5,
    seed: int = 0,
    jobs: int = 1,
) -> list[FoldResult]:
    """Train on k-1 folds, evaluate on the held-out fold, k times.

    ``trainer(X_train, y_train)`` must return a model exposing
    ``predict(X)``. Fold artifacts (model + index sets) are returned for
    downstream attribution analysis.
    """
    y = np.asarray(y).ravel()
    test_folds = stratified_folds(y, k, seed)
    all_idx = np.arange(len(y))

    def run(fold_i: int) -> FoldResult:
        test_idx = test_folds[fold_i]
        train_idx = np.setdiff1d(all_idx, test_idx)
        model = trainer(X[train_idx], y[train_idx])
        pred = model.predict(X[test_idx])
        return FoldResult(
            fold=fold_i,
            train_idx=train_idx,
            test_idx=test_idx,
            model=model,
            metrics=evaluate(pred, y[test_idx]),
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, range(k)))
    return [run(i) for i in range(k)]
