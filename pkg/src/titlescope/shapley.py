"""Term importance via exact Shapley values of a linear surrogate.

For a linear model over independent binary features the Shapley value has
the closed form phi_ij = w_j * (x_ij - mu_j) against a background of
per-feature training means. Terms are ranked by mean |phi| within each CV
fold and aggregated across folds by occurrence count, reproducing the
reported-terms methodology.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .features import Vocabulary
from .linear import LogRegModel

__all__ = [
    "ANALYSIS_PERIODS",
    "TermScore",
    "AttributionReport",
    "linear_shap",
    "base_value",
    "top_terms_per_fold",
    "aggregate_folds",
    "report_to_markdown",
]

# Analysis periods: pre-2016 election, Trump administration, post-2020
# election. Together they cover 2014-2022 disjointly.
ANALYSIS_PERIODS = {
    "pre2016": (2014, 2016),
    "trump_admin": (2017, 2020),
    "post2020": (2021, 2022),
}

HYPER_SUGGESTIVE = "HyperSuggestive"
NONHYPER_SUGGESTIVE = "NonHyperSuggestive"


@dataclass(frozen=True)
class TermScore:
    term: str
    occurrences: int  # folds in which the term reached the top-n list
    mean_abs_phi: float


@dataclass(frozen=True)
class AttributionReport:
    period: str
    bias_group: str
    direction: str
    ranked_terms: tuple[TermScore, ...]

    def to_json_obj(self) -> dict:
        return {
            "period": self.period,
            "bias_group": self.bias_group,
            "direction": self.direction,
            "ranked_terms": [
                {
                    "term": t.term,
                    "occurrences": t.occurrences,
                    "mean_abs_phi": t.mean_abs_phi,
                }
                for t in self.ranked_terms
            ],
        }


def linear_shap(model: LogRegModel, X, mu: np.ndarray) -> np.ndarray:
    """phi[i, j] = w_j * (X[i, j] - mu_j).

    ``mu`` must be the per-feature mean over the model's training split;
    then sum(phi[i]) + (w @ mu + b) equals the decision margin exactly.
    """
    mu = np.asarray(mu, dtype=np.float64).ravel()
    if X.shape[1] != len(model.weights) or len(mu) != len(model.weights):
        raise ValueError(
            f"dimension mismatch: X has {X.shape[1]} features, model has "
            f"{len(model.weights)}, mu has {len(mu)}"
        )
    Xd = X.toarray() if sp.issparse(X) else np.asarray(X, dtype=np.float64)
    return (Xd - mu) * model.weights


def base_value(model: LogRegModel, mu: np.ndarray) -> float:
    """Expected margin under the background distribution: w @ mu + b."""
    return float(model.weights @ np.asarray(mu).ravel() + model.bias)


def top_terms_per_fold(
    model: LogRegModel, X_train, vocab: Vocabulary, n: int = 50
) -> tuple[list[tuple[str, float]], list[tuple[str, float]]]:
    """Rank terms by mean |phi| over the fold's training data.

    Returns (hyper_suggestive, nonhyper_suggestive) lists of
    (term, mean |phi|), each at most n long; terms with zero importance are
    dropped. Direction follows the sign of the mean phi where the term is
    present (against the training-mean background the unconditional mean of
    phi is identically zero, so the informative sign is the attribution a
    title receives for containing the term).
    """
    mu = np.asarray(X_train.mean(axis=0)).ravel()
    phi = linear_shap(model, X_train, mu)
    mean_abs = np.abs(phi).mean(axis=0)
    Xd = X_train.toarray() if sp.issparse(X_train) else np.asarray(X_train)
    present = Xd > 0
    n_present = present.sum(axis=0)
    with np.errstate(invalid="ignore"):
        mean_phi = np.where(
            n_present > 0, (phi * present).sum(axis=0) / np.maximum(n_present, 1), 0.0
        )
    order = np.argsort(-mean_abs, kind="stable")
    hyper: list[tuple[str, float]] = []
    nonhyper: list[tuple[str, float]] = []
    for j in order:
        if mean_abs[j] <= 0.0:
            break
        entry = (vocab.terms[j], float(mean_abs[j]))
        if mean_phi[j] > 0:
            if len(hyper) < n:
                hyper.append(entry)
        elif len(nonhyper) < n:
            nonhyper.append(entry)
        if len(hyper) >= n and len(nonhyper) >= n:
            break
    return hyper, nonhyper


def aggregate_folds(
    fold_lists: Sequence[list[tuple[str, float]]],
    period: str,
    bias_group: str,
    direction: str,
    max_terms: int = 15,
) -> AttributionReport:
    """Merge per-fold term lists: rank by occurrence count across folds,
    break ties by mean |phi|, then lexicographically."""
    counts: dict[str, int] = {}
    phis: dict[str, list[float]] = {}
    for terms in fold_lists:
        for term, phi in terms:
            counts[term] = counts.get(term, 0) + 1
            phis.setdefault(term, []).append(phi)
    scored = [
        TermScore(
            term=t, occurrences=c, mean_abs_phi=float(np.mean(phis[t]))
        )
        for t, c in counts.items()
    ]
    scored.sort(key=lambda s: (-s.occurrences, -s.mean_abs_phi, s.term))
    return AttributionReport(
        period=period,
        bias_group=bias_group,
        direction=direction,
        ranked_terms=tuple(scored[:max_terms]),
    )


def report_to_markdown(reports: Sequence[AttributionReport]) -> str:
    """Markdown table laid out period x group x direction."""
    periods = sorted({r.period for r in reports})
    lines = ["| Group | Direction | " + " | ".join(periods) + " |"]
    lines.append("|" + "---|" * (len(periods) + 2))
    groups = sorted({r.bias_group for r in reports})
    index = {(r.bias_group, r.direction, r.period): r for r in reports}
    for group in groups:
        for direction in (HYPER_SUGGESTIVE, NONHYPER_SUGGESTIVE):
            cells = []
            for period in periods:
                rep = index.get((group, direction, period))
                cells.append(
                    ", ".join(t.term for t in rep.ranked_terms) if rep else ""
                )
            lines.append(
                f"| {group} | {direction} | " + " | ".join(cells) + " |"
            )
    return "\n".join(lines) + "\n"


def save_reports(
    reports: Sequence[AttributionReport],
    out_dir: str | Path,
    meta: dict | None = None,
) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "meta": meta or {},
        "reports": [r.to_json_obj() for r in reports],
    }
    (out_dir / "term_importance.json").write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )
    (out_dir / "term_importance.md").write_text(
        report_to_markdown(reports), encoding="utf-8"
    )
