"""End-to-end analysis drivers tying the corpus, a scorer and the
term/topic/lexicon/trend machinery together.

Labels for every analysis come from scorer inference over the corpus, so
any configured scorer (internal or external) can stand behind the same
reports.
"""

from __future__ import annotations

import logging
from typing import Mapping, Sequence

import numpy as np

from .corpus import BIAS_GROUPS, TitleRecord
from .evaluation import kfold_cv
from .features import binary_matrix, build_vocab
from .lexicon import (
    CategoryLexicon,
    DistanceSeries,
    LinguisticProfile,
    distance_series,
    profile,
    standardize,
)
from .linear import train_l1_logreg
from .scoring import TitleScorer
from .shapley import (
    HYPER_SUGGESTIVE,
    NONHYPER_SUGGESTIVE,
    AttributionReport,
    aggregate_folds,
    top_terms_per_fold,
)
from .textprep import Normalizer, default_normalizer
from .topics import TopicLexicon, TopicRatio, assign_topics, log_freq_ratio
from .trends import ProportionSeries, RelativeChangeSeries, monthly_proportion, relative_change

__all__ = [
    "predict_corpus",
    "term_importance_analysis",
    "topic_divergence_analysis",
    "linguistic_distance_analysis",
    "trend_analysis",
    "GROUP_PAIRS",
]

logger = logging.getLogger(__name__)

GROUP_PAIRS = (("Left", "Right"), ("Left", "Central"), ("Central", "Right"))


def predict_corpus(
    scorer: TitleScorer, records: Sequence[TitleRecord], threshold: float = 0.5
) -> dict[str, int]:
    """Binary hyperpartisan predictions for every record."""
    probs = scorer.score_titles([r.text for r in records])
    return {r.id: int(p >= threshold) for r, p in zip(records, probs)}


def _tokenize_all(
    records: Sequence[TitleRecord], normalizer: Normalizer
) -> dict[str, list[str]]:
    return {r.id: normalizer.normalize(r.text) for r in records}


def term_importance_analysis(
    records: Sequence[TitleRecord],
    predictions: Mapping[str, int],
    periods: Mapping[str, tuple[int, int]],
    groups: Sequence[str] = BIAS_GROUPS,
    min_df: float = 0.005,
    lam: float = 1e-3,
    k: int = 5,
    seed: int = 0,
    top_n: int = 50,
    normalizer: Normalizer | None = None,
) -> list[AttributionReport]:
    """Per (period, group): approximate the scorer with L1 logistic
    regression under k-fold CV and report the terms that reach the top-n
    Shapley list in the most folds, split by direction.

    The document-frequency threshold is evaluated against the full
    collected corpus; fold models see only their cell's titles.
    """
    normalizer = normalizer or default_normalizer()
    tokens = _tokenize_all(records, normalizer)
    vocab = build_vocab([tokens[r.id] for r in records], min_df)
    reports: list[AttributionReport] = []
    for period, (y0, y1) in periods.items():
        for group in groups:
            cell = [
                r
                for r in records
                if r.bias_group == group and y0 <= r.date.year <= y1
            ]
            y = np.array([predictions[r.id] for r in cell])
            if len(cell) < 2 * k or len(np.unique(y)) < 2 or min(
                np.bincount(y, minlength=2)
            ) < k:
                logger.warning(
                    "skipping %s/%s: too few titles or single class", period, group
                )
                continue
            X = binary_matrix([tokens[r.id] for r in cell], vocab)
            folds = kfold_cv(
                X,
                y,
                trainer=lambda Xt, yt: train_l1_logreg(Xt, yt, lam=lam, vocab=vocab),
                k=k,
                seed=seed,
            )
            hyper_lists, nonhyper_lists = [], []
            for fold in folds:
                h, nh = top_terms_per_fold(
                    fold.model, X[fold.train_idx], vocab, n=top_n
                )
                hyper_lists.append(h)
                nonhyper_lists.append(nh)
            reports.append(
                aggregate_folds(hyper_lists, period, group, HYPER_SUGGESTIVE)
            )
            reports.append(
                aggregate_folds(nonhyper_lists, period, group, NONHYPER_SUGGESTIVE)
            )
    return reports


def topic_divergence_analysis(
    records: Sequence[TitleRecord],
    lexicons: Sequence[TopicLexicon],
    periods: Mapping[str, tuple[int, int]],
    pairs: Sequence[tuple[str, str]] = GROUP_PAIRS,
    include_full_range: bool = True,
    normalizer: Normalizer | None = None,
) -> list[tuple[str, TopicRatio]]:
    """Log frequency ratios with leave-one-keyword-out spreads, per period
    (plus the pooled full range) and group pair."""
    normalizer = normalizer or default_normalizer()
    tokens = _tokenize_all(records, normalizer)
    spans: dict[str, tuple[int, int] | None] = dict(periods)
    if include_full_range:
        spans["full"] = None
    out: list[tuple[str, TopicRatio]] = []
    for period, span in spans.items():
        group_docs: dict[str, list[list[str]]] = {g: [] for g in BIAS_GROUPS}
        for r in records:
            if span is not None and not (span[0] <= r.date.year <= span[1]):
                continue
            group_docs[r.bias_group].append(tokens[r.id])
        for lex in lexicons:
            for a, b in pairs:
                if not group_docs[a] or not group_docs[b]:
                    logger.warning("skipping %s %s-%s: empty group", period, a, b)
                    continue
                out.append((period, log_freq_ratio(group_docs, lex, a, b)))
    return out


def linguistic_distance_analysis(
    records: Sequence[TitleRecord],
    topic_lexicons: Sequence[TopicLexicon],
    category_lexicon: CategoryLexicon,
    pairs: Sequence[tuple[str, str]] = GROUP_PAIRS,
    window: int = 7,
    normalizer: Normalizer | None = None,
) -> list[DistanceSeries]:
    """Concatenate each (group, topic, month) cell, profile it against the
    category lexicon, standardize within topic and emit smoothed pairwise
    distance series."""
    normalizer = normalizer or default_normalizer()
    tokens = _tokenize_all(records, normalizer)
    cells: dict[tuple[str, str, str], list[str]] = {}
    for r in records:
        toks = tokens[r.id]
        month = f"{r.date.year:04d}-{r.date.month:02d}"
        for topic in assign_topics(toks, topic_lexicons):
            cells.setdefault((r.bias_group, topic, month), []).extend(toks)
    out: list[DistanceSeries] = []
    for lex in topic_lexicons:
        topic = lex.topic_name
        profiles: list[LinguisticProfile] = [
            profile(cell_tokens, category_lexicon, group=g, topic=topic, month=m)
            for (g, t, m), cell_tokens in sorted(cells.items())
            if t == topic
        ]
        if len(profiles) < 2:
            logger.warning("skipping topic %s: fewer than 2 cells", topic)
            continue
        z = standardize(profiles)
        for a, b in pairs:
            out.append(distance_series(z, a, b, topic, window=window))
    return out


def trend_analysis(
    records: Sequence[TitleRecord],
    predictions: Mapping[str, int],
    scorer_id: str = "",
    baseline_year: int = 2014,
    groups: Sequence[str] = BIAS_GROUPS,
) -> tuple[list[ProportionSeries], list[RelativeChangeSeries]]:
    """Monthly proportion and relative-change series per bias group."""
    proportions, changes = [], []
    for group in groups:
        series = monthly_proportion(records, predictions, group, scorer_id)
        if not series.points:
            logger.warning("group %s absent from corpus", group)
            continue
        proportions.append(series)
        try:
            changes.append(relative_change(series, baseline_year))
        except ValueError as exc:
            logger.warning("no relative-change series for %s: %s", group, exc)
    return proportions, changes
