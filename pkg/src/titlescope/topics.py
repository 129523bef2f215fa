"""Keyword-based topic assignment and between-group divergence.

A title belongs to a topic when any lexicon keyword appears among its
normalized tokens; membership in several topics is allowed. Divergence
between two bias groups is the log of their topic-frequency ratio,
computed as a difference of logs so swapping the groups negates the value
exactly. Robustness comes from leave-one-keyword-out recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import math

from .textprep import Normalizer, default_normalizer

__all__ = [
    "DEFAULT_TOPIC_KEYWORDS",
    "TopicLexicon",
    "TopicRatio",
    "load_lexicon_file",
    "default_lexicons",
    "assign_topics",
    "log_freq_ratio",
    "leave_one_out",
]

EPSILON = 1e-9

# Seed keyword lists distilled from the term-importance analysis; fully
# overridable via lexicon files (one keyword per line, '#' comments).
DEFAULT_TOPIC_KEYWORDS = {
    "foreign_issue": (
        "russia", "russian", "ukraine", "china", "iran", "korea", "world",
    ),
    "political_system": (
        "democrat", "republican", "gop", "party", "election", "vote",
        "campaign", "debate", "senate", "government", "policy", "president",
        "obama", "clinton", "trump", "biden", "state", "supreme",
    ),
    "societal_issue": (
        "gun", "school", "coronavirus", "covid", "law", "climate", "tax",
        "health", "pandemic",
    ),
}


@dataclass(frozen=True)
class TopicLexicon:
    topic_name: str
    keywords: tuple[str, ...]  # normalized, deduplicated, order preserved

    def __post_init__(self):
        if not self.keywords:
            raise ValueError(f"topic {self.topic_name!r} has no keywords")
        if len(set(self.keywords)) != len(self.keywords):
            raise ValueError(f"topic {self.topic_name!r} has duplicate keywords")


@dataclass(frozen=True)
class TopicRatio:
    topic: str
    group_pair: tuple[str, str]
    log_ratio: float
    overall_frequency: float
    loo_ratios: tuple[float, ...]


def _normalize_keywords(
    words: Iterable[str], normalizer: Normalizer
) -> tuple[str, ...]:
    out: list[str] = []
    for word in words:
        tokens = normalizer.normalize(word)
        if len(tokens) != 1:
            raise ValueError(
                f"keyword {word!r} does not normalize to a single token: {tokens}"
            )
        if tokens[0] not in out:
            out.append(tokens[0])
    return tuple(out)


def load_lexicon_file(
    path: str | Path, topic_name: str | None = None, normalizer: Normalizer | None = None
) -> TopicLexicon:
    """One keyword per line; '#' starts a comment; name defaults to the stem."""
    path = Path(path)
    words = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.append(line)
    return TopicLexicon(
        topic_name=topic_name or path.stem,
        keywords=_normalize_keywords(words, normalizer or default_normalizer()),
    )


def default_lexicons(normalizer: Normalizer | None = None) -> list[TopicLexicon]:
    normalizer = normalizer or default_normalizer()
    return [
        TopicLexicon(name, _normalize_keywords(words, normalizer))
        for name, words in DEFAULT_TOPIC_KEYWORDS.items()
    ]


def assign_topics(
    tokens: Sequence[str], lexicons: Iterable[TopicLexicon]
) -> set[str]:
    """Topics whose keyword sets intersect the token list (possibly many)."""
    present = set(tokens)
    return {lex.topic_name for lex in lexicons if present & set(lex.keywords)}


def _topic_frequency(
    docs: Sequence[Sequence[str]], keywords: set[str]
) -> float:
    if not docs:
        raise ValueError("empty group")
    matched = sum(1 for tokens in docs if set(tokens) & keywords)
    return matched / len(docs)


def log_freq_ratio(
    group_docs: Mapping[str, Sequence[Sequence[str]]],
    lexicon: TopicLexicon,
    group_a: str,
    group_b: str,
    epsilon: float = EPSILON,
    with_loo: bool = True,
) -> TopicRatio:
    """ln((freq_B + eps) / (freq_A + eps)) as an exact difference of logs.

    Positive values mean the topic is more frequent in group B. The overall
    frequency pools the two groups' titles.
    """
    docs_a = group_docs[group_a]
    docs_b = group_docs[group_b]
    if not docs_a or not docs_b:
        raise ValueError("both groups need at least one title")

    def ratio(keywords: set[str]) -> float:
        fa = _topic_frequency(docs_a, keywords)
        fb = _topic_frequency(docs_b, keywords)
        return math.log(fb + epsilon) - math.log(fa + epsilon)

    all_kw = set(lexicon.keywords)
    pooled_matches = sum(
        1 for docs in (docs_a, docs_b) for tokens in docs if set(tokens) & all_kw
    )
    loo: tuple[float, ...] = ()
    if with_loo and len(lexicon.keywords) >= 2:
        loo = tuple(ratio(all_kw - {kw}) for kw in lexicon.keywords)
    return TopicRatio(
        topic=lexicon.topic_name,
        group_pair=(group_a, group_b),
        log_ratio=ratio(all_kw),
        overall_frequency=pooled_matches / (len(docs_a) + len(docs_b)),
        loo_ratios=loo,
    )


def leave_one_out(
    group_docs: Mapping[str, Sequence[Sequence[str]]],
    lexicon: TopicLexicon,
    group_a: str,
    group_b: str,
    epsilon: float = EPSILON,
) -> tuple[float, ...]:
    """Recompute the log ratio once per withheld keyword (sorted keyword order)."""
    if len(lexicon.keywords) < 2:
        raise ValueError("leave-one-out needs at least 2 keywords")
    return log_freq_ratio(
        group_docs, lexicon, group_a, group_b, epsilon, with_loo=True
    ).loo_ratios
