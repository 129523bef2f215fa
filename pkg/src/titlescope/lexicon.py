"""Category-lexicon profiling and linguistic distance between media groups.

Titles of one (group, topic, month) cell are concatenated into a single
token stream, matched against a LIWC-style category dictionary (literal
terms and `stem*` prefix wildcards), and expressed as per-category match
percentages. Profiles are z-scored across all cells of a topic and compared
pairwise with Euclidean distance, then smoothed with a centered 7-month
moving average that shrinks at the edges and across gaps.

The proprietary LIWC dictionary is not bundled; any `.dic` file in the
community format loads, and a small open demonstration lexicon ships with
the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "CategoryLexicon",
    "LinguisticProfile",
    "DistanceSeries",
    "load_dic",
    "demo_lexicon",
    "profile",
    "standardize",
    "pairwise_distance",
    "moving_average",
    "distance_series",
]


@dataclass(frozen=True)
class CategoryLexicon:
    """Named pattern sets: category -> literal terms and prefix stems."""

    categories: tuple[str, ...]
    literals: Mapping[str, tuple[int, ...]]  # term -> category indices
    prefixes: tuple[tuple[str, tuple[int, ...]], ...]  # (stem, category indices)

    def match(self, token: str) -> set[int]:
        hits = set(self.literals.get(token, ()))
        for stem, cats in self.prefixes:
            if token.startswith(stem):
                hits.update(cats)
        return hits


def load_dic(path: str | Path) -> CategoryLexicon:
    """Parse a `.dic` file: a `%`-delimited header mapping ids to category
    names, then `term<TAB>id[ id...]` lines where a trailing `*` marks a
    prefix wildcard."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    it = iter(enumerate(lines, start=1))
    id_to_name: dict[int, str] = {}
    in_header = False
    body_start = 0
    for lineno, raw in it:
        line = raw.strip()
        if not line:
            continue
        if line == "%":
            if not in_header:
                in_header = True
                continue
            body_start = lineno
            break
        if in_header:
            parts = line.split()
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: bad header line {raw!r}")
            id_to_name[int(parts[0])] = parts[1]
    if not id_to_name:
        raise ValueError(f"{path}: no category header found")
    categories = tuple(name for _, name in sorted(id_to_name.items()))
    index_of = {cid: i for i, (cid, _) in enumerate(sorted(id_to_name.items()))}

    literals: dict[str, tuple[int, ...]] = {}
    prefixes: list[tuple[str, tuple[int, ...]]] = []
    for lineno, raw in enumerate(lines[body_start:], start=body_start + 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        term, ids = parts[0].lower(), parts[1:]
        try:
            cats = tuple(sorted(index_of[int(i)] for i in ids))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"{path}:{lineno}: bad category ids in {raw!r}") from exc
        if not cats:
            raise ValueError(f"{path}:{lineno}: term {term!r} has no categories")
        if term.endswith("*"):
            prefixes.append((term[:-1], cats))
        else:
            literals[term] = cats
    return CategoryLexicon(
        categories=categories, literals=literals, prefixes=tuple(prefixes)
    )


def demo_lexicon() -> CategoryLexicon:
    """The bundled open demonstration lexicon (about 20 categories)."""
    return load_dic(str(resources.files("titlescope").joinpath("data", "demo.dic")))


@dataclass(frozen=True)
class LinguisticProfile:
    group: str
    topic: str
    month: str  # "YYYY-MM"
    percentages: np.ndarray  # aligned with lexicon.categories
    token_count: int
    empty: bool = False


def profile(
    tokens: Sequence[str],
    lexicon: CategoryLexicon,
    group: str = "",
    topic: str = "",
    month: str = "",
) -> LinguisticProfile:
    """Match percentage per category: 100 * matched tokens / total tokens.

    One token may hit several categories. An empty cell yields an all-zero
    profile flagged with ``empty=True``.
    """
    counts = np.zeros(len(lexicon.categories), dtype=np.float64)
    for token in tokens:
        for cat in lexicon.match(token):
            counts[cat] += 1.0
    n = len(tokens)
    if n == 0:
        return LinguisticProfile(
            group=group, topic=topic, month=month,
            percentages=counts, token_count=0, empty=True,
        )
    return LinguisticProfile(
        group=group, topic=topic, month=month,
        percentages=100.0 * counts / n, token_count=n,
    )


def standardize(profiles: Sequence[LinguisticProfile]) -> list[LinguisticProfile]:
    """Z-score each category across all given profiles (population std).

    Zero-variance categories map to 0 everywhere. The profile set should be
    all (group, month) cells of one topic.
    """
    if len(profiles) < 2:
        raise ValueError("standardization needs at least 2 profiles")
    mat = np.vstack([p.percentages for p in profiles])
    mean = mat.mean(axis=0)
    std = mat.std(axis=0)  # population (ddof=0)
    z = np.where(std > 0, (mat - mean) / np.where(std > 0, std, 1.0), 0.0)
    return [
        LinguisticProfile(
            group=p.group, topic=p.topic, month=p.month,
            percentages=z[i], token_count=p.token_count, empty=p.empty,
        )
        for i, p in enumerate(profiles)
    ]


def pairwise_distance(a: LinguisticProfile, b: LinguisticProfile) -> float:
    """Euclidean distance over all category dimensions."""
    if a.percentages.shape != b.percentages.shape:
        raise ValueError("profiles have different category dimensions")
    return float(np.linalg.norm(a.percentages - b.percentages))


def _month_index(month: str) -> int:
    year, mon = month.split("-")
    return int(year) * 12 + (int(mon) - 1)


def moving_average(
    series: Sequence[tuple[str, float]], window: int = 7
) -> list[tuple[str, float]]:
    """Centered moving average on the calendar-month axis.

    Each point becomes the mean of the available points within
    +/- (window-1)/2 months; missing months contribute nothing, so the
    window shrinks at the series edges and across gaps.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    if not series:
        raise ValueError("empty series")
    half = (window - 1) // 2
    idx = np.array([_month_index(m) for m, _ in series])
    vals = np.array([v for _, v in series], dtype=np.float64)
    out = []
    for i, (month, _) in enumerate(series):
        mask = np.abs(idx - idx[i]) <= half
        out.append((month, float(vals[mask].mean())))
    return out


@dataclass(frozen=True)
class DistanceSeries:
    group_pair: tuple[str, str]
    topic: str
    months: tuple[str, ...]
    raw: tuple[float, ...]
    smoothed: tuple[float, ...]


def distance_series(
    profiles: Sequence[LinguisticProfile],
    group_a: str,
    group_b: str,
    topic: str,
    window: int = 7,
) -> DistanceSeries:
    """Monthly distances between two groups' standardized profiles.

    ``profiles`` must already be standardized over one topic. Months where
    either cell is missing or empty are gaps: excluded, never zero.
    """
    cells = {
        (p.group, p.month): p for p in profiles if p.topic == topic and not p.empty
    }
    months = sorted(
        {m for g, m in cells if g == group_a} & {m for g, m in cells if g == group_b}
    )
    raw = [
        pairwise_distance(cells[(group_a, m)], cells[(group_b, m)]) for m in months
    ]
    smoothed = (
        [v for _, v in moving_average(list(zip(months, raw)), window)] if months else []
    )
    return DistanceSeries(
        group_pair=(group_a, group_b),
        topic=topic,
        months=tuple(months),
        raw=tuple(raw),
        smoothed=tuple(smoothed),
    )
