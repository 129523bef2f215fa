"""Synthetic title corpus with a planted hyperpartisan signal.

The generator is the ground-truth oracle for the end-to-end checks: label
frequencies per year and group follow a planted profile, hyperpartisan
titles carry one to three of five planted keywords with high probability,
and a small contamination rate puts keywords into non-hyperpartisan titles.
Group-tilted topical words and mild emotion-word skews give the downstream
topic and lexicon analyses realistic structure. Everything is deterministic
given the seed.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import TitleRecord
from .topics import DEFAULT_TOPIC_KEYWORDS

__all__ = ["FixtureSpec", "FixtureData", "generate_fixture", "write_fixture"]

OUTLETS = (
    ("New York Times", "Left"),
    ("CNN", "Left"),
    ("NBC", "Left"),
    ("Bloomberg", "Left"),
    ("Wall Street Journal", "Central"),
    ("Christian Science Monitor", "Central"),
    ("The Federalist", "Right"),
    ("Reason", "Right"),
    ("Washington Times", "Right"),
)

PLANTED_KEYWORDS = ("slama", "slamb", "slamc", "slamd", "slame")

# Hyperpartisan rate (percent) per year; scaled per group below. The
# year-over-year swings are deliberately large so that trend signs survive
# per-cell sampling noise at the 5k-title scale.
YEAR_PROFILE = {
    2014: 5.0,
    2015: 14.0,
    2016: 24.0,
    2017: 14.0,
    2018: 26.0,
    2019: 12.0,
    2020: 28.0,
    2021: 12.0,
    2022: 4.0,
}

GROUP_SCALE = {"Left": 0.85, "Central": 0.55, "Right": 1.40}

# Chance that a title mentions each topic, by bias group.
TOPIC_TILT = {
    "Left": {"foreign_issue": 0.10, "political_system": 0.20, "societal_issue": 0.18},
    "Central": {"foreign_issue": 0.22, "political_system": 0.12, "societal_issue": 0.10},
    "Right": {"foreign_issue": 0.08, "political_system": 0.22, "societal_issue": 0.22},
}

TENSE_WORDS = ("attack", "fight", "blast", "fury", "crisis", "threat", "outrage", "panic")
CALM_WORDS = ("win", "hope", "support", "celebrate", "success", "benefit")

NOISE_WORDS = (
    "report plan city mayor council game team season player coach film movie "
    "music show book author review stock price trade deal tech phone app data "
    "study research science space launch storm weather rain snow heat fire "
    "flood road traffic train airport flight travel food restaurant recipe "
    "wine coffee art museum festival award fashion style home garden car "
    "driver race score match cup league goal record history culture local "
    "nation chief judge jury court case bill street bridge river park zoo "
    "animal dog cat bird fish farm crop energy oil gas solar wind power "
    "plant factory worker union wage salary loan debt credit card store "
    "shop mall brand sale customer service hotel beach island mountain "
    "lake forest trail camp site photo video camera screen game console "
    "toy gift holiday parade concert ticket stage actor singer dance "
    "paint sculpture poem novel prize medal champion tournament final "
    "round draft pick trade coach referee stadium arena fan crowd cheer"
).split()


@dataclass(frozen=True)
class FixtureSpec:
    n_titles: int = 5000
    seed: int = 7
    start: dt.date = dt.date(2014, 1, 1)
    end: dt.date = dt.date(2022, 9, 30)
    keywords: tuple[str, ...] = PLANTED_KEYWORDS
    keyword_prob_hyper: float = 0.90  # hyper titles carrying a planted keyword
    keyword_prob_nonhyper: float = 0.03  # contamination
    tense_prob: tuple[float, float] = (0.25, 0.10)  # (hyper, nonhyper)
    calm_prob: tuple[float, float] = (0.05, 0.12)


@dataclass
class FixtureData:
    records: list[TitleRecord]
    labels: dict[str, int]  # title id -> 1 (hyper) / 0
    metadata: dict = field(default_factory=dict)


def _make_title(
    rng: np.random.Generator,
    group: str,
    hyper: bool,
    spec: FixtureSpec,
) -> str:
    words: list[str] = []
    kw_prob = spec.keyword_prob_hyper if hyper else spec.keyword_prob_nonhyper
    if rng.random() < kw_prob:
        n_kw = 1 + rng.integers(0, 3) if hyper else 1
        picks = rng.choice(len(spec.keywords), size=min(n_kw, len(spec.keywords)), replace=False)
        words.extend(spec.keywords[i] for i in picks)
    for topic, prob in TOPIC_TILT[group].items():
        if rng.random() < prob:
            pool = DEFAULT_TOPIC_KEYWORDS[topic]
            words.append(pool[rng.integers(0, len(pool))])
    tense_p, calm_p = spec.tense_prob[0 if hyper else 1], spec.calm_prob[0 if hyper else 1]
    if rng.random() < tense_p:
        words.append(TENSE_WORDS[rng.integers(0, len(TENSE_WORDS))])
    if rng.random() < calm_p:
        words.append(CALM_WORDS[rng.integers(0, len(CALM_WORDS))])
    # Noise count independent of the signal words added above, so title
    # length carries no label information.
    n_noise = int(rng.integers(5, 12))
    idx = rng.integers(0, len(NOISE_WORDS), size=n_noise)
    words.extend(NOISE_WORDS[i] for i in idx)
    order = rng.permutation(len(words))
    words = [words[i] for i in order]
    return " ".join(words).capitalize()


def generate_fixture(spec: FixtureSpec | None = None) -> FixtureData:
    spec = spec or FixtureSpec()
    rng = np.random.default_rng(spec.seed)
    n_days = (spec.end - spec.start).days + 1

    # Pass 1: outlet and date per title.
    assignments = []
    buckets: dict[tuple[str, int], list[int]] = {}
    for i in range(spec.n_titles):
        outlet, group = OUTLETS[rng.integers(0, len(OUTLETS))]
        date = spec.start + dt.timedelta(days=int(rng.integers(0, n_days)))
        assignments.append((outlet, group, date))
        buckets.setdefault((group, date.year), []).append(i)

    # Pass 2: plant exactly round(rate * n) hyperpartisan labels per
    # (group, year) bucket so realized rates equal the planted profile up
    # to rounding, keeping year-over-year trend signs unambiguous.
    hyper_flags = np.zeros(spec.n_titles, dtype=bool)
    for (group, year), members in sorted(buckets.items()):
        rate = YEAR_PROFILE[year] * GROUP_SCALE[group] / 100.0
        n_hyper = int(round(rate * len(members)))
        picks = rng.choice(len(members), size=n_hyper, replace=False)
        for p in picks:
            hyper_flags[members[p]] = True

    records: list[TitleRecord] = []
    labels: dict[str, int] = {}
    group_year_counts: dict[tuple[str, int], list[int]] = {}
    for i, (outlet, group, date) in enumerate(assignments):
        hyper = bool(hyper_flags[i])
        tid = f"t{i:06d}"
        records.append(
            TitleRecord(
                id=tid,
                text=_make_title(rng, group, hyper, spec),
                outlet=outlet,
                bias_group=group,
                date=date,
            )
        )
        labels[tid] = int(hyper)
        cell = group_year_counts.setdefault((group, date.year), [0, 0])
        cell[0] += 1
        cell[1] += int(hyper)

    overall = sum(labels.values()) / len(labels)
    metadata = {
        "n_titles": spec.n_titles,
        "seed": spec.seed,
        "keywords": list(spec.keywords),
        "planted_overall_rate": overall,
        "planted_year_profile": {str(y): p / 100.0 for y, p in YEAR_PROFILE.items()},
        "group_scale": GROUP_SCALE,
        "realized_group_year_rates": {
            f"{g}:{y}": c[1] / c[0] for (g, y), c in sorted(group_year_counts.items())
        },
    }
    return FixtureData(records=records, labels=labels, metadata=metadata)


def write_fixture(
    out_dir: str | Path,
    spec: FixtureSpec | None = None,
    validation_size: int = 200,
    seed_label_size: int = 200,
) -> FixtureData:
    """Write a generated fixture to disk.

    corpus.jsonl      every title record
    truth.jsonl       ground-truth labels for all titles
    validation.jsonl  a random labeled holdout (for the loop's metrics)
    seed.jsonl        disjoint labeled seed sample (for bootstrapping)
    meta.json         generator parameters and realized rates
    """
    spec = spec or FixtureSpec()
    data = generate_fixture(spec)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def dump(name: str, ids) -> None:
        with open(out_dir / name, "w", encoding="utf-8") as fh:
            for tid in ids:
                fh.write(json.dumps({"title_id": tid, "label": data.labels[tid]}) + "\n")

    with open(out_dir / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for rec in data.records:
            fh.write(json.dumps(rec.to_json_obj(), ensure_ascii=False) + "\n")
    all_ids = [rec.id for rec in data.records]
    dump("truth.jsonl", all_ids)
    rng = np.random.default_rng(spec.seed + 1)
    shuffled = list(rng.permutation(all_ids))
    n_val = min(validation_size, len(shuffled))
    n_seed = min(seed_label_size, len(shuffled) - n_val)
    dump("validation.jsonl", sorted(shuffled[:n_val]))
    dump("seed.jsonl", sorted(shuffled[n_val : n_val + n_seed]))
    (out_dir / "meta.json").write_text(
        json.dumps(data.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return data
