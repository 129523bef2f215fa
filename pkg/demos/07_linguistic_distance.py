#!/usr/bin/env python3
"""Linguistic distance between media groups: concatenate each
(group, topic, month) cell, profile it against a category lexicon,
standardize, and track smoothed pairwise Euclidean distances."""

import numpy as np

from titlescope import FixtureSpec, default_lexicons, demo_lexicon, generate_fixture
from titlescope import moving_average, profile
from titlescope.analysis import linguistic_distance_analysis

data = generate_fixture(FixtureSpec())
category = demo_lexicon()
print(f"category lexicon: {len(category.categories)} categories "
      f"({', '.join(category.categories[:6])}, ...)\n")

# A single profile by hand: percentage of tokens matching each category.
tokens = ["attack", "attack", "win", "market", "market", "market"]
p = profile(tokens, category)
hits = {c: round(v, 1) for c, v in zip(category.categories, p.percentages) if v > 0}
print(f"profile of {tokens}:\n  {hits}\n")

series = linguistic_distance_analysis(
    data.records, default_lexicons(), category, window=7
)
print(f"{len(series)} (topic, pair) distance series\n")

for s in series:
    if s.topic != "political_system":
        continue
    pair = f"{s.group_pair[0]}-{s.group_pair[1]}"
    mean_raw = np.mean(s.raw)
    print(f"political_system {pair:<16} {len(s.months)} months, "
          f"mean raw distance {mean_raw:.2f}")
    window = s.months[30:36]
    row = "  ".join(
        f"{m}: raw {r:.2f} smooth {sm:.2f}"
        for m, r, sm in zip(s.months[30:33], s.raw[30:33], s.smoothed[30:33])
    )
    print(f"  {row}")

print("\nsmoothing demo: a spike flattens under the 7-month window")
spike = [(f"2016-{m:02d}", 0.0) for m in range(1, 8)]
spike[3] = ("2016-04", 7.0)
print(f"  raw:      {[v for _, v in spike]}")
print(f"  smoothed: {[round(v, 2) for _, v in moving_average(spike, 7)]}")
