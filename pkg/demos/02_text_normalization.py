#!/usr/bin/env python3
"""Normalization pipeline walkthrough: what each stage does to a title."""

from titlescope import normalize
from titlescope.textprep import default_normalizer

titles = [
    'Trump\'s "Deal" Fails!',
    "Senators CLASH Over Sweeping New Gun Laws — Again",
    "The — café ☕ reopens",
    "Markets rally as fears ease; tech stocks soar 4%",
    "COVID-19 cases rising in 12 states, officials warn",
]

print("raw title -> tokens")
for title in titles:
    print(f"  {title!r}")
    print(f"    -> {normalize(title)}")

norm = default_normalizer()
print("\nsuffix lemmatizer samples (form -> lemma):")
for word in ["policies", "running", "making", "biggest", "churches", "meetings", "said"]:
    print(f"  {word:>10} -> {norm.lemmatize(word)}")

print("\nidempotence: re-normalizing joined output is a no-op")
t = titles[1]
once = normalize(t)
again = normalize(" ".join(once))
print(f"  {once == again=}")
