#!/usr/bin/env python3
"""Topic-distribution divergence between media-bias groups: log frequency
ratios with leave-one-keyword-out robustness bands."""

from titlescope import FixtureSpec, default_lexicons, generate_fixture
from titlescope.analysis import GROUP_PAIRS, topic_divergence_analysis
from titlescope.shapley import ANALYSIS_PERIODS

data = generate_fixture(FixtureSpec())
lexicons = default_lexicons()
for lex in lexicons:
    print(f"{lex.topic_name}: {', '.join(lex.keywords[:8])}"
          + (" ..." if len(lex.keywords) > 8 else ""))
print()

ratios = topic_divergence_analysis(data.records, lexicons, ANALYSIS_PERIODS)

print("positive log-ratio = topic more frequent in the second group\n")
print(f"{'period':<12} {'topic':<18} {'pair':<16} {'log_ratio':>9} {'freq':>6}  loo spread")
for period, r in ratios:
    if period != "full":
        continue
    pair = f"{r.group_pair[0]}-{r.group_pair[1]}"
    spread = f"[{min(r.loo_ratios):+.3f}, {max(r.loo_ratios):+.3f}]"
    print(
        f"{period:<12} {r.topic:<18} {pair:<16} {r.log_ratio:>+9.4f} "
        f"{r.overall_frequency:>6.3f}  {spread}"
    )

print("\nper-period view for societal_issue, Left vs Right:")
for period, r in ratios:
    if r.topic == "societal_issue" and r.group_pair == ("Left", "Right"):
        print(f"  {period:<12} log_ratio {r.log_ratio:+.4f}")
