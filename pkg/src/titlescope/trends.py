"""Hyperpartisan-proportion time series and figure-data emission.

Monthly proportions per bias group from scorer predictions, relative change
against a baseline-year mean, and deterministic CSV/JSON artifacts that any
plotting tool can consume. Re-running on identical inputs produces
byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import TitleRecord
from .lexicon import DistanceSeries
from .topics import TopicRatio

__all__ = [
    "MonthPoint",
    "ProportionSeries",
    "RelativeChangeSeries",
    "monthly_proportion",
    "relative_change",
    "yearly_proportions",
    "signs_agree",
    "emit_figure_data",
]


@dataclass(frozen=True)
class MonthPoint:
    month: str  # "YYYY-MM"
    n_titles: int
    n_hyper: int

    @property
    def proportion(self) -> float:
        return self.n_hyper / self.n_titles


@dataclass(frozen=True)
class ProportionSeries:
    bias_group: str
    points: tuple[MonthPoint, ...]  # months with zero titles are gaps
    scorer_id: str


@dataclass(frozen=True)
class RelativeChangeSeries:
    bias_group: str
    baseline_year: int
    baseline: float
    monthly: tuple[tuple[str, float], ...]  # (month, percent change)
    yearly: tuple[tuple[int, float], ...]  # (year, percent change of yearly mean)


def monthly_proportion(
    records: Sequence[TitleRecord],
    predictions: Mapping[str, int],
    group: str | None = None,
    scorer_id: str = "",
) -> ProportionSeries:
    """Per-calendar-month hyperpartisan fraction for one bias group.

    ``predictions`` maps title id to 0/1; it must cover every filtered
    record. Months with no titles are omitted (gaps, not zeros).
    """
    counts: dict[str, list[int]] = {}
    for rec in records:
        if group is not None and rec.bias_group != group:
            continue
        month = f"{rec.date.year:04d}-{rec.date.month:02d}"
        cell = counts.setdefault(month, [0, 0])
        cell[0] += 1
        cell[1] += int(predictions[rec.id])
    points = tuple(
        MonthPoint(month=m, n_titles=c[0], n_hyper=c[1])
        for m, c in sorted(counts.items())
    )
    return ProportionSeries(
        bias_group=group or "All", points=points, scorer_id=scorer_id
    )


def relative_change(
    series: ProportionSeries, baseline_year: int = 2014
) -> RelativeChangeSeries:
    """Percent change of the monthly proportion against the baseline-year
    mean of monthly proportions; yearly values compare each year's mean of
    monthly proportions to the same baseline."""
    base_months = [
        p.proportion for p in series.points if p.month.startswith(f"{baseline_year:04d}-")
    ]
    if not base_months:
        raise ValueError(f"no data in baseline year {baseline_year}")
    baseline = float(np.mean(base_months))
    if baseline == 0:
        raise ValueError(f"baseline year {baseline_year} has zero proportion")
    monthly = tuple(
        (p.month, 100.0 * (p.proportion - baseline) / baseline) for p in series.points
    )
    by_year: dict[int, list[float]] = {}
    for p in series.points:
        by_year.setdefault(int(p.month[:4]), []).append(p.proportion)
    yearly = tuple(
        (year, 100.0 * (float(np.mean(props)) - baseline) / baseline)
        for year, props in sorted(by_year.items())
    )
    return RelativeChangeSeries(
        bias_group=series.bias_group,
        baseline_year=baseline_year,
        baseline=baseline,
        monthly=monthly,
        yearly=yearly,
    )


def yearly_proportions(series: ProportionSeries) -> dict[int, float]:
    """Pooled yearly proportion: sum of monthly hyper counts over titles."""
    hyper: dict[int, int] = {}
    total: dict[int, int] = {}
    for p in series.points:
        year = int(p.month[:4])
        hyper[year] = hyper.get(year, 0) + p.n_hyper
        total[year] = total.get(year, 0) + p.n_titles
    return {y: hyper[y] / total[y] for y in sorted(total)}


def signs_agree(series_a: dict[int, float], series_b: dict[int, float]) -> bool:
    """True when every year-over-year change has the same sign in both
    yearly series (shared years only)."""
    years = sorted(set(series_a) & set(series_b))
    for prev, cur in zip(years, years[1:]):
        da = series_a[cur] - series_a[prev]
        db = series_b[cur] - series_b[prev]
        if np.sign(da) != np.sign(db):
            return False
    return True


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _smooth3(points: Sequence[MonthPoint]) -> list[float]:
    props = [p.proportion for p in points]
    out = []
    for i in range(len(props)):
        lo, hi = max(0, i - 1), min(len(props), i + 2)
        out.append(float(np.mean(props[lo:hi])))
    return out


def emit_figure_data(
    out_dir: str | Path,
    proportion_series: Sequence[ProportionSeries] = (),
    change_series: Sequence[RelativeChangeSeries] = (),
    topic_ratios: Sequence[tuple[str, TopicRatio]] = (),  # (period, ratio)
    distance_series: Sequence[DistanceSeries] = (),
    scorer_id: str = "",
    config_hash: str = "",
    smooth_months: bool = True,
    extra: Mapping | None = None,
) -> dict:
    """Write the figure CSVs plus a manifest; deterministic and re-runnable.

    fig2a.csv: month, group, proportion
    fig2b.csv: month, group, relative_change
    fig3.csv:  topic, pair, period, log_ratio, overall_freq, loo_min, loo_max
    fig4.csv:  topic, pair, month, raw, smoothed
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[str] = []

    def write(name: str, header: str, rows: list[str]) -> None:
        (out_dir / name).write_text(
            "\n".join([header] + rows) + "\n", encoding="utf-8"
        )
        written.append(name)

    if proportion_series:
        rows = [
            f"{p.month},{s.bias_group},{_fmt(p.proportion)}"
            for s in proportion_series
            for p in s.points
        ]
        write("fig2a.csv", "month,group,proportion", sorted(rows))
        if smooth_months:
            srows = []
            for s in proportion_series:
                smooth = _smooth3(s.points)
                srows.extend(
                    f"{p.month},{s.bias_group},{_fmt(v)}"
                    for p, v in zip(s.points, smooth)
                )
            write("fig2a_smoothed.csv", "month,group,proportion", sorted(srows))

    if change_series:
        rows = [
            f"{month},{s.bias_group},{_fmt(v)}"
            for s in change_series
            for month, v in s.monthly
        ]
        write("fig2b.csv", "month,group,relative_change", sorted(rows))
        yrows = [
            f"{year},{s.bias_group},{_fmt(v)}"
            for s in change_series
            for year, v in s.yearly
        ]
        write("fig2b_annual.csv", "year,group,relative_change", sorted(yrows))

    if topic_ratios:
        rows = []
        for period, r in topic_ratios:
            loo_min = min(r.loo_ratios) if r.loo_ratios else r.log_ratio
            loo_max = max(r.loo_ratios) if r.loo_ratios else r.log_ratio
            pair = f"{r.group_pair[0]}-{r.group_pair[1]}"
            rows.append(
                f"{r.topic},{pair},{period},{_fmt(r.log_ratio)},"
                f"{_fmt(r.overall_frequency)},{_fmt(loo_min)},{_fmt(loo_max)}"
            )
        write(
            "fig3.csv",
            "topic,pair,period,log_ratio,overall_freq,loo_min,loo_max",
            sorted(rows),
        )

    if distance_series:
        rows = []
        for s in distance_series:
            pair = f"{s.group_pair[0]}-{s.group_pair[1]}"
            rows.extend(
                f"{s.topic},{pair},{m},{_fmt(r)},{_fmt(sm)}"
                for m, r, sm in zip(s.months, s.raw, s.smoothed)
            )
        write("fig4.csv", "topic,pair,month,raw,smoothed", sorted(rows))

    # Successive analysis commands share one output dir: keep previously
    # listed files that still exist so the manifest indexes everything.
    manifest_path = out_dir / "manifest.json"
    if manifest_path.exists():
        try:
            prior = json.loads(manifest_path.read_text(encoding="utf-8"))
            written.extend(
                f for f in prior.get("files", []) if (out_dir / f).exists()
            )
        except (ValueError, OSError):
            pass
    manifest = {
        "files": sorted(set(written)),
        "scorer_id": scorer_id,
        "config_hash": config_hash,
        **(dict(extra) if extra else {}),
    }
    manifest_text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    manifest_path.write_text(manifest_text, encoding="utf-8")
    return manifest


def config_hash(obj) -> str:
    """Stable hash of a JSON-serializable config for artifact manifests."""
    canon = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]
