"""Append-only title corpus with labeled / unlabeled / validation pools.

Storage is plain JSONL (titles, votes, consensus labels, partition state)
plus an in-memory index rebuilt on open, so a corpus directory is greppable
and diff-able. Records handed to callers are frozen dataclasses; all writes
go through a single lock.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

__all__ = [
    "BIAS_GROUPS",
    "TitleRecord",
    "LabelRecord",
    "ConsensusLabel",
    "CorpusPartition",
    "IngestReport",
    "RowError",
    "CorpusStore",
    "DEFAULT_DATE_RANGE",
]

BIAS_GROUPS = ("Left", "Central", "Right")
VERDICTS = ("H", "N")

DEFAULT_DATE_RANGE = (dt.date(2014, 1, 1), dt.date(2022, 9, 30))

TITLE_FIELDS = ("id", "text", "outlet", "bias_group", "date")
LABEL_FIELDS = ("title_id", "annotator_id", "verdict", "iteration", "recorded_at")


@dataclass(frozen=True)
class TitleRecord:
    id: str
    text: str
    outlet: str
    bias_group: str
    date: dt.date

    def to_json_obj(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "outlet": self.outlet,
            "bias_group": self.bias_group,
            "date": self.date.isoformat(),
        }


@dataclass(frozen=True)
class LabelRecord:
    title_id: str
    annotator_id: str
    verdict: str  # "H" | "N"
    iteration: int
    recorded_at: str  # RFC3339 timestamp
    idempotency_key: str | None = None

    def to_json_obj(self) -> dict:
        obj = {
            "title_id": self.title_id,
            "annotator_id": self.annotator_id,
            "verdict": self.verdict,
            "iteration": self.iteration,
            "recorded_at": self.recorded_at,
        }
        if self.idempotency_key is not None:
            obj["idempotency_key"] = self.idempotency_key
        return obj


@dataclass(frozen=True)
class ConsensusLabel:
    title_id: str
    verdict: str  # "H" | "N"
    iteration: int


@dataclass(frozen=True)
class CorpusPartition:
    labeled_ids: frozenset[str]
    unlabeled_ids: frozenset[str]
    validation_ids: frozenset[str]


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str


@dataclass(frozen=True)
class IngestReport:
    count: int
    rejected: int
    errors: tuple[RowError, ...] = ()


class CorpusError(Exception):
    pass


def _parse_date(value: str) -> dt.date:
    return dt.date.fromisoformat(value)


def _validate_record(
    obj: dict, date_range: tuple[dt.date, dt.date]
) -> TitleRecord:
    missing = [k for k in TITLE_FIELDS if k not in obj]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    rid = str(obj["id"])
    if not rid:
        raise ValueError("empty id")
    text = str(obj["text"])
    if not text.strip():
        raise ValueError("empty text")
    group = obj["bias_group"]
    if group not in BIAS_GROUPS:
        raise ValueError(f"bias_group must be one of {BIAS_GROUPS}, got {group!r}")
    try:
        date = _parse_date(str(obj["date"]))
    except ValueError as exc:
        raise ValueError(f"bad date {obj['date']!r}: {exc}") from exc
    lo, hi = date_range
    if not (lo <= date <= hi):
        raise ValueError(f"date {date} outside configured range {lo}..{hi}")
    return TitleRecord(
        id=rid, text=text, outlet=str(obj["outlet"]), bias_group=group, date=date
    )


def _iter_source_rows(path: Path, format: str) -> Iterator[tuple[int, dict | None, str]]:
    """Yield (line_no, parsed_obj_or_None, error_reason)."""
    if format == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    yield i, None, f"malformed JSON: {exc.msg}"
                    continue
                if not isinstance(obj, dict):
                    yield i, None, "row is not a JSON object"
                    continue
                yield i, obj, ""
    elif format == "csv":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            for i, row in enumerate(reader, start=2):  # header is line 1
                if row.get(None) is not None:
                    yield i, None, "too many columns"
                    continue
                yield i, {k: v for k, v in row.items() if v is not None}, ""
    else:
        raise CorpusError(f"unknown format {format!r}")


class CorpusStore:
    """Title corpus with append-only JSONL persistence.

    Parameters
    ----------
    root : directory holding titles.jsonl, votes.jsonl, consensus.jsonl and
        partition.json. Created on first write. Pass ``None`` for a purely
        in-memory store.
    """

    def __init__(
        self,
        root: str | Path | None = None,
        date_range: tuple[dt.date, dt.date] = DEFAULT_DATE_RANGE,
    ):
        self.root = Path(root) if root is not None else None
        self.date_range = date_range
        self._lock = threading.RLock()
        self._titles: dict[str, TitleRecord] = {}
        self._votes: list[LabelRecord] = []
        self._vote_index: dict[tuple[str, str, int], LabelRecord] = {}
        self._consensus: dict[str, ConsensusLabel] = {}
        self._validation_ids: set[str] = set()
        if self.root is not None and self.root.exists():
            self._load()

    # -- persistence ---------------------------------------------------

    def _path(self, name: str) -> Path:
        assert self.root is not None
        return self.root / name

    def _load(self) -> None:
        titles = self._path("titles.jsonl")
        if titles.exists():
            with open(titles, encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    rec = _validate_record(json.loads(line), self.date_range)
                    self._titles[rec.id] = rec
        votes = self._path("votes.jsonl")
        if votes.exists():
            with open(votes, encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    obj = json.loads(line)
                    rec = LabelRecord(
                        title_id=obj["title_id"],
                        annotator_id=obj["annotator_id"],
                        verdict=obj["verdict"],
                        iteration=int(obj["iteration"]),
                        recorded_at=obj["recorded_at"],
                        idempotency_key=obj.get("idempotency_key"),
                    )
                    self._votes.append(rec)
                    self._vote_index[
                        (rec.title_id, rec.annotator_id, rec.iteration)
                    ] = rec
        consensus = self._path("consensus.jsonl")
        if consensus.exists():
            with open(consensus, encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    obj = json.loads(line)
                    self._consensus[obj["title_id"]] = ConsensusLabel(
                        title_id=obj["title_id"],
                        verdict=obj["verdict"],
                        iteration=int(obj["iteration"]),
                    )
        partition = self._path("partition.json")
        if partition.exists():
            obj = json.loads(partition.read_text(encoding="utf-8"))
            self._validation_ids = set(obj.get("validation_ids", []))

    def _append_jsonl(self, name: str, obj: dict) -> None:
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self._path(name), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
            fh.flush()

    def _write_partition(self) -> None:
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        payload = {"validation_ids": sorted(self._validation_ids)}
        self._path("partition.json").write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )

    # -- ingest / export -----------------------------------------------

    def ingest(self, source_path: str | Path, format: str = "jsonl") -> IngestReport:
        """Append valid records from a JSONL or CSV file.

        Malformed rows and duplicate ids are rejected row by row, never
        aborting the whole file; ``count + rejected`` equals the number of
        data rows in the input.
        """
        source_path = Path(source_path)
        if not source_path.exists():
            raise CorpusError(f"unreadable file: {source_path}")
        accepted = 0
        errors: list[RowError] = []
        with self._lock:
            for line_no, obj, reason in _iter_source_rows(source_path, format):
                if obj is None:
                    errors.append(RowError(line_no, reason))
                    continue
                try:
                    rec = _validate_record(obj, self.date_range)
                except ValueError as exc:
                    errors.append(RowError(line_no, str(exc)))
                    continue
                if rec.id in self._titles:
                    errors.append(RowError(line_no, f"duplicate id {rec.id!r}"))
                    continue
                self._titles[rec.id] = rec
                self._append_jsonl("titles.jsonl", rec.to_json_obj())
                accepted += 1
        return IngestReport(count=accepted, rejected=len(errors), errors=tuple(errors))

    def add_records(self, records: Iterable[TitleRecord]) -> int:
        """Append already-built records; raises on duplicates."""
        n = 0
        with self._lock:
            for rec in records:
                if rec.id in self._titles:
                    raise CorpusError(f"duplicate id {rec.id!r}")
                self._titles[rec.id] = rec
                self._append_jsonl("titles.jsonl", rec.to_json_obj())
                n += 1
        return n

    def export(self, out_path: str | Path, format: str = "jsonl") -> int:
        """Write all records in canonical form (sorted by date, then id)."""
        records = self.query()
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        if format == "jsonl":
            with open(out_path, "w", encoding="utf-8") as fh:
                for rec in records:
                    fh.write(json.dumps(rec.to_json_obj(), ensure_ascii=False) + "\n")
        elif format == "csv":
            with open(out_path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(TITLE_FIELDS)
                for rec in records:
                    writer.writerow(
                        [rec.id, rec.text, rec.outlet, rec.bias_group, rec.date.isoformat()]
                    )
        else:
            raise CorpusError(f"unknown format {format!r}")
        return len(records)

    # -- queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._titles)

    def __contains__(self, title_id: str) -> bool:
        return title_id in self._titles

    def get(self, title_id: str) -> TitleRecord:
        try:
            return self._titles[title_id]
        except KeyError:
            raise CorpusError(f"unknown title id {title_id!r}") from None

    def query(
        self,
        bias_group: str | None = None,
        outlet: str | None = None,
        date_range: tuple[dt.date, dt.date] | None = None,
        partition: str | None = None,
    ) -> list[TitleRecord]:
        """Records matching all present predicates, ordered by (date, id)."""
        if bias_group is not None and bias_group not in BIAS_GROUPS:
            raise CorpusError(f"invalid bias_group {bias_group!r}")
        part_ids: frozenset[str] | None = None
        if partition is not None:
            parts = self.partition()
            try:
                part_ids = {
                    "labeled": parts.labeled_ids,
                    "unlabeled": parts.unlabeled_ids,
                    "validation": parts.validation_ids,
                }[partition]
            except KeyError:
                raise CorpusError(f"invalid partition {partition!r}") from None
        out = []
        for rec in self._titles.values():
            if bias_group is not None and rec.bias_group != bias_group:
                continue
            if outlet is not None and rec.outlet != outlet:
                continue
            if date_range is not None and not (date_range[0] <= rec.date <= date_range[1]):
                continue
            if part_ids is not None and rec.id not in part_ids:
                continue
            out.append(rec)
        out.sort(key=lambda r: (r.date, r.id))
        return out

    # -- labels and partition ---------------------------------------------

    def add_vote(self, vote: LabelRecord) -> None:
        """Record one annotator verdict; at most one per (title, annotator, iteration)."""
        if vote.verdict not in VERDICTS:
            raise CorpusError(f"verdict must be H or N, got {vote.verdict!r}")
        if vote.iteration < 0:
            raise CorpusError("iteration must be non-negative")
        if vote.title_id not in self._titles:
            raise CorpusError(f"unknown title id {vote.title_id!r}")
        key = (vote.title_id, vote.annotator_id, vote.iteration)
        with self._lock:
            existing = self._vote_index.get(key)
            if existing is not None:
                if existing.verdict == vote.verdict:
                    return  # idempotent replay
                raise CorpusError(
                    f"conflicting verdict for {key}: {existing.verdict} vs {vote.verdict}"
                )
            self._vote_index[key] = vote
            self._votes.append(vote)
            self._append_jsonl("votes.jsonl", vote.to_json_obj())

    def votes_for(self, title_id: str, iteration: int | None = None) -> list[LabelRecord]:
        return [
            v
            for v in self._votes
            if v.title_id == title_id and (iteration is None or v.iteration == iteration)
        ]

    def ingest_labels(self, source_path: str | Path) -> int:
        """Load a JSONL vote file (title_id, annotator_id, verdict, iteration, recorded_at)."""
        n = 0
        with open(source_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                self.add_vote(
                    LabelRecord(
                        title_id=obj["title_id"],
                        annotator_id=obj["annotator_id"],
                        verdict=obj["verdict"],
                        iteration=int(obj["iteration"]),
                        recorded_at=obj["recorded_at"],
                        idempotency_key=obj.get("idempotency_key"),
                    )
                )
                n += 1
        return n

    def set_consensus(self, label: ConsensusLabel) -> None:
        if label.title_id not in self._titles:
            raise CorpusError(f"unknown title id {label.title_id!r}")
        if label.verdict not in VERDICTS:
            raise CorpusError(f"verdict must be H or N, got {label.verdict!r}")
        with self._lock:
            self._consensus[label.title_id] = label
            self._append_jsonl(
                "consensus.jsonl",
                {
                    "title_id": label.title_id,
                    "verdict": label.verdict,
                    "iteration": label.iteration,
                },
            )

    def consensus_for(self, title_id: str) -> ConsensusLabel | None:
        return self._consensus.get(title_id)

    def consensus_labels(self) -> dict[str, ConsensusLabel]:
        return dict(self._consensus)

    def set_validation_ids(self, ids: Iterable[str]) -> None:
        ids = set(ids)
        unknown = ids - self._titles.keys()
        if unknown:
            raise CorpusError(f"unknown ids in validation set: {sorted(unknown)[:5]}")
        with self._lock:
            self._validation_ids = ids
            self._write_partition()

    def partition(self) -> CorpusPartition:
        """Current pools. Labeled = consensus-labeled minus validation."""
        with self._lock:
            validation = frozenset(self._validation_ids)
            labeled = frozenset(self._consensus.keys()) - validation
            unlabeled = frozenset(self._titles.keys()) - labeled - validation
        return CorpusPartition(
            labeled_ids=labeled, unlabeled_ids=unlabeled, validation_ids=validation
        )

    # -- summaries ---------------------------------------------------------

    def summarize(self, partition: str = "labeled") -> list[tuple[int, int, int]]:
        """Per-year (year, n_hyper, n_nonhyper) counts over a labeled pool.

        Rows span every year of the configured date range; counts use the
        resolved consensus labels of the requested partition.
        """
        parts = self.partition()
        ids = {
            "labeled": parts.labeled_ids,
            "validation": parts.validation_ids,
        }.get(partition)
        if ids is None:
            raise CorpusError(f"summarize needs a labeled partition, got {partition!r}")
        years = range(self.date_range[0].year, self.date_range[1].year + 1)
        hyper = {y: 0 for y in years}
        nonhyper = {y: 0 for y in years}
        for tid in ids:
            label = self._consensus.get(tid)
            if label is None:
                raise CorpusError(f"unresolved label for {tid!r} in {partition}")
            year = self._titles[tid].date.year
            if label.verdict == "H":
                hyper[year] += 1
            else:
                nonhyper[year] += 1
        return [(y, hyper[y], nonhyper[y]) for y in years]
