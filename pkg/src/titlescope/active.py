"""Iterative human-guided labeling loop.

Each iteration ranks the unlabeled pool by predicted hyperpartisanship,
composes the next annotation batch as 90% per-year-stratified top-ranked
titles plus 10% seeded random picks, resolves strict-majority consensus
from annotator votes, retrains the scorer on all accumulated labels, and
tracks validation metrics. Iteration transitions are atomic: any failure
during retraining leaves the previous state (and the store) untouched.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import ConsensusLabel, CorpusStore
from .evaluation import Metrics, evaluate
from .scoring import ScoringError, TitleScorer

__all__ = [
    "BatchSpec",
    "BatchResult",
    "IterationState",
    "rank_pool",
    "compose_batch",
    "resolve_consensus",
    "ActiveLoop",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchSpec:
    batch_size: int = 500
    top_fraction: float = 0.9
    year_buckets: tuple[int, ...] = tuple(range(2014, 2023))
    candidate_sample_size: int = 2000  # iteration 1 only
    rank_cap: int | None = None  # optional cap for later iterations

    def __post_init__(self):
        if not 0.0 <= self.top_fraction <= 1.0:
            raise ValueError("top_fraction must be in [0, 1]")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class BatchResult:
    ids: tuple[str, ...]
    top_ids: tuple[str, ...]
    random_ids: tuple[str, ...]
    exhausted: bool


@dataclass(frozen=True)
class IterationState:
    iteration: int
    batch_ids: tuple[str, ...]
    offered_ids: frozenset[str]
    metrics_history: tuple[dict, ...]
    seed: int
    scorer_path: str | None = None

    def to_json_obj(self) -> dict:
        return {
            "iteration": self.iteration,
            "batch_ids": list(self.batch_ids),
            "offered_ids": sorted(self.offered_ids),
            "metrics_history": list(self.metrics_history),
            "seed": self.seed,
            "scorer_path": self.scorer_path,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "IterationState":
        return cls(
            iteration=int(obj["iteration"]),
            batch_ids=tuple(obj["batch_ids"]),
            offered_ids=frozenset(obj["offered_ids"]),
            metrics_history=tuple(obj["metrics_history"]),
            seed=int(obj["seed"]),
            scorer_path=obj.get("scorer_path"),
        )


def rank_pool(
    scorer: TitleScorer,
    pool_ids: Sequence[str],
    texts: Mapping[str, str],
    resume: Sequence[float] | None = None,
) -> list[str]:
    """Pool ids ordered by descending P(hyperpartisan), ties broken by id.

    Titles are scored in sorted-id order so a partial failure maps onto an
    id prefix: the raised ``ScoringError`` carries every probability that
    completed, and passing that prefix back as ``resume`` skips rescoring.
    """
    ordered = sorted(pool_ids)
    done: list[float] = list(resume) if resume else []
    todo = ordered[len(done):]
    if todo:
        try:
            probs = scorer.score_titles([texts[i] for i in todo])
        except ScoringError as exc:
            raise ScoringError(str(exc), scored=done + list(exc.scored)) from exc
        done.extend(float(p) for p in probs)
    pairs = sorted(zip(ordered, done), key=lambda p: (-p[1], p[0]))
    return [i for i, _ in pairs]


def compose_batch(
    ranked_ids: Sequence[str],
    years: Mapping[str, int],
    spec: BatchSpec,
    seed: int,
) -> BatchResult:
    """Top-ranked ids under equal per-year quotas plus seeded random picks.

    The top share is ceil(top_fraction * batch_size), split evenly over the
    year buckets (remainder to the earliest years). Years with too few
    titles leave their shortfall to the random stage, which draws uniformly
    from the rest of the pool. The batch only falls short when the pool
    itself is exhausted (flagged).
    """
    if not ranked_ids:
        raise ValueError("empty pool")
    n_years = len(spec.year_buckets)
    top_count = math.ceil(spec.top_fraction * spec.batch_size)
    base, rem = divmod(top_count, n_years)
    quotas = {
        year: base + (1 if i < rem else 0)
        for i, year in enumerate(sorted(spec.year_buckets))
    }
    chosen: list[str] = []
    chosen_set: set[str] = set()
    per_year: dict[int, int] = {y: 0 for y in spec.year_buckets}
    for tid in ranked_ids:
        year = years[tid]
        if year not in per_year or per_year[year] >= quotas[year]:
            continue
        per_year[year] += 1
        chosen.append(tid)
        chosen_set.add(tid)
        if len(chosen) >= top_count:
            break
    remaining = spec.batch_size - len(chosen)
    candidates = sorted(set(ranked_ids) - chosen_set)
    rng = np.random.default_rng(seed)
    n_random = min(remaining, len(candidates))
    random_ids = tuple(
        candidates[i]
        for i in rng.choice(len(candidates), size=n_random, replace=False)
    ) if n_random else ()
    ids = tuple(chosen) + random_ids
    return BatchResult(
        ids=ids,
        top_ids=tuple(chosen),
        random_ids=random_ids,
        exhausted=len(ids) < spec.batch_size,
    )


def resolve_consensus(votes: Sequence[str]) -> str | None:
    """Strict-majority verdict over per-annotator votes, None if unresolved."""
    if not votes:
        raise ValueError("need at least one vote")
    n_h = sum(1 for v in votes if v == "H")
    n_n = len(votes) - n_h
    if n_h > n_n:
        return "H"
    if n_n > n_h:
        return "N"
    return None


class ActiveLoop:
    """Drives the rank -> batch -> consensus -> retrain cycle over a store.

    The scorer must expose ``fit(texts, labels)`` and ``score_titles``; the
    validation set must already carry consensus labels in the store.
    """

    def __init__(
        self,
        store: CorpusStore,
        scorer: TitleScorer,
        spec: BatchSpec | None = None,
        seed: int = 0,
        workdir: str | Path | None = None,
    ):
        self.store = store
        self.scorer = scorer
        self.spec = spec or BatchSpec()
        self.seed = seed
        self.workdir = Path(workdir) if workdir else None
        self.state = IterationState(
            iteration=0,
            batch_ids=(),
            offered_ids=frozenset(),
            metrics_history=(),
            seed=seed,
        )
        self.last_batch: BatchResult | None = None

    # -- helpers ---------------------------------------------------------

    def _texts(self, ids: Sequence[str]) -> dict[str, str]:
        return {i: self.store.get(i).text for i in ids}

    def _years(self, ids: Sequence[str]) -> dict[str, int]:
        return {i: self.store.get(i).date.year for i in ids}

    def _training_data(self) -> tuple[list[str], list[int]]:
        part = self.store.partition()
        texts, labels = [], []
        for tid in sorted(part.labeled_ids):
            label = self.store.consensus_for(tid)
            texts.append(self.store.get(tid).text)
            labels.append(1 if label.verdict == "H" else 0)
        return texts, labels

    def _validation_metrics(self, scorer: TitleScorer) -> Metrics:
        part = self.store.partition()
        val_ids = sorted(part.validation_ids)
        if not val_ids:
            raise ValueError("no validation set configured")
        texts = [self.store.get(i).text for i in val_ids]
        truth = [
            1 if self.store.consensus_for(i).verdict == "H" else 0 for i in val_ids
        ]
        probs = scorer.score_titles(texts)
        return evaluate((probs >= 0.5).astype(int), truth)

    def _candidate_pool(self) -> list[str]:
        part = self.store.partition()
        return sorted(part.unlabeled_ids - self.state.offered_ids)

    def _compose_next(self, iteration: int) -> BatchResult:
        pool = self._candidate_pool()
        if not pool:
            raise ValueError("unlabeled pool exhausted")
        rng = np.random.default_rng((self.seed, iteration))
        if iteration == 1 and self.spec.candidate_sample_size < len(pool):
            # pre-sample candidates before ranking, first iteration only
            idx = rng.choice(
                len(pool), size=self.spec.candidate_sample_size, replace=False
            )
            pool = sorted(pool[i] for i in idx)
        elif self.spec.rank_cap is not None and self.spec.rank_cap < len(pool):
            idx = rng.choice(len(pool), size=self.spec.rank_cap, replace=False)
            pool = sorted(pool[i] for i in idx)
        ranked = self._rank_with_checkpoint(pool, iteration)
        batch_seed = int(
            np.random.default_rng((self.seed, iteration, 1)).integers(2**31)
        )
        return compose_batch(ranked, self._years(pool), self.spec, batch_seed)

    def _rank_with_checkpoint(self, pool: list[str], iteration: int) -> list[str]:
        """Rank the pool; on scoring failure persist the scored prefix so a
        rerun resumes instead of starting over."""
        ckpt_path = (
            self.workdir / f"score_checkpoint_iter{iteration}.json"
            if self.workdir
            else None
        )
        resume: list[float] | None = None
        if ckpt_path is not None and ckpt_path.exists():
            obj = json.loads(ckpt_path.read_text(encoding="utf-8"))
            if obj.get("pool") == pool:
                resume = [float(p) for p in obj["scored"]]
        try:
            ranked = rank_pool(self.scorer, pool, self._texts(pool), resume=resume)
        except ScoringError as exc:
            if ckpt_path is not None:
                ckpt_path.write_text(
                    json.dumps({"pool": pool, "scored": exc.scored}) + "\n",
                    encoding="utf-8",
                )
            raise
        if ckpt_path is not None and ckpt_path.exists():
            ckpt_path.unlink()
        return ranked

    # -- lifecycle ---------------------------------------------------------

    def seed_sample(self, n: int = 200) -> list[str]:
        """Seeded random ids from the unlabeled pool for bootstrap labeling."""
        pool = self._candidate_pool()
        rng = np.random.default_rng((self.seed, 0))
        idx = rng.choice(len(pool), size=min(n, len(pool)), replace=False)
        return sorted(pool[i] for i in idx)

    def bootstrap(self, consensus: Mapping[str, str]) -> IterationState:
        """Train the initial scorer from seed labels and open batch 1."""
        if self.state.iteration != 0:
            raise RuntimeError("loop already bootstrapped")
        for tid, verdict in consensus.items():
            self.store.set_consensus(
                ConsensusLabel(title_id=tid, verdict=verdict, iteration=0)
            )
        texts, labels = self._training_data()
        self.scorer.fit(texts, labels)
        metrics = self._validation_metrics(self.scorer)
        batch = self._compose_next(iteration=1)
        self.last_batch = batch
        self.state = IterationState(
            iteration=1,
            batch_ids=batch.ids,
            offered_ids=self.state.offered_ids | set(batch.ids) | set(consensus),
            metrics_history=({"iteration": 0, **metrics.as_dict()},),
            seed=self.seed,
            scorer_path=self._save_scorer(0),
        )
        self._save_checkpoint()
        return self.state

    def run_iteration(
        self, votes: Mapping[str, Sequence[str]], allow_missing: bool = False
    ) -> IterationState:
        """Close the open batch with per-title vote lists and advance.

        Consensus resolution, retraining and validation run on copies;
        store and state are only mutated after everything succeeded, so a
        retraining crash leaves the previous iteration fully intact. With
        ``allow_missing`` (forced close), unvoted titles become Unresolved.
        """
        if self.state.iteration < 1:
            raise RuntimeError("bootstrap the loop before running iterations")
        missing = [tid for tid in self.state.batch_ids if not votes.get(tid)]
        if missing and not allow_missing:
            raise ValueError(
                f"{len(missing)} batch titles have no votes (e.g. {missing[:3]})"
            )
        resolved: dict[str, str] = {}
        unresolved: list[str] = []
        for tid in self.state.batch_ids:
            verdict = resolve_consensus(votes[tid]) if votes.get(tid) else None
            if verdict is None:
                unresolved.append(tid)
            else:
                resolved[tid] = verdict

        iteration = self.state.iteration
        if resolved:
            # Retrain on accumulated + new labels without touching the store.
            texts, labels = self._training_data()
            for tid, verdict in resolved.items():
                texts.append(self.store.get(tid).text)
                labels.append(1 if verdict == "H" else 0)
            self.scorer.fit(texts, labels)
        else:
            logger.warning(
                "iteration %d resolved no labels; scorer left unchanged", iteration
            )
        metrics = self._validation_metrics(self.scorer)

        # Commit: labels first, then state.
        for tid, verdict in resolved.items():
            self.store.set_consensus(
                ConsensusLabel(title_id=tid, verdict=verdict, iteration=iteration)
            )
        next_batch = self._compose_next(iteration + 1)
        self.last_batch = next_batch
        self.state = IterationState(
            iteration=iteration + 1,
            batch_ids=next_batch.ids,
            offered_ids=self.state.offered_ids | set(next_batch.ids),
            metrics_history=self.state.metrics_history
            + ({"iteration": iteration, **metrics.as_dict()},),
            seed=self.seed,
            scorer_path=self._save_scorer(iteration),
        )
        self._save_checkpoint()
        return self.state

    # -- persistence ---------------------------------------------------------

    def _save_scorer(self, iteration: int) -> str | None:
        if self.workdir is None or not hasattr(self.scorer, "save"):
            return None
        self.workdir.mkdir(parents=True, exist_ok=True)
        path = self.workdir / f"scorer_iter{iteration}.json"
        self.scorer.save(path)
        return str(path)

    def _save_checkpoint(self) -> None:
        if self.workdir is None:
            return
        self.workdir.mkdir(parents=True, exist_ok=True)
        tmp = self.workdir / "state.json.tmp"
        tmp.write_text(
            json.dumps(self.state.to_json_obj(), indent=2) + "\n", encoding="utf-8"
        )
        tmp.replace(self.workdir / "state.json")

    def load_checkpoint(self) -> IterationState:
        if self.workdir is None:
            raise RuntimeError("no workdir configured")
        obj = json.loads((self.workdir / "state.json").read_text(encoding="utf-8"))
        self.state = IterationState.from_json_obj(obj)
        if self.state.scorer_path and hasattr(self.scorer, "load"):
            self.scorer.load(self.state.scorer_path)
        return self.state
