import datetime as dt
import json
import logging

import numpy as np
import pytest

from titlescope.active import (
    ActiveLoop,
    BatchSpec,
    compose_batch,
    rank_pool,
    resolve_consensus,
)
from titlescope.corpus import ConsensusLabel, CorpusStore, TitleRecord
from titlescope.scoring import LogRegTitleScorer, ScoringError


class StubScorer:
    """Scores titles by a fixed mapping; records fit calls."""

    scorer_id = "stub"

    def __init__(self, probs=None):
        self.probs = probs or {}
        self.fit_calls = 0

    def fit(self, texts, labels):
        self.fit_calls += 1

    def score_titles(self, texts):
        return np.array([self.probs.get(t, 0.5) for t in texts])


class TestRankPool:
    def test_tie_broken_by_id(self):
        scorer = StubScorer({"text-a": 0.9, "text-b": 0.1, "text-c": 0.9})
        texts = {"a": "text-a", "b": "text-b", "c": "text-c"}
        assert rank_pool(scorer, ["b", "c", "a"], texts) == ["a", "c", "b"]

    def test_empty_pool(self):
        assert rank_pool(StubScorer(), [], {}) == []

    def test_permutation_of_input(self):
        rng = np.random.default_rng(0)
        ids = [f"t{i}" for i in range(2000)]
        texts = {i: i for i in ids}
        scorer = StubScorer({i: float(rng.random()) for i in ids})
        ranked = rank_pool(scorer, ids, texts)
        assert sorted(ranked) == sorted(ids)
        assert len(ranked) == 2000

    def test_scoring_error_carries_prefix_and_resume_completes(self):
        class Flaky:
            scorer_id = "flaky"

            def __init__(self):
                self.calls = 0

            def score_titles(self, texts):
                self.calls += 1
                if self.calls == 1:
                    raise ScoringError("boom", scored=[0.7, 0.6])
                return np.full(len(texts), 0.1)

        flaky = Flaky()
        ids = ["a", "b", "c", "d"]
        texts = {i: i for i in ids}
        with pytest.raises(ScoringError) as err:
            rank_pool(flaky, ids, texts)
        assert err.value.scored == [0.7, 0.6]
        ranked = rank_pool(flaky, ids, texts, resume=err.value.scored)
        assert ranked == ["a", "b", "c", "d"]


class TestComposeBatch:
    def years_map(self, ids, n_years=9):
        return {t: 2014 + i % n_years for i, t in enumerate(ids)}

    def test_paper_shape_450_top_50_random(self):
        ids = [f"t{i:04d}" for i in range(3000)]
        years = self.years_map(ids)
        spec = BatchSpec(batch_size=500, top_fraction=0.9)
        result = compose_batch(ids, years, spec, seed=0)
        assert len(result.ids) == 500
        assert len(result.top_ids) == 450
        assert len(result.random_ids) == 50
        from collections import Counter

        per_year = Counter(years[t] for t in result.top_ids)
        assert all(v == 50 for v in per_year.values())

    def test_full_top_fraction_no_random(self):
        ids = [f"t{i:04d}" for i in range(600)]
        years = self.years_map(ids)
        spec = BatchSpec(batch_size=90, top_fraction=1.0)
        result = compose_batch(ids, years, spec, seed=0)
        assert result.random_ids == ()
        assert len(result.top_ids) == 90

    def test_small_batch_quota_remainder(self):
        ids = [f"t{i:03d}" for i in range(300)]
        years = {t: 2014 + i % 3 for i, t in enumerate(ids)}
        spec = BatchSpec(batch_size=10, top_fraction=0.9, year_buckets=(2014, 2015, 2016))
        result = compose_batch(ids, years, spec, seed=1)
        assert len(result.top_ids) == 9  # ceil(9) = 9, 3 per year
        assert len(result.random_ids) == 1

    def test_quota_remainder_to_earliest_years(self):
        ids = [f"t{i:03d}" for i in range(200)]
        years = {t: 2014 + i % 4 for i, t in enumerate(ids)}
        spec = BatchSpec(
            batch_size=10, top_fraction=1.0, year_buckets=(2014, 2015, 2016, 2017)
        )
        result = compose_batch(ids, years, spec, seed=0)
        from collections import Counter

        per_year = Counter(years[t] for t in result.top_ids)
        assert per_year[2014] == 3 and per_year[2015] == 3
        assert per_year[2016] == 2 and per_year[2017] == 2

    def test_quotas_differ_at_most_one(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n_years = int(rng.integers(2, 10))
            batch = int(rng.integers(2, 60))
            years_tuple = tuple(range(2014, 2014 + n_years))
            ids = [f"t{i:04d}" for i in range(800)]
            years = {t: years_tuple[i % n_years] for i, t in enumerate(ids)}
            spec = BatchSpec(
                batch_size=batch, top_fraction=0.9, year_buckets=years_tuple
            )
            result = compose_batch(ids, years, spec, seed=0)
            from collections import Counter

            per_year = Counter(years[t] for t in result.top_ids)
            if per_year:
                assert max(per_year.values()) - min(per_year.values()) <= 1
            assert len(result.ids) == batch

    def test_exhausted_pool_flagged(self):
        ids = ["a", "b", "c"]
        years = {t: 2014 for t in ids}
        spec = BatchSpec(batch_size=10, top_fraction=0.5, year_buckets=(2014,))
        result = compose_batch(ids, years, spec, seed=0)
        assert result.exhausted
        assert sorted(result.ids) == ids

    def test_seed_determinism(self):
        ids = [f"t{i:04d}" for i in range(500)]
        years = self.years_map(ids)
        spec = BatchSpec(batch_size=100, top_fraction=0.5)
        a = compose_batch(ids, years, spec, seed=9)
        b = compose_batch(ids, years, spec, seed=9)
        assert a == b

    def test_empty_pool_rejected(self):
        with pytest.raises(ValueError):
            compose_batch([], {}, BatchSpec(), seed=0)


class TestConsensus:
    def test_majority(self):
        assert resolve_consensus(["H", "H", "N"]) == "H"

    def test_two_way_tie_unresolved(self):
        assert resolve_consensus(["H", "N"]) is None

    def test_unanimous(self):
        assert resolve_consensus(["N", "N", "N"]) == "N"

    def test_no_votes_rejected(self):
        with pytest.raises(ValueError):
            resolve_consensus([])


def small_world(n=300, seed=0, n_val=40):
    """In-memory store over a slice of years with planted labels."""
    rng = np.random.default_rng(seed)
    records, labels = [], {}
    for i in range(n):
        year = 2014 + i % 9
        hyper = rng.random() < 0.3
        text = ("slam alarm " if hyper else "calm quiet ") + f"title {i}"
        tid = f"t{i:04d}"
        records.append(
            TitleRecord(tid, text, "CNN", "Left", dt.date(year, 1 + i % 12, 1))
        )
        labels[tid] = int(hyper)
    store = CorpusStore(None)
    store.add_records(records)
    val_ids = [r.id for r in records[:n_val]]
    store.set_validation_ids(val_ids)
    for tid in val_ids:
        store.set_consensus(ConsensusLabel(tid, "H" if labels[tid] else "N", 0))
    return store, labels


class TestLoop:
    def spec(self):
        return BatchSpec(batch_size=30, top_fraction=0.9, candidate_sample_size=100)

    def oracle_votes(self, loop, labels, k=3):
        return {
            tid: ["H" if labels[tid] else "N"] * k for tid in loop.state.batch_ids
        }

    def test_batches_never_reoffer_titles(self):
        store, labels = small_world()
        loop = ActiveLoop(store, LogRegTitleScorer(min_df=0.0), self.spec(), seed=1)
        loop.bootstrap(
            {tid: ("H" if labels[tid] else "N") for tid in loop.seed_sample(40)}
        )
        seen = set(loop.state.batch_ids)
        for _ in range(3):
            state = loop.run_iteration(self.oracle_votes(loop, labels))
            batch = set(state.batch_ids)
            assert not batch & (seen - batch)
            part = store.partition()
            assert not batch & part.labeled_ids
            seen |= batch

    def test_zero_resolved_keeps_scorer_and_warns(self, caplog):
        store, labels = small_world()
        scorer = StubScorer({})
        loop = ActiveLoop(store, scorer, self.spec(), seed=2)
        loop.bootstrap(
            {tid: ("H" if labels[tid] else "N") for tid in loop.seed_sample(40)}
        )
        fits_before = scorer.fit_calls
        votes = {tid: ["H", "N"] for tid in loop.state.batch_ids}  # all tied
        with caplog.at_level(logging.WARNING):
            state = loop.run_iteration(votes)
        assert scorer.fit_calls == fits_before
        assert "no labels" in caplog.text
        assert state.iteration == 2

    def test_retrain_crash_leaves_state_intact(self, tmp_path):
        store, labels = small_world()

        class Exploding(StubScorer):
            def fit(self, texts, labels):
                if self.fit_calls >= 1:
                    raise RuntimeError("injected crash")
                super().fit(texts, labels)

        scorer = Exploding()
        loop = ActiveLoop(store, scorer, self.spec(), seed=3, workdir=tmp_path)
        loop.bootstrap(
            {tid: ("H" if labels[tid] else "N") for tid in loop.seed_sample(40)}
        )
        state_before = loop.state
        labeled_before = store.partition().labeled_ids
        ckpt_before = (tmp_path / "state.json").read_text()
        with pytest.raises(RuntimeError):
            loop.run_iteration(self.oracle_votes(loop, labels))
        assert loop.state == state_before
        assert store.partition().labeled_ids == labeled_before
        assert (tmp_path / "state.json").read_text() == ckpt_before

    def test_state_roundtrip_same_next_batch(self, tmp_path):
        store, labels = small_world()
        loop = ActiveLoop(
            store, LogRegTitleScorer(min_df=0.0), self.spec(), seed=4, workdir=tmp_path
        )
        loop.bootstrap(
            {tid: ("H" if labels[tid] else "N") for tid in loop.seed_sample(40)}
        )
        votes = self.oracle_votes(loop, labels)
        state_a = loop.run_iteration(votes)

        # replay from the bootstrap checkpoint in a fresh loop over the
        # same store state
        store2, _ = small_world()
        loop2 = ActiveLoop(
            store2, LogRegTitleScorer(min_df=0.0), self.spec(), seed=4
        )
        loop2.bootstrap(
            {tid: ("H" if labels[tid] else "N") for tid in loop2.seed_sample(40)}
        )
        serialized = json.dumps(loop2.state.to_json_obj())
        from titlescope.active import IterationState

        restored = IterationState.from_json_obj(json.loads(serialized))
        assert restored == loop2.state
        state_b = loop2.run_iteration(votes)
        assert state_a.batch_ids == state_b.batch_ids

    def test_checkpoint_reload(self, tmp_path):
        store, labels = small_world()
        loop = ActiveLoop(
            store, LogRegTitleScorer(min_df=0.0), self.spec(), seed=5, workdir=tmp_path
        )
        loop.bootstrap(
            {tid: ("H" if labels[tid] else "N") for tid in loop.seed_sample(40)}
        )
        loop.run_iteration(self.oracle_votes(loop, labels))
        resumed = ActiveLoop(
            store, LogRegTitleScorer(min_df=0.0), self.spec(), seed=5, workdir=tmp_path
        )
        resumed.load_checkpoint()
        assert resumed.state == loop.state

    def test_scoring_failure_checkpoint_resume(self, tmp_path):
        store, labels = small_world()

        class FlakyOnce(StubScorer):
            def __init__(self):
                super().__init__({})
                self.score_calls = 0

            def score_titles(self, texts):
                self.score_calls += 1
                if self.score_calls == 2:  # fail during batch-1 ranking
                    raise ScoringError("network down", scored=[0.5] * 10)
                return super().score_titles(texts)

        scorer = FlakyOnce()
        loop = ActiveLoop(store, scorer, self.spec(), seed=6, workdir=tmp_path)
        with pytest.raises(ScoringError):
            loop.bootstrap(
                {tid: ("H" if labels[tid] else "N") for tid in loop.seed_sample(40)}
            )
        ckpts = list(tmp_path.glob("score_checkpoint_iter*.json"))
        assert len(ckpts) == 1
        saved = json.loads(ckpts[0].read_text())
        assert len(saved["scored"]) == 10

        # a rerun resumes from the scored prefix and completes
        loop2 = ActiveLoop(store, StubScorer({}), self.spec(), seed=6, workdir=tmp_path)
        loop2.bootstrap(
            {tid: ("H" if labels[tid] else "N") for tid in loop2.seed_sample(40)}
        )
        assert not list(tmp_path.glob("score_checkpoint_iter*.json"))
