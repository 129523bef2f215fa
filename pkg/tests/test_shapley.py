import math

import numpy as np
import pytest

from titlescope.features import Vocabulary
from titlescope.linear import LogRegModel
from titlescope.shapley import (
    ANALYSIS_PERIODS,
    aggregate_folds,
    base_value,
    linear_shap,
    report_to_markdown,
    top_terms_per_fold,
)


def model_of(weights, bias=0.0):
    return LogRegModel(weights=np.asarray(weights, dtype=float), bias=bias, lam=0.0)


def brute_force_shapley(w, b, x, mu):
    """Exhaustive-coalition Shapley with the linear value function
    v(S) = sum_{j in S} w_j x_j + sum_{j not in S} w_j mu_j + b."""
    d = len(w)
    values = np.empty(2**d)
    for mask in range(2**d):
        sel = np.array([(mask >> j) & 1 for j in range(d)], dtype=bool)
        values[mask] = w @ np.where(sel, x, mu) + b
    phi = np.zeros(d)
    fact = [math.factorial(k) for k in range(d + 1)]
    for j in range(d):
        for mask in range(2**d):
            if (mask >> j) & 1:
                continue
            s = bin(mask).count("1")
            weight = fact[s] * fact[d - s - 1] / fact[d]
            phi[j] += weight * (values[mask | (1 << j)] - values[mask])
    return phi


class TestLinearShap:
    def test_closed_form_example(self):
        model = model_of([1.0, 2.0])
        mu = np.array([0.5, 0.5])
        phi = linear_shap(model, np.array([[1.0, 0.0]]), mu)
        assert phi[0].tolist() == [0.5, -1.0]
        assert phi[0].sum() + base_value(model, mu) == pytest.approx(1.0, abs=1e-12)

    def test_x_equals_mu_gives_zero(self):
        model = model_of([3.0, -2.0, 1.0])
        mu = np.array([0.2, 0.4, 0.6])
        phi = linear_shap(model, mu.reshape(1, -1), mu)
        assert np.all(phi == 0.0)

    def test_missingness_per_feature(self):
        model = model_of([3.0, -2.0])
        mu = np.array([0.25, 0.75])
        X = np.array([[0.25, 0.0]])
        phi = linear_shap(model, X, mu)
        assert phi[0, 0] == 0.0
        assert phi[0, 1] != 0.0

    def test_matches_exhaustive_coalitions_d8(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            d = 8
            w = rng.normal(size=d)
            b = float(rng.normal())
            x = (rng.random(d) < 0.5).astype(float)
            mu = rng.random(d)
            model = model_of(w, b)
            closed = linear_shap(model, x.reshape(1, -1), mu)[0]
            brute = brute_force_shapley(w, b, x, mu)
            assert np.max(np.abs(closed - brute)) < 1e-9

    def test_local_accuracy_many_samples(self):
        rng = np.random.default_rng(1)
        model = model_of(rng.normal(size=20), float(rng.normal()))
        X = (rng.random((500, 20)) < 0.3).astype(float)
        mu = X.mean(axis=0)
        phi = linear_shap(model, X, mu)
        reconstructed = phi.sum(axis=1) + base_value(model, mu)
        assert np.max(np.abs(reconstructed - model.decision_margin(X))) < 1e-9

    def test_scale_covariance_doubling_weights(self):
        rng = np.random.default_rng(2)
        w = rng.normal(size=6)
        X = (rng.random((40, 6)) < 0.5).astype(float)
        mu = X.mean(axis=0)
        phi1 = linear_shap(model_of(w), X, mu)
        phi2 = linear_shap(model_of(2 * w), X, mu)
        assert np.allclose(phi2, 2 * phi1)
        rank1 = np.argsort(-np.abs(phi1).mean(axis=0), kind="stable")
        rank2 = np.argsort(-np.abs(phi2).mean(axis=0), kind="stable")
        assert np.array_equal(rank1, rank2)

    def test_dimension_mismatch(self):
        model = model_of([1.0, 2.0])
        with pytest.raises(ValueError):
            linear_shap(model, np.ones((1, 3)), np.ones(3))


def vocab_of(*terms):
    return Vocabulary(
        terms=tuple(terms), doc_freq=tuple([1] * len(terms)), n_docs=1, min_df=0.0
    )


class TestTopTerms:
    def test_single_positive_feature_tops_hyper_list(self):
        vocab = vocab_of("slam")
        model = LogRegModel(weights=np.array([3.0]), bias=0.0, lam=0.0, vocab=vocab)
        X = np.array([[1.0], [0.0], [1.0], [0.0], [1.0]])
        hyper, nonhyper = top_terms_per_fold(model, X, vocab)
        assert hyper and hyper[0][0] == "slam"
        assert not nonhyper

    def test_zero_weights_give_empty_lists(self):
        vocab = vocab_of("a", "b")
        model = LogRegModel(weights=np.zeros(2), bias=0.5, lam=0.0, vocab=vocab)
        X = np.array([[1.0, 0.0], [0.0, 1.0]])
        hyper, nonhyper = top_terms_per_fold(model, X, vocab)
        assert hyper == [] and nonhyper == []

    def test_direction_follows_weight_sign(self):
        vocab = vocab_of("up", "down")
        model = LogRegModel(
            weights=np.array([2.0, -2.0]), bias=0.0, lam=0.0, vocab=vocab
        )
        X = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
        hyper, nonhyper = top_terms_per_fold(model, X, vocab)
        assert [t for t, _ in hyper] == ["up"]
        assert [t for t, _ in nonhyper] == ["down"]

    def test_n_larger_than_vocab_returns_all(self):
        vocab = vocab_of("a", "b", "c")
        model = LogRegModel(
            weights=np.array([1.0, 2.0, 3.0]), bias=0.0, lam=0.0, vocab=vocab
        )
        X = (np.random.default_rng(0).random((10, 3)) < 0.5).astype(float)
        hyper, _ = top_terms_per_fold(model, X, vocab, n=100)
        assert len(hyper) == 3


class TestAggregate:
    def test_occurrence_count_dominates(self):
        folds = [[("often", 0.1)]] * 5
        folds = [list(f) for f in folds]
        for f in folds[:3]:
            f.append(("sometimes", 0.9))
        report = aggregate_folds(folds, "pre2016", "Left", "HyperSuggestive")
        assert report.ranked_terms[0].term == "often"
        assert report.ranked_terms[0].occurrences == 5
        assert report.ranked_terms[1].term == "sometimes"

    def test_tie_broken_by_mean_abs_phi(self):
        folds = [[("strong", 0.9), ("weak", 0.4)] for _ in range(5)]
        report = aggregate_folds(folds, "p", "g", "HyperSuggestive")
        assert [t.term for t in report.ranked_terms[:2]] == ["strong", "weak"]

    def test_disjoint_folds_ordered_by_phi(self):
        folds = [[("a", 0.1)], [("b", 0.5)], [("c", 0.3)]]
        report = aggregate_folds(folds, "p", "g", "HyperSuggestive", max_terms=15)
        assert [t.term for t in report.ranked_terms] == ["b", "c", "a"]
        assert all(t.occurrences == 1 for t in report.ranked_terms)

    def test_truncated_to_max_terms(self):
        folds = [[(f"w{i}", 1.0 - i * 0.01) for i in range(30)]]
        report = aggregate_folds(folds, "p", "g", "HyperSuggestive")
        assert len(report.ranked_terms) == 15

    def test_lexicographic_final_tiebreak(self):
        folds = [[("zeta", 0.5), ("alpha", 0.5)]]
        report = aggregate_folds(folds, "p", "g", "HyperSuggestive")
        assert [t.term for t in report.ranked_terms] == ["alpha", "zeta"]


def test_analysis_periods_cover_range_disjointly():
    years = sorted(
        y for (y0, y1) in ANALYSIS_PERIODS.values() for y in range(y0, y1 + 1)
    )
    assert years == list(range(2014, 2023))


def test_markdown_layout():
    folds = [[("slam", 0.5)]]
    reports = [
        aggregate_folds(folds, "pre2016", "Left", "HyperSuggestive"),
        aggregate_folds(folds, "pre2016", "Left", "NonHyperSuggestive"),
    ]
    md = report_to_markdown(reports)
    assert "| Left | HyperSuggestive | slam |" in md
