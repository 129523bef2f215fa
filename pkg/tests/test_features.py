import numpy as np
import pytest

from titlescope.features import (
    CooccurrenceMatrix,
    FeatureVector,
    build_cooccurrence,
    build_vocab,
    cooc_mean_vector,
    idf_table,
    tfidf_matrix,
    vectorize_binary,
    vectorize_tfidf,
)


class TestBuildVocab:
    def test_term_below_threshold_excluded(self):
        docs = [["rare"]] + [["common"]] * 299
        vocab = build_vocab(docs, 0.005)
        assert "rare" not in vocab.terms  # 1/300 < 0.5%
        assert "common" in vocab.terms

    def test_min_df_zero_keeps_all(self):
        docs = [["a"], ["b"], ["c", "a"]]
        vocab = build_vocab(docs, 0.0)
        assert set(vocab.terms) == {"a", "b", "c"}

    def test_boundary_inclusive(self):
        docs = [["edge"]] + [["filler"]] * 199
        vocab = build_vocab(docs, 0.005)
        assert "edge" in vocab.terms  # exactly 0.5% of 200 docs

    def test_order_by_doc_freq_then_lexicographic(self):
        docs = [["b", "a"], ["b", "a"], ["b", "c"]]
        vocab = build_vocab(docs, 0.0)
        assert vocab.terms == ("b", "a", "c")

    def test_doc_freq_counts_documents_not_tokens(self):
        docs = [["x", "x", "x"], ["y"]]
        vocab = build_vocab(docs, 0.0)
        assert vocab.doc_freq[vocab.index("x")] == 1

    def test_monotone_in_min_df(self):
        rng = np.random.default_rng(3)
        words = [f"w{i}" for i in range(30)]
        docs = [
            [words[int(j)] for j in rng.integers(0, 30, size=rng.integers(1, 8))]
            for _ in range(40)
        ]
        kept_sets = []
        for min_df in (0.0, 0.05, 0.1, 0.2, 0.5):
            kept_sets.append(set(build_vocab(docs, min_df).terms))
        for smaller, larger in zip(kept_sets[1:], kept_sets):
            assert smaller <= larger

    def test_empty_corpus_raises(self):
        with pytest.raises(ValueError):
            build_vocab([], 0.005)


class TestBinary:
    def test_counts_binarized(self):
        vocab = build_vocab([["tax", "vote"]], 0.0)
        fv = vectorize_binary(["tax", "tax", "vote"], vocab)
        assert fv.values.tolist() == [1.0, 1.0]
        assert sorted(vocab.terms[i] for i in fv.indices) == ["tax", "vote"]

    def test_out_of_vocab_ignored(self):
        vocab = build_vocab([["tax"]], 0.0)
        fv = vectorize_binary(["unknown", "words"], vocab)
        assert len(fv.indices) == 0

    def test_empty_tokens(self):
        vocab = build_vocab([["tax"]], 0.0)
        fv = vectorize_binary([], vocab)
        assert len(fv.indices) == 0

    def test_indices_strictly_increasing_enforced(self):
        with pytest.raises(ValueError):
            FeatureVector(indices=np.array([2, 1]), values=np.array([1.0, 1.0]))


class TestTfidf:
    def test_two_doc_hand_example(self):
        docs = [["gun", "law"], ["gun"]]
        vocab = build_vocab(docs, 0.0)
        idf = idf_table(vocab)
        fv = vectorize_tfidf(docs[0], vocab, idf)
        weights = {vocab.terms[i]: v for i, v in zip(fv.indices, fv.values)}
        # idf(gun) = ln(3/3)+1 = 1, idf(law) = ln(3/2)+1 ~ 1.4055; after L2
        assert weights["gun"] == pytest.approx(0.5797, abs=1e-4)
        assert weights["law"] == pytest.approx(0.8148, abs=1e-4)

    def test_single_doc_equal_weights(self):
        docs = [["a", "b", "c"]]
        vocab = build_vocab(docs, 0.0)
        fv = vectorize_tfidf(docs[0], vocab, idf_table(vocab))
        assert np.allclose(fv.values, fv.values[0])
        assert np.linalg.norm(fv.values) == pytest.approx(1.0, abs=1e-12)

    def test_absent_term_weight_zero(self):
        docs = [["a"], ["b"]]
        vocab = build_vocab(docs, 0.0)
        fv = vectorize_tfidf(["a"], vocab, idf_table(vocab))
        assert vocab.index("b") not in fv.indices

    def test_l2_norm_property(self):
        rng = np.random.default_rng(0)
        words = [f"w{i}" for i in range(20)]
        docs = [
            [words[int(j)] for j in rng.integers(0, 20, size=rng.integers(0, 9))]
            for _ in range(50)
        ]
        vocab = build_vocab([d for d in docs if d], 0.0)
        X = tfidf_matrix(docs, vocab)
        norms = np.asarray(np.sqrt(X.multiply(X).sum(axis=1))).ravel()
        for i, d in enumerate(docs):
            in_vocab = any(vocab.index(t) is not None for t in d)
            expected = 1.0 if in_vocab else 0.0
            assert norms[i] == pytest.approx(expected, abs=1e-9)


class TestCooccurrence:
    def test_adjacent_pairs_counted(self):
        docs = [["gun", "law"], ["gun", "law"]]
        vocab = build_vocab(docs, 0.0)
        cooc = build_cooccurrence(docs, vocab)
        g, l = vocab.index("gun"), vocab.index("law")
        assert cooc.counts[g, l] == 2
        assert cooc.counts[l, g] == 2

    def test_symmetry_random_corpora(self):
        rng = np.random.default_rng(1)
        words = [f"w{i}" for i in range(12)]
        for _ in range(10):
            docs = [
                [words[int(j)] for j in rng.integers(0, 12, size=rng.integers(2, 9))]
                for _ in range(15)
            ]
            vocab = build_vocab(docs, 0.0)
            cooc = build_cooccurrence(docs, vocab)
            diff = (cooc.counts - cooc.counts.T)
            assert abs(diff).max() == 0

    def test_mean_of_two_rows(self):
        vocab = build_vocab([["gun", "law"]], 0.0)
        g, l = vocab.index("gun"), vocab.index("law")
        import scipy.sparse as sp

        counts = np.zeros((2, 2))
        counts[g, l] = 2
        counts[l, g] = 2
        cooc = CooccurrenceMatrix(vocab=vocab, counts=sp.csr_matrix(counts))
        vec = cooc_mean_vector(["gun", "law"], cooc)
        assert vec.tolist() == [1.0, 1.0]

    def test_single_token_returns_its_row(self):
        docs = [["gun", "law"]]
        vocab = build_vocab(docs, 0.0)
        cooc = build_cooccurrence(docs, vocab)
        row = np.asarray(cooc.counts[vocab.index("gun")].todense()).ravel()
        assert cooc_mean_vector(["gun"], cooc).tolist() == row.tolist()

    def test_out_of_vocab_zero_vector(self):
        docs = [["gun", "law"]]
        vocab = build_vocab(docs, 0.0)
        cooc = build_cooccurrence(docs, vocab)
        assert cooc_mean_vector(["martian"], cooc).tolist() == [0.0, 0.0]

    def test_triplet_file_roundtrip(self, tmp_path):
        docs = [["a", "b", "c", "a"], ["b", "a"]]
        vocab = build_vocab(docs, 0.0)
        cooc = build_cooccurrence(docs, vocab)
        path = tmp_path / "cooc.tri"
        cooc.save(path)
        again = CooccurrenceMatrix.load(path, vocab)
        assert (again.counts != cooc.counts).nnz == 0


def test_vocab_json_roundtrip(tmp_path):
    vocab = build_vocab([["a", "b"], ["a"]], 0.0)
    path = tmp_path / "vocab.json"
    vocab.to_json(path)
    from titlescope.features import Vocabulary

    again = Vocabulary.from_json(path)
    assert again == vocab
