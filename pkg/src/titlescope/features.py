"""Vocabularies and classical title representations.

Three representations: binarized bag-of-words over a document-frequency
filtered vocabulary, smoothed TF-IDF with L2 normalization, and the mean of
bigram co-occurrence rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Vocabulary",
    "FeatureVector",
    "CooccurrenceMatrix",
    "build_vocab",
    "vectorize_binary",
    "idf_table",
    "vectorize_tfidf",
    "binary_matrix",
    "tfidf_matrix",
    "build_cooccurrence",
    "cooc_mean_vector",
    "cooc_mean_matrix",
]


@dataclass(frozen=True)
class Vocabulary:
    """Document-frequency-filtered term space with a fixed term order."""

    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]
    n_docs: int
    min_df: float

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def index(self, term: str) -> int | None:
        return self._index.get(term)

    def to_json(self, path: str | Path) -> None:
        payload = {
            "terms": list(self.terms),
            "doc_freq": list(self.doc_freq),
            "n_docs": self.n_docs,
            "min_df": self.min_df,
        }
        Path(path).write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def from_json(cls, path: str | Path) -> "Vocabulary":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            terms=tuple(obj["terms"]),
            doc_freq=tuple(obj["doc_freq"]),
            n_docs=int(obj["n_docs"]),
            min_df=float(obj["min_df"]),
        )


@dataclass(frozen=True)
class FeatureVector:
    """Sparse vector: strictly increasing indices with matching weights."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must have equal length")
        if len(self.indices) > 1 and not np.all(np.diff(self.indices) > 0):
            raise ValueError("indices must be strictly increasing")
        if len(self.values) and not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")


def build_vocab(docs: Sequence[Sequence[str]], min_df: float = 0.005) -> Vocabulary:
    """Retain terms whose document frequency is at least ``min_df`` of docs.

    Term order is fixed: descending document frequency, ties lexicographic.
    The inclusive threshold is evaluated on the fraction df/n_docs so a term
    sitting exactly on the boundary is retained.
    """
    if not 0.0 <= min_df <= 1.0:
        raise ValueError(f"min_df must be in [0, 1], got {min_df}")
    n_docs = len(docs)
    if n_docs == 0:
        raise ValueError("empty corpus")
    df: dict[str, int] = {}
    for tokens in docs:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    kept = [(t, c) for t, c in df.items() if c / n_docs >= min_df]
    kept.sort(key=lambda tc: (-tc[1], tc[0]))
    return Vocabulary(
        terms=tuple(t for t, _ in kept),
        doc_freq=tuple(c for _, c in kept),
        n_docs=n_docs,
        min_df=min_df,
    )


def vectorize_binary(tokens: Sequence[str], vocab: Vocabulary) -> FeatureVector:
    """Presence/absence indicator: 1 for each in-vocab term, counts ignored."""
    idx = sorted({i for t in tokens if (i := vocab.index(t)) is not None})
    return FeatureVector(
        indices=np.asarray(idx, dtype=np.int64),
        values=np.ones(len(idx), dtype=np.float64),
    )


def idf_table(vocab: Vocabulary) -> np.ndarray:
    """Smoothed idf: ln((1 + n_docs) / (1 + doc_freq)) + 1."""
    df = np.asarray(vocab.doc_freq, dtype=np.float64)
    return np.log((1.0 + vocab.n_docs) / (1.0 + df)) + 1.0


def vectorize_tfidf(
    tokens: Sequence[str], vocab: Vocabulary, idf: np.ndarray
) -> FeatureVector:
    """tf * idf with raw term counts, L2-normalized (zero vector stays zero)."""
    counts: dict[int, int] = {}
    for t in tokens:
        i = vocab.index(t)
        if i is not None:
            counts[i] = counts.get(i, 0) + 1
    if not counts:
        return FeatureVector(
            indices=np.empty(0, dtype=np.int64), values=np.empty(0, dtype=np.float64)
        )
    idx = np.array(sorted(counts), dtype=np.int64)
    vals = np.array([counts[i] for i in idx], dtype=np.float64) * idf[idx]
    norm = np.linalg.norm(vals)
    if norm > 0:
        vals = vals / norm
    return FeatureVector(indices=idx, values=vals)


def _stack(vectors: Iterable[FeatureVector], dim: int) -> sp.csr_matrix:
    rows, cols, data = [], [], []
    n = 0
    for i, vec in enumerate(vectors):
        rows.extend([i] * len(vec.indices))
        cols.extend(vec.indices.tolist())
        data.extend(vec.values.tolist())
        n = i + 1
    return sp.csr_matrix(
        (data, (rows, cols)), shape=(n, dim), dtype=np.float64
    )


def binary_matrix(docs: Sequence[Sequence[str]], vocab: Vocabulary) -> sp.csr_matrix:
    return _stack((vectorize_binary(d, vocab) for d in docs), len(vocab))


def tfidf_matrix(docs: Sequence[Sequence[str]], vocab: Vocabulary) -> sp.csr_matrix:
    idf = idf_table(vocab)
    return _stack((vectorize_tfidf(d, vocab, idf) for d in docs), len(vocab))


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Symmetric adjacent-pair (bigram) counts over a vocabulary."""

    vocab: Vocabulary
    counts: sp.csr_matrix

    def save(self, path: str | Path) -> None:
        """Sparse triplet text file: header line, then `i j count` rows."""
        coo = self.counts.tocoo()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"% {self.counts.shape[0]} {self.counts.shape[1]} {coo.nnz}\n")
            for i, j, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{i} {j} {int(v)}\n")

    @classmethod
    def load(cls, path: str | Path, vocab: Vocabulary) -> "CooccurrenceMatrix":
        rows, cols, data = [], [], []
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            shape = (int(header[1]), int(header[2]))
            for line in fh:
                i, j, v = line.split()
                rows.append(int(i))
                cols.append(int(j))
                data.append(float(v))
        counts = sp.csr_matrix((data, (rows, cols)), shape=shape)
        return cls(vocab=vocab, counts=counts)


def build_cooccurrence(
    docs: Sequence[Sequence[str]], vocab: Vocabulary
) -> CooccurrenceMatrix:
    """Count adjacent in-vocab token pairs; both (i,j) and (j,i) are bumped."""
    dim = len(vocab)
    rows, cols = [], []
    for tokens in docs:
        idx = [vocab.index(t) for t in tokens]
        for a, b in zip(idx, idx[1:]):
            if a is None or b is None:
                continue
            rows.append(a)
            cols.append(b)
            rows.append(b)
            cols.append(a)
    data = np.ones(len(rows), dtype=np.float64)
    counts = sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))
    counts.sum_duplicates()
    return CooccurrenceMatrix(vocab=vocab, counts=counts)


def cooc_mean_vector(tokens: Sequence[str], cooc: CooccurrenceMatrix) -> np.ndarray:
    """Mean of the co-occurrence rows of in-vocab tokens (zero vector if none)."""
    idx = [i for t in tokens if (i := cooc.vocab.index(t)) is not None]
    dim = cooc.counts.shape[0]
    if not idx:
        return np.zeros(dim, dtype=np.float64)
    return np.asarray(cooc.counts[idx].mean(axis=0)).ravel()


def cooc_mean_matrix(
    docs: Sequence[Sequence[str]], cooc: CooccurrenceMatrix
) -> np.ndarray:
    return np.vstack([cooc_mean_vector(d, cooc) for d in docs])
