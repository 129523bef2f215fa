"""L1-regularized logistic regression trained by proximal gradient descent.

The optimizer is a generic proximal-gradient driver with backtracking line
search; the sufficient-decrease condition makes the composite objective
provably non-increasing at every iteration, and soft-thresholding produces
exactly-zero weights. The bias coordinate carries no penalty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .features import Vocabulary

__all__ = [
    "soft_threshold",
    "proximal_gradient",
    "LogRegModel",
    "logistic_loss",
    "logistic_loss_grad",
    "l1_objective",
    "train_l1_logreg",
]


def soft_threshold(x: np.ndarray, t: np.ndarray | float) -> np.ndarray:
    """Proximal operator of t*|.|: sign(x) * max(|x| - t, 0)."""
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def proximal_gradient(
    f: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    l1_weight: np.ndarray | float,
    max_iter: int = 2000,
    tol: float = 1e-7,
    step0: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Minimize f(x) + sum(l1_weight * |x|).

    ``l1_weight`` may be a scalar or a per-coordinate vector (zero entries
    leave coordinates unpenalized). Returns the solution and the objective
    history, one entry per iterate including the start.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    w = np.broadcast_to(np.asarray(l1_weight, dtype=np.float64), x.shape)

    def penalty(v: np.ndarray) -> float:
        return float(np.sum(w * np.abs(v)))

    fx = f(x)
    obj = fx + penalty(x)
    history = [obj]
    t = step0
    for _ in range(max_iter):
        g = grad(x)
        while True:
            z = soft_threshold(x - t * g, t * w)
            dz = z - x
            fz = f(z)
            bound = fx + float(g @ dz) + float(dz @ dz) / (2.0 * t)
            if fz <= bound + 1e-12 * max(1.0, abs(fx)):
                break
            t *= 0.5
            if t < 1e-16:
                # Gradient is numerically flat; accept the prox point.
                break
        new_obj = fz + penalty(z)
        history.append(new_obj)
        decrease = obj - new_obj
        x, fx, obj = z, fz, new_obj
        # Negative decreases are float noise at the optimum; only a genuine
        # sub-tol improvement terminates (the prox fixpoint keeps
        # contracting x below what objective comparisons can resolve).
        if 0.0 <= decrease < tol:
            break
    # t never grows back: a monotone step size keeps prox rounding errors
    # at the scale of the iterates instead of the scale of a huge step.
    return x, np.asarray(history)


def _margins(X, weights: np.ndarray, bias: float) -> np.ndarray:
    return np.asarray(X @ weights).ravel() + bias


def logistic_loss(X, y: np.ndarray, weights: np.ndarray, bias: float) -> float:
    """Mean logistic loss, computed stably via logaddexp."""
    z = _margins(X, weights, bias)
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def logistic_loss_grad(
    X, y: np.ndarray, weights: np.ndarray, bias: float
) -> tuple[np.ndarray, float]:
    """Gradient of the mean logistic loss w.r.t. (weights, bias)."""
    n = X.shape[0]
    p = expit(_margins(X, weights, bias))
    r = (p - y) / n
    gw = np.asarray(X.T @ r).ravel()
    return gw, float(np.sum(r))


def l1_objective(X, y: np.ndarray, weights: np.ndarray, bias: float, lam: float) -> float:
    return logistic_loss(X, y, weights, bias) + lam * float(np.sum(np.abs(weights)))


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    lam: float
    vocab: Vocabulary | None = None
    objective_history: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)

    def decision_margin(self, X) -> np.ndarray:
        return _margins(X, self.weights, self.bias)

    def predict_proba(self, X) -> np.ndarray:
        return expit(self.decision_margin(X))

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X) >= threshold).astype(np.int64)

    def save(self, path: str | Path) -> None:
        payload = {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "lam": self.lam,
        }
        if self.vocab is not None:
            payload["vocab"] = {
                "terms": list(self.vocab.terms),
                "doc_freq": list(self.vocab.doc_freq),
                "n_docs": self.vocab.n_docs,
                "min_df": self.vocab.min_df,
            }
        Path(path).write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LogRegModel":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        vocab = None
        if "vocab" in obj:
            v = obj["vocab"]
            vocab = Vocabulary(
                terms=tuple(v["terms"]),
                doc_freq=tuple(v["doc_freq"]),
                n_docs=int(v["n_docs"]),
                min_df=float(v["min_df"]),
            )
        return cls(
            weights=np.asarray(obj["weights"], dtype=np.float64),
            bias=float(obj["bias"]),
            lam=float(obj["lam"]),
            vocab=vocab,
        )


def _check_training_input(X, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != len(y):
        raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} labels")
    if len(y) < 2:
        raise ValueError("need at least 2 training samples")
    classes = np.unique(y)
    if not np.all(np.isin(classes, (0.0, 1.0))):
        raise ValueError("labels must be 0/1")
    if len(classes) < 2:
        raise ValueError("training data contains a single class")
    data = X.data if sp.issparse(X) else np.asarray(X)
    if not np.all(np.isfinite(data)):
        raise ValueError("non-finite feature values")
    return y


def train_l1_logreg(
    X,
    y: np.ndarray,
    lam: float = 1e-3,
    tol: float = 1e-7,
    max_iter: int = 2000,
    vocab: Vocabulary | None = None,
) -> LogRegModel:
    """Fit mean logistic loss + lam * ||w||_1 (bias unpenalized).

    Accepts dense arrays or scipy sparse matrices. Weights start at zero,
    so an overwhelming lam keeps them exactly zero while the bias converges
    to the log-odds of the class prior.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    y = _check_training_input(X, y)
    d = X.shape[1]

    def unpack(v: np.ndarray) -> tuple[np.ndarray, float]:
        return v[:d], float(v[d])

    def f(v: np.ndarray) -> float:
        w, b = unpack(v)
        return logistic_loss(X, y, w, b)

    def grad(v: np.ndarray) -> np.ndarray:
        w, b = unpack(v)
        gw, gb = logistic_loss_grad(X, y, w, b)
        return np.concatenate([gw, [gb]])

    l1 = np.full(d + 1, lam)
    l1[d] = 0.0  # bias unpenalized
    x0 = np.zeros(d + 1)
    sol, history = proximal_gradient(f, grad, x0, l1, max_iter=max_iter, tol=tol)
    w, b = unpack(sol)
    return LogRegModel(
        weights=w, bias=b, lam=lam, vocab=vocab, objective_history=history
    )
