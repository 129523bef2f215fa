"""Fine-tunable transformer title classifiers.

Two backends share one interface:

- ``builtin-tiny``: a small self-contained transformer encoder (hashed
  word-piece-free tokenizer, learned positions, mean pooling). Trains from
  scratch on CPU in seconds and needs no downloads, which keeps the
  service usable in offline environments.
- any other ``base_model``: loaded through HuggingFace ``transformers``
  (requires the optional ``hf`` extra and a locally available model) and
  fine-tuned with a binary classification head.

Training always follows the configured recipe: Adam(beta1, beta2, eps) at
the configured learning rate for the configured epochs and batch sizes.
Titles are truncated at ``max_seq_len`` tokens.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .config import AdapterConfig

__all__ = ["TitleClassifier", "load_checkpoint"]

_TOKEN_RE = re.compile(r"[a-z0-9]+")

_VOCAB_BUCKETS = 4096
_PAD = 0  # bucket 0 reserved for padding


def _tokenize(text: str, max_len: int) -> list[int]:
    ids = []
    for tok in _TOKEN_RE.findall(text.lower())[:max_len]:
        digest = hashlib.blake2s(tok.encode("utf-8"), digest_size=4).digest()
        ids.append(1 + int.from_bytes(digest, "big") % (_VOCAB_BUCKETS - 1))
    return ids


class TinyEncoder(nn.Module):
    """Two-layer transformer encoder over hashed token buckets."""

    def __init__(self, max_seq_len: int, dim: int = 64, heads: int = 4, layers: int = 2):
        super().__init__()
        self.embed = nn.Embedding(_VOCAB_BUCKETS, dim, padding_idx=_PAD)
        self.pos = nn.Embedding(max_seq_len, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim, nhead=heads, dim_feedforward=4 * dim,
            batch_first=True, dropout=0.1,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers)
        self.head = nn.Linear(dim, 1)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        mask = ids == _PAD
        positions = torch.arange(ids.shape[1], device=ids.device)
        x = self.embed(ids) + self.pos(positions)[None, :, :]
        x = self.encoder(x, src_key_padding_mask=mask)
        keep = (~mask).unsqueeze(-1).float()
        pooled = (x * keep).sum(dim=1) / keep.sum(dim=1).clamp(min=1.0)
        return self.head(pooled).squeeze(-1)


def _pad_batch(token_ids: list[list[int]], max_len: int) -> torch.Tensor:
    width = max(1, min(max_len, max((len(t) for t in token_ids), default=1)))
    out = torch.full((len(token_ids), width), _PAD, dtype=torch.long)
    for i, ids in enumerate(token_ids):
        ids = ids[:width]
        out[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
    return out


class TitleClassifier:
    """Train/score facade over the configured encoder backend."""

    def __init__(self, config: AdapterConfig | None = None):
        self.config = config or AdapterConfig()
        self.trained_examples = 0
        self._hf = None
        if self.config.base_model == "builtin-tiny":
            torch.manual_seed(self.config.seed)
            self.model = TinyEncoder(self.config.max_seq_len)
        else:
            self._hf = _load_hf(self.config)
            self.model = self._hf.model

    # -- training ------------------------------------------------------

    def train(self, texts: list[str], labels: list[int]) -> dict:
        if len(texts) != len(labels):
            raise ValueError("texts and labels must have equal length")
        if not texts:
            raise ValueError("no training examples")
        if self._hf is not None:
            return self._hf.train(texts, labels)
        cfg = self.config
        torch.manual_seed(cfg.seed)
        device = torch.device("cpu")
        model = self.model.to(device)
        model.train()
        optim = torch.optim.Adam(
            model.parameters(),
            lr=cfg.learning_rate,
            betas=(cfg.beta1, cfg.beta2),
            eps=cfg.eps,
        )
        loss_fn = nn.BCEWithLogitsLoss()
        ids = [_tokenize(t, cfg.max_seq_len) for t in texts]
        y = torch.tensor(labels, dtype=torch.float32)
        n = len(texts)
        rng = np.random.default_rng(cfg.seed)
        last_loss = float("nan")
        for _ in range(cfg.epochs):
            order = rng.permutation(n)
            for start in range(0, n, cfg.train_batch):
                batch = order[start : start + cfg.train_batch]
                logits = model(_pad_batch([ids[i] for i in batch], cfg.max_seq_len))
                loss = loss_fn(logits, y[batch])
                optim.zero_grad()
                loss.backward()
                optim.step()
                last_loss = float(loss.item())
        model.eval()
        self.trained_examples = n
        return {"examples": n, "epochs": cfg.epochs, "final_batch_loss": last_loss}

    # -- inference -----------------------------------------------------

    @torch.no_grad()
    def score(self, texts: list[str]) -> np.ndarray:
        if self._hf is not None:
            return self._hf.score(texts)
        cfg = self.config
        self.model.eval()
        probs = []
        for start in range(0, len(texts), cfg.eval_batch):
            chunk = texts[start : start + cfg.eval_batch]
            ids = [_tokenize(t, cfg.max_seq_len) for t in chunk]
            logits = self.model(_pad_batch(ids, cfg.max_seq_len))
            probs.append(torch.sigmoid(logits).numpy())
        return np.concatenate(probs) if probs else np.empty(0)

    # -- checkpoints -----------------------------------------------------

    def model_card(self) -> dict:
        return {
            "backend": "hf" if self._hf is not None else "builtin-tiny",
            "config": self.config.as_dict(),
            "trained_examples": self.trained_examples,
        }

    def save(self, ckpt_dir: str | Path) -> None:
        """Checkpoint layout: <dir>/model.pt + <dir>/model_card.json."""
        ckpt_dir = Path(ckpt_dir)
        ckpt_dir.mkdir(parents=True, exist_ok=True)
        torch.save(self.model.state_dict(), ckpt_dir / "model.pt")
        (ckpt_dir / "model_card.json").write_text(
            json.dumps(self.model_card(), indent=2) + "\n", encoding="utf-8"
        )


def load_checkpoint(ckpt_dir: str | Path) -> TitleClassifier:
    ckpt_dir = Path(ckpt_dir)
    card = json.loads((ckpt_dir / "model_card.json").read_text(encoding="utf-8"))
    clf = TitleClassifier(AdapterConfig.from_dict(card["config"]))
    clf.model.load_state_dict(torch.load(ckpt_dir / "model.pt", weights_only=True))
    clf.model.eval()
    clf.trained_examples = int(card.get("trained_examples", 0))
    return clf


class _HfBackend:
    """Thin wrapper over a HuggingFace sequence classifier."""

    def __init__(self, config: AdapterConfig):
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.config = config
        self.tokenizer = AutoTokenizer.from_pretrained(config.base_model)
        self.model = AutoModelForSequenceClassification.from_pretrained(
            config.base_model, num_labels=2
        )

    def _batch(self, texts: list[str]):
        return self.tokenizer(
            texts,
            truncation=True,
            max_length=self.config.max_seq_len,
            padding=True,
            return_tensors="pt",
        )

    def train(self, texts: list[str], labels: list[int]) -> dict:
        cfg = self.config
        torch.manual_seed(cfg.seed)
        self.model.train()
        optim = torch.optim.Adam(
            self.model.parameters(),
            lr=cfg.learning_rate,
            betas=(cfg.beta1, cfg.beta2),
            eps=cfg.eps,
        )
        y = torch.tensor(labels, dtype=torch.long)
        rng = np.random.default_rng(cfg.seed)
        last_loss = float("nan")
        for _ in range(cfg.epochs):
            order = rng.permutation(len(texts))
            for start in range(0, len(texts), cfg.train_batch):
                idx = order[start : start + cfg.train_batch]
                enc = self._batch([texts[i] for i in idx])
                out = self.model(**enc, labels=y[idx])
                optim.zero_grad()
                out.loss.backward()
                optim.step()
                last_loss = float(out.loss.item())
        self.model.eval()
        return {"examples": len(texts), "epochs": cfg.epochs, "final_batch_loss": last_loss}

    @torch.no_grad()
    def score(self, texts: list[str]) -> np.ndarray:
        self.model.eval()
        probs = []
        for start in range(0, len(texts), self.config.eval_batch):
            enc = self._batch(texts[start : start + self.config.eval_batch])
            logits = self.model(**enc).logits
            probs.append(torch.softmax(logits, dim=-1)[:, 1].numpy())
        return np.concatenate(probs) if probs else np.empty(0)


def _load_hf(config: AdapterConfig) -> _HfBackend:
    try:
        return _HfBackend(config)
    except ImportError as exc:
        raise RuntimeError(
            "transformers is not installed; install scorer-service[hf] or use "
            "base_model='builtin-tiny'"
        ) from exc
