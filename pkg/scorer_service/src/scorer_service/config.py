"""Adapter configuration.

Defaults follow the reference fine-tuning recipe (15 epochs, batch 32
train / 200 eval, Adam with beta1 0.9, beta2 0.999, eps 1e-8, learning
rate 2e-5, titles truncated at 64 tokens). The whole config is serialized
into the model card of every checkpoint.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class AdapterConfig:
    base_model: str = "builtin-tiny"  # or any local HuggingFace model path
    epochs: int = 15
    train_batch: int = 32
    eval_batch: int = 200
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    learning_rate: float = 2e-5
    max_seq_len: int = 64
    seed: int = 0

    def __post_init__(self):
        for name in ("epochs", "train_batch", "eval_batch", "max_seq_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("beta1", "beta2", "eps", "learning_rate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "AdapterConfig":
        return cls(**{k: obj[k] for k in cls.__dataclass_fields__ if k in obj})
