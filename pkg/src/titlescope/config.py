"""Run configuration: one TOML file wiring corpus, scorer, loop and outputs.

Referenced files must exist at load time, and the seeds plus a stable hash
of the whole config travel into every output manifest. A few operational
settings can be overridden through the environment:

    TITLESCOPE_LISTEN        service listen address
    TITLESCOPE_DATA_DIR      corpus store directory
    TITLESCOPE_SCORER_KIND   logreg | gbt | external
    TITLESCOPE_EXTERNAL_URL  external scorer base URL
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .shapley import ANALYSIS_PERIODS
from .trends import config_hash

__all__ = ["RunConfig", "load_config"]


@dataclass
class RunConfig:
    data_dir: Path = Path("corpus")
    output_dir: Path = Path("out")
    scorer_kind: str = "logreg"
    external_url: str | None = None
    external_timeout: float = 60.0
    lam: float = 1e-3
    min_df: float = 0.005
    gbt_estimators: int = 200
    gbt_depth: int = 3
    gbt_learning_rate: float = 0.1
    seed: int = 0
    batch_size: int = 500
    top_fraction: float = 0.9
    candidate_sample_size: int = 2000
    rank_cap: int | None = None
    seed_labels: int = 200
    listen: str = "127.0.0.1:8765"
    tokens: dict[str, str] = field(
        default_factory=lambda: {
            "token-a": "annotator-a",
            "token-b": "annotator-b",
            "token-c": "annotator-c",
        }
    )
    periods: dict[str, tuple[int, int]] = field(
        default_factory=lambda: dict(ANALYSIS_PERIODS)
    )
    topic_lexicon_paths: list[Path] = field(default_factory=list)
    category_lexicon_path: Path | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def hash(self) -> str:
        return config_hash(self.raw or self._canonical())

    def _canonical(self) -> dict:
        return {
            "data_dir": str(self.data_dir),
            "scorer_kind": self.scorer_kind,
            "lam": self.lam,
            "min_df": self.min_df,
            "seed": self.seed,
            "batch_size": self.batch_size,
            "top_fraction": self.top_fraction,
        }


def load_config(path: str | Path | None = None, workdir: str | Path = ".") -> RunConfig:
    """Load a TOML run config, apply env overrides, check referenced files."""
    workdir = Path(workdir)
    cfg = RunConfig()
    raw: dict = {}
    if path is not None:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
        corpus = raw.get("corpus", {})
        if "data_dir" in corpus:
            cfg.data_dir = Path(corpus["data_dir"])
        scorer = raw.get("scorer", {})
        cfg.scorer_kind = scorer.get("kind", cfg.scorer_kind)
        cfg.external_url = scorer.get("external_url", cfg.external_url)
        cfg.external_timeout = float(scorer.get("timeout", cfg.external_timeout))
        cfg.lam = float(scorer.get("lam", cfg.lam))
        cfg.min_df = float(scorer.get("min_df", cfg.min_df))
        cfg.gbt_estimators = int(scorer.get("n_estimators", cfg.gbt_estimators))
        cfg.gbt_depth = int(scorer.get("depth", cfg.gbt_depth))
        cfg.gbt_learning_rate = float(
            scorer.get("learning_rate", cfg.gbt_learning_rate)
        )
        active = raw.get("active", {})
        cfg.seed = int(active.get("seed", cfg.seed))
        cfg.batch_size = int(active.get("batch_size", cfg.batch_size))
        cfg.top_fraction = float(active.get("top_fraction", cfg.top_fraction))
        cfg.candidate_sample_size = int(
            active.get("candidate_sample_size", cfg.candidate_sample_size)
        )
        if "rank_cap" in active:
            cfg.rank_cap = int(active["rank_cap"])
        cfg.seed_labels = int(active.get("seed_labels", cfg.seed_labels))
        service = raw.get("service", {})
        cfg.listen = service.get("listen", cfg.listen)
        if "tokens" in service:
            cfg.tokens = dict(service["tokens"])
        analysis = raw.get("analysis", {})
        if "output_dir" in analysis:
            cfg.output_dir = Path(analysis["output_dir"])
        if "periods" in analysis:
            cfg.periods = {
                name: (int(span[0]), int(span[1]))
                for name, span in analysis["periods"].items()
            }
        cfg.topic_lexicon_paths = [
            Path(p) for p in analysis.get("topic_lexicons", [])
        ]
        if "category_lexicon" in analysis:
            cfg.category_lexicon_path = Path(analysis["category_lexicon"])
        cfg.raw = raw

    cfg.listen = os.environ.get("TITLESCOPE_LISTEN", cfg.listen)
    if "TITLESCOPE_DATA_DIR" in os.environ:
        cfg.data_dir = Path(os.environ["TITLESCOPE_DATA_DIR"])
    cfg.scorer_kind = os.environ.get("TITLESCOPE_SCORER_KIND", cfg.scorer_kind)
    cfg.external_url = os.environ.get("TITLESCOPE_EXTERNAL_URL", cfg.external_url)

    cfg.data_dir = workdir / cfg.data_dir
    cfg.output_dir = workdir / cfg.output_dir
    cfg.topic_lexicon_paths = [workdir / p for p in cfg.topic_lexicon_paths]
    if cfg.category_lexicon_path is not None:
        cfg.category_lexicon_path = workdir / cfg.category_lexicon_path

    for p in [*cfg.topic_lexicon_paths, cfg.category_lexicon_path]:
        if p is not None and not Path(p).exists():
            raise FileNotFoundError(f"configured lexicon file missing: {p}")
    if cfg.scorer_kind not in ("logreg", "gbt", "external"):
        raise ValueError(f"unknown scorer kind {cfg.scorer_kind!r}")
    if cfg.scorer_kind == "external" and not cfg.external_url:
        raise ValueError("scorer kind 'external' requires external_url")
    return cfg
