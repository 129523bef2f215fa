"""Command-line entry point wiring all modules into reproducible commands.

Every command exits nonzero with a machine-readable JSON error object on
stderr when something goes wrong; all paths are resolved relative to
--workdir.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import fixture as fixture_mod
from .active import ActiveLoop, BatchSpec
from .analysis import (
    linguistic_distance_analysis,
    predict_corpus,
    term_importance_analysis,
    topic_divergence_analysis,
    trend_analysis,
)
from .config import RunConfig, load_config
from .corpus import ConsensusLabel, CorpusStore
from .evaluation import evaluate
from .lexicon import demo_lexicon, load_dic
from .scoring import (
    ExternalScorerClient,
    ExternalTitleScorer,
    GbtTitleScorer,
    LogRegTitleScorer,
)
from .service import AnnotationController, create_app
from .shapley import save_reports
from .textprep import normalize
from .topics import default_lexicons, load_lexicon_file
from .trends import emit_figure_data


def _fail(exc: BaseException, code: int = 1):
    payload = {"error": str(exc), "type": type(exc).__name__}
    click.echo(json.dumps(payload), err=True)
    sys.exit(code)


def cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as exc:  # noqa: BLE001 - single reporting point
            _fail(exc)

    return wrapper


@click.group()
@click.option(
    "--workdir",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("."),
    help="Base directory for all relative paths.",
)
@click.pass_context
def main(ctx, workdir: Path):
    """Hyperpartisan news title toolkit."""
    ctx.obj = {"workdir": workdir}


def _cfg(ctx, config: Path | None) -> RunConfig:
    return load_config(config, workdir=ctx.obj["workdir"])


def _store(cfg: RunConfig) -> CorpusStore:
    return CorpusStore(cfg.data_dir)


def _nonempty_store(cfg: RunConfig) -> CorpusStore:
    store = _store(cfg)
    if not len(store):
        raise click.ClickException(f"corpus store at {cfg.data_dir} is empty")
    return store


def _scorer(cfg: RunConfig):
    if cfg.scorer_kind == "logreg":
        return LogRegTitleScorer(lam=cfg.lam, min_df=cfg.min_df)
    if cfg.scorer_kind == "gbt":
        return GbtTitleScorer(
            n_estimators=cfg.gbt_estimators,
            depth=cfg.gbt_depth,
            learning_rate=cfg.gbt_learning_rate,
            min_df=cfg.min_df,
        )
    client = ExternalScorerClient(cfg.external_url, timeout=cfg.external_timeout)
    return ExternalTitleScorer(client)


def _trained_scorer(cfg: RunConfig, store: CorpusStore):
    scorer = _scorer(cfg)
    part = store.partition()
    train_ids = sorted(part.labeled_ids)
    if not train_ids:
        raise click.ClickException("store has no labeled titles to train on")
    texts = [store.get(i).text for i in train_ids]
    labels = [1 if store.consensus_for(i).verdict == "H" else 0 for i in train_ids]
    scorer.fit(texts, labels)
    return scorer


def _predictions(cfg: RunConfig, store: CorpusStore, predictions_path: Path | None):
    records = store.query()
    if predictions_path is not None:
        preds = {}
        with open(predictions_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    preds[obj["id"]] = int(obj["label"])
        missing = [r.id for r in records if r.id not in preds]
        if missing:
            raise click.ClickException(
                f"predictions file misses {len(missing)} corpus titles"
            )
        return records, preds, "file:" + str(predictions_path)
    scorer = _trained_scorer(cfg, store)
    return records, predict_corpus(scorer, records), scorer.scorer_id


def _echo(obj) -> None:
    click.echo(json.dumps(obj, indent=2, default=str))


# -- ingest / prep -----------------------------------------------------------


def _load_consensus_file(store: CorpusStore, source: Path) -> list[str]:
    ids = []
    with open(source, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            verdict = obj.get("verdict") or ("H" if int(obj["label"]) else "N")
            store.set_consensus(
                ConsensusLabel(
                    title_id=obj["title_id"],
                    verdict=verdict,
                    iteration=int(obj.get("iteration", 0)),
                )
            )
            ids.append(obj["title_id"])
    return ids


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default="jsonl")
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--votes", is_flag=True, help="Ingest an annotator vote file instead.")
@click.option(
    "--consensus", is_flag=True, help="Ingest resolved labels ({title_id, label})."
)
@click.option(
    "--validation",
    is_flag=True,
    help="Ingest resolved labels and mark those titles as the validation set.",
)
@click.pass_context
@cli_errors
def ingest(
    ctx,
    source: Path,
    fmt: str,
    config: Path | None,
    votes: bool,
    consensus: bool,
    validation: bool,
):
    """Load titles (or label files) into the corpus store."""
    cfg = _cfg(ctx, config)
    store = _store(cfg)
    if votes:
        n = store.ingest_labels(source)
        _echo({"votes_ingested": n})
        return
    if validation:
        ids = _load_consensus_file(store, source)
        store.set_validation_ids(ids)
        _echo({"validation_ingested": len(ids)})
        return
    if consensus:
        ids = _load_consensus_file(store, source)
        _echo({"consensus_ingested": len(ids)})
        return
    report = store.ingest(source, fmt)
    _echo(
        {
            "count": report.count,
            "rejected": report.rejected,
            "errors": [{"line": e.line, "reason": e.reason} for e in report.errors],
        }
    )


@main.command()
@click.argument("text", nargs=-1)
@click.pass_context
@cli_errors
def prep(ctx, text: tuple[str, ...]):
    """Normalize raw title text to tokens (reads stdin without arguments)."""
    inputs = [" ".join(text)] if text else [line.rstrip("\n") for line in sys.stdin]
    for raw in inputs:
        click.echo(json.dumps({"text": raw, "tokens": normalize(raw)}))


# -- train / score / evaluate -------------------------------------------------


@main.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
@cli_errors
def train(ctx, config: Path | None, out: Path | None):
    """Train the configured scorer on the labeled partition."""
    cfg = _cfg(ctx, config)
    store = _store(cfg)
    scorer = _trained_scorer(cfg, store)
    result = {
        "scorer_id": scorer.scorer_id,
        "labeled": len(store.partition().labeled_ids),
        "config_hash": cfg.hash,
        "seed": cfg.seed,
    }
    if out is not None and hasattr(scorer, "save"):
        out = ctx.obj["workdir"] / out
        out.parent.mkdir(parents=True, exist_ok=True)
        scorer.save(out)
        result["artifact"] = str(out)
    _echo(result)


@main.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--model", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--threshold", type=float, default=0.5)
@click.pass_context
@cli_errors
def score(ctx, config: Path | None, model: Path | None, out: Path, threshold: float):
    """Score every title; writes JSONL rows {id, prob, label}."""
    cfg = _cfg(ctx, config)
    store = _store(cfg)
    if model is not None:
        scorer = LogRegTitleScorer(lam=cfg.lam, min_df=cfg.min_df)
        scorer.load(model)
    else:
        scorer = _trained_scorer(cfg, store)
    records = store.query()
    probs = scorer.score_titles([r.text for r in records])
    out = ctx.obj["workdir"] / out
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for rec, p in zip(records, probs):
            fh.write(
                json.dumps(
                    {"id": rec.id, "prob": float(p), "label": int(p >= threshold)}
                )
                + "\n"
            )
    _echo({"scored": len(records), "out": str(out), "scorer_id": scorer.scorer_id})


@main.command("evaluate")
@click.option("--pred", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--truth", type=click.Path(exists=True, path_type=Path), required=True)
@click.pass_context
@cli_errors
def evaluate_cmd(ctx, pred: Path, truth: Path):
    """Compare a predictions file against a truth file (Hyper positive)."""
    preds = {}
    with open(pred, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                preds[obj["id"]] = int(obj["label"])
    y_pred, y_true = [], []
    with open(truth, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            tid = obj.get("title_id") or obj["id"]
            if tid in preds:
                label = obj.get("label")
                if label is None:
                    label = 1 if obj["verdict"] == "H" else 0
                y_true.append(int(label))
                y_pred.append(preds[tid])
    _echo(evaluate(y_pred, y_true).as_dict())


# -- active loop ---------------------------------------------------------------


def _controller(cfg: RunConfig) -> AnnotationController:
    store = _store(cfg)
    scorer = _scorer(cfg)
    spec = BatchSpec(
        batch_size=cfg.batch_size,
        top_fraction=cfg.top_fraction,
        candidate_sample_size=cfg.candidate_sample_size,
        rank_cap=cfg.rank_cap,
    )
    loop = ActiveLoop(
        store, scorer, spec, seed=cfg.seed, workdir=cfg.output_dir / "active"
    )
    state_file = cfg.output_dir / "active" / "state.json"
    if state_file.exists():
        loop.load_checkpoint()
        if loop.state.scorer_path is None:
            # Retrainable from the store's consensus labels.
            texts_labels = [
                (store.get(i).text, 1 if store.consensus_for(i).verdict == "H" else 0)
                for i in sorted(store.partition().labeled_ids)
            ]
            if texts_labels:
                scorer.fit(*zip(*texts_labels))
    else:
        part = store.partition()
        if not part.labeled_ids:
            raise click.ClickException(
                "no labeled titles: ingest seed consensus labels before starting"
            )
        if not part.validation_ids:
            raise click.ClickException(
                "no validation set: load one with `ingest --validation <file>`"
            )
        loop.bootstrap({})
    return AnnotationController(loop, tuple(sorted(set(cfg.tokens.values()))))


@main.group()
def active():
    """Run the human-guided labeling loop."""


@active.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_context
@cli_errors
def serve(ctx, config: Path | None):
    """Serve the annotation HTTP API."""
    import uvicorn

    cfg = _cfg(ctx, config)
    controller = _controller(cfg)
    app = create_app(controller, cfg.tokens)
    host, _, port = cfg.listen.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8765))


@active.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--force", is_flag=True, help="Close even if annotators are missing.")
@click.pass_context
@cli_errors
def iterate(ctx, config: Path | None, force: bool):
    """Close the open batch: consensus, retrain, next batch."""
    cfg = _cfg(ctx, config)
    controller = _controller(cfg)
    _echo(controller.close_and_retrain(force=force))


@active.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_context
@cli_errors
def status(ctx, config: Path | None):
    """Print the current loop state."""
    cfg = _cfg(ctx, config)
    state_file = cfg.output_dir / "active" / "state.json"
    if not state_file.exists():
        raise click.ClickException("loop has not been started")
    state = json.loads(state_file.read_text(encoding="utf-8"))
    state["batch_ids"] = len(state["batch_ids"])
    state["offered_ids"] = len(state["offered_ids"])
    _echo(state)


# -- analyses --------------------------------------------------------------------


def _topic_lexicons(cfg: RunConfig):
    if cfg.topic_lexicon_paths:
        return [load_lexicon_file(p) for p in cfg.topic_lexicon_paths]
    return default_lexicons()


@main.group()
def analyze():
    """Term, topic and language analyses."""


@analyze.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--predictions", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--period", default=None, help="Restrict to one named period.")
@click.option("--group", default=None, help="Restrict to one bias group.")
@click.pass_context
@cli_errors
def terms(ctx, config, predictions, period, group):
    """Shapley term-importance reports per period and bias group."""
    cfg = _cfg(ctx, config)
    store = _nonempty_store(cfg)
    records, preds, scorer_id = _predictions(cfg, store, predictions)
    periods = cfg.periods
    if period is not None:
        periods = {period: cfg.periods[period]}
    groups = (group,) if group else ("Left", "Central", "Right")
    reports = term_importance_analysis(
        records, preds, periods, groups=groups,
        min_df=cfg.min_df, lam=cfg.lam, seed=cfg.seed,
    )
    save_reports(
        reports,
        cfg.output_dir,
        meta={"scorer_id": scorer_id, "config_hash": cfg.hash, "seed": cfg.seed},
    )
    _echo(
        {
            "reports": len(reports),
            "out": str(cfg.output_dir / "term_importance.json"),
        }
    )


@analyze.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_context
@cli_errors
def topics(ctx, config):
    """Topic-distribution divergence (log frequency ratios + LOO spread)."""
    cfg = _cfg(ctx, config)
    store = _nonempty_store(cfg)
    records = store.query()
    ratios = topic_divergence_analysis(records, _topic_lexicons(cfg), cfg.periods)
    manifest = emit_figure_data(
        cfg.output_dir,
        topic_ratios=ratios,
        config_hash=cfg.hash,
        extra={"seed": cfg.seed},
    )
    _echo({"rows": len(ratios), "files": manifest["files"]})


@analyze.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_context
@cli_errors
def lang(ctx, config):
    """Linguistic distance between media groups per topic and month."""
    cfg = _cfg(ctx, config)
    store = _nonempty_store(cfg)
    records = store.query()
    category = (
        load_dic(cfg.category_lexicon_path)
        if cfg.category_lexicon_path
        else demo_lexicon()
    )
    series = linguistic_distance_analysis(records, _topic_lexicons(cfg), category)
    manifest = emit_figure_data(
        cfg.output_dir,
        distance_series=series,
        config_hash=cfg.hash,
        extra={"seed": cfg.seed},
    )
    _echo({"series": len(series), "files": manifest["files"]})


@main.group()
def report():
    """Aggregated reports."""


@report.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--predictions", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--baseline-year", type=int, default=2014)
@click.pass_context
@cli_errors
def trends(ctx, config, predictions, baseline_year):
    """Monthly hyperpartisan proportions and relative change per group."""
    cfg = _cfg(ctx, config)
    store = _nonempty_store(cfg)
    records, preds, scorer_id = _predictions(cfg, store, predictions)
    proportions, changes = trend_analysis(
        records, preds, scorer_id, baseline_year=baseline_year
    )
    manifest = emit_figure_data(
        cfg.output_dir,
        proportion_series=proportions,
        change_series=changes,
        scorer_id=scorer_id,
        config_hash=cfg.hash,
        extra={"seed": cfg.seed},
    )
    _echo({"groups": [s.bias_group for s in proportions], "files": manifest["files"]})


# -- fixture ------------------------------------------------------------------------


@main.group()
def fixture():
    """Synthetic corpus generation."""


@fixture.command()
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--n", type=int, default=5000)
@click.option("--seed", type=int, default=7)
@click.pass_context
@cli_errors
def generate(ctx, out: Path, n: int, seed: int):
    """Generate the planted-signal synthetic corpus."""
    out = ctx.obj["workdir"] / out
    spec = fixture_mod.FixtureSpec(n_titles=n, seed=seed)
    data = fixture_mod.write_fixture(out, spec)
    _echo(
        {
            "out": str(out),
            "n_titles": len(data.records),
            "planted_overall_rate": data.metadata["planted_overall_rate"],
            "keywords": data.metadata["keywords"],
        }
    )


if __name__ == "__main__":
    main()
