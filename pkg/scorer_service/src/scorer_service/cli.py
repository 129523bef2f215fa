"""Serve the transformer scorer."""

from __future__ import annotations

from pathlib import Path

import click

from .config import AdapterConfig
from .model import load_checkpoint
from .server import create_app


@click.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8900)
@click.option("--base-model", default="builtin-tiny")
@click.option("--epochs", type=int, default=15)
@click.option("--train-batch", type=int, default=32)
@click.option("--eval-batch", type=int, default=200)
@click.option("--learning-rate", type=float, default=2e-5)
@click.option("--max-seq-len", type=int, default=64)
@click.option("--seed", type=int, default=0)
@click.option(
    "--checkpoint-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("checkpoints"),
    help="Where /train writes <dir>/latest/{model.pt, model_card.json}.",
)
@click.option(
    "--resume",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    default=None,
    help="Load an existing checkpoint directory instead of a fresh model.",
)
def main(host, port, base_model, epochs, train_batch, eval_batch,
         learning_rate, max_seq_len, seed, checkpoint_dir, resume):
    """Run the external-protocol scorer over HTTP."""
    import uvicorn

    classifier = load_checkpoint(resume) if resume else None
    config = AdapterConfig(
        base_model=base_model,
        epochs=epochs,
        train_batch=train_batch,
        eval_batch=eval_batch,
        learning_rate=learning_rate,
        max_seq_len=max_seq_len,
        seed=seed,
    )
    app = create_app(config=config, classifier=classifier, checkpoint_dir=checkpoint_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
