"""Shared conformance checks for the external scorer wire protocol.

Any scorer exposed over HTTP — an internal pipeline wrapped by
``scoring.protocol_app`` or a remote adapter — must pass the same checks:
point an ``ExternalScorerClient`` at it and call ``check_protocol``.
"""

import numpy as np

from .scoring import ExternalScorerClient

__all__ = ["SEPARABLE_TITLES", "check_protocol"]

SEPARABLE_TITLES = [
    (f"slam outrage attack scandal headline {i}", 1) for i in range(20)
] + [(f"calm quiet garden bake recipe note {i}", 0) for i in range(20)]


def check_protocol(client: ExternalScorerClient, train_accuracy_floor: float = 0.9):
    """Drive /health, /train and /score through the client; returns the
    accuracy on the separable 40-title set after training."""
    assert client.health(), "GET /health must return 200"

    texts = [t for t, _ in SEPARABLE_TITLES]
    labels = [l for _, l in SEPARABLE_TITLES]
    client.train(texts, labels)

    probs = client.score(texts[:3])
    assert len(probs) == 3, "/score must return one prob per title"
    assert np.all((probs >= 0.0) & (probs <= 1.0)), "probs must be in [0, 1]"

    all_probs = client.score(texts)
    assert len(all_probs) == len(texts)
    # order preservation: hyper block scores above the calm block on average
    assert all_probs[:20].mean() > all_probs[20:].mean()

    accuracy = float(np.mean((all_probs >= 0.5).astype(int) == np.array(labels)))
    assert accuracy >= train_accuracy_floor, (
        f"accuracy {accuracy} below {train_accuracy_floor} on the separable set"
    )
    return accuracy
