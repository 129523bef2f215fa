import numpy as np
import pytest

from titlescope.evaluation import kfold_cv
from titlescope.features import binary_matrix, build_vocab
from titlescope.fixture import FixtureSpec, generate_fixture
from titlescope.linear import train_l1_logreg
from titlescope.textprep import default_normalizer


@pytest.fixture(scope="session")
def fixture_data():
    """The 5,000-title planted-signal corpus used across the suite."""
    return generate_fixture(FixtureSpec())


@pytest.fixture(scope="session")
def normalizer():
    return default_normalizer()


@pytest.fixture(scope="session")
def fixture_docs(fixture_data, normalizer):
    return [normalizer.normalize(r.text) for r in fixture_data.records]


@pytest.fixture(scope="session")
def fixture_vocab(fixture_docs):
    return build_vocab(fixture_docs, 0.005)


@pytest.fixture(scope="session")
def fixture_xy(fixture_data, fixture_docs, fixture_vocab):
    X = binary_matrix(fixture_docs, fixture_vocab)
    y = np.array([fixture_data.labels[r.id] for r in fixture_data.records])
    return X, y


@pytest.fixture(scope="session")
def fixture_folds(fixture_xy, fixture_vocab):
    X, y = fixture_xy
    return kfold_cv(
        X,
        y,
        trainer=lambda Xt, yt: train_l1_logreg(Xt, yt, lam=1e-3, vocab=fixture_vocab),
        k=5,
        seed=0,
    )
