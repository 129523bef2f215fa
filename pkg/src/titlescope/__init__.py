"""titlescope: human-in-the-loop hyperpartisan title detection and
partisanship dynamics analysis."""

from .active import ActiveLoop, BatchSpec, compose_batch, rank_pool, resolve_consensus
from .boosting import GbtModel, train_gbt
from .corpus import (
    BIAS_GROUPS,
    ConsensusLabel,
    CorpusPartition,
    CorpusStore,
    IngestReport,
    LabelRecord,
    TitleRecord,
)
from .evaluation import Metrics, cohens_kappa, evaluate, f1_from_pr, kfold_cv
from .features import (
    CooccurrenceMatrix,
    FeatureVector,
    Vocabulary,
    build_cooccurrence,
    build_vocab,
    cooc_mean_vector,
    vectorize_binary,
    vectorize_tfidf,
)
from .fixture import FixtureSpec, generate_fixture, write_fixture
from .lexicon import (
    CategoryLexicon,
    LinguisticProfile,
    demo_lexicon,
    load_dic,
    moving_average,
    pairwise_distance,
    profile,
    standardize,
)
from .linear import LogRegModel, proximal_gradient, soft_threshold, train_l1_logreg
from .scoring import (
    ExternalScorerClient,
    GbtTitleScorer,
    LogRegTitleScorer,
    ScorerHandle,
    ScoringError,
)
from .shapley import AttributionReport, aggregate_folds, linear_shap, top_terms_per_fold
from .textprep import Normalizer, PrepConfig, normalize
from .topics import TopicLexicon, assign_topics, default_lexicons, log_freq_ratio
from .trends import monthly_proportion, relative_change

__version__ = "0.1.0"
