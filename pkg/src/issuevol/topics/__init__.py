"""Topic modeling: turn a document corpus into an attention series over topics."""

from .lda import (
    DEFAULT_BETA,
    DEFAULT_BURN_IN,
    DEFAULT_ITERATIONS,
    DEFAULT_K,
    DocTopicDistribution,
    TopicModel,
    default_alpha,
    doc_topic_distribution,
    fit,
    infer_corpus,
    infer_held_out,
)
from .series import corpus_to_series, distributions_to_series
from .store import load_model, save_model
from .text import Vocabulary, build_vocabulary, load_stopwords, tokenize

__all__ = [
    "DEFAULT_BETA",
    "DEFAULT_BURN_IN",
    "DEFAULT_ITERATIONS",
    "DEFAULT_K",
    "DocTopicDistribution",
    "TopicModel",
    "Vocabulary",
    "build_vocabulary",
    "corpus_to_series",
    "default_alpha",
    "distributions_to_series",
    "doc_topic_distribution",
    "fit",
    "infer_corpus",
    "infer_held_out",
    "load_model",
    "load_stopwords",
    "save_model",
    "tokenize",
]
