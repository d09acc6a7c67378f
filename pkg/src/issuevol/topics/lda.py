"""Latent Dirichlet allocation fitted by collapsed Gibbs sampling.

The model keeps only count matrices.  Point estimates come from the final
sweep; averaging over post-burn-in sweeps would mix samples whose topic
labels may have switched, so ``burn_in`` is recorded but does not change the
estimate.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import ModelError, ParameterError
from ..ingest import Document
from ..measures import Distribution
from ._gibbs import gibbs_sweep
from .text import Vocabulary, tokenize_corpus

log = logging.getLogger(__name__)

DEFAULT_K = 50
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 1000
DEFAULT_BURN_IN = 800
DEFAULT_INFER_ITERATIONS = 200

SweepCallback = Callable[[int, np.ndarray, np.ndarray, np.ndarray], None]


def default_alpha(k: int) -> float:
    return 50.0 / k


def topic_ids(k: int) -> tuple[str, ...]:
    width = max(2, len(str(k - 1)))
    return tuple(f"topic_{t:0{width}d}" for t in range(k))


@dataclass(frozen=True, eq=False)
class TopicModel:
    """Fitted LDA state.

    ``topic_word_counts`` is ``k x |V|``, ``doc_topic_counts`` is ``D x k``
    and ``topic_totals`` holds the row sums of ``topic_word_counts``.  Rows
    of ``doc_topic_counts`` follow ``doc_ids``.
    """

    k: int
    alpha: float
    beta: float
    topic_word_counts: np.ndarray
    doc_topic_counts: np.ndarray
    topic_totals: np.ndarray
    seed: int
    iterations_run: int
    burn_in: int
    vocabulary: Vocabulary
    doc_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        for name in ("topic_word_counts", "doc_topic_counts", "topic_totals"):
            arr = np.array(getattr(self, name), dtype=np.int64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "doc_ids", tuple(self.doc_ids))
        self.check_counts()

    def check_counts(self) -> None:
        """Raise :class:`ModelError` unless shapes and count identities hold."""
        k, n_terms = self.k, len(self.vocabulary)
        if self.topic_word_counts.shape != (k, n_terms):
            raise ModelError(f"topic-word counts have shape {self.topic_word_counts.shape}, expected {(k, n_terms)}")
        if self.doc_topic_counts.shape != (len(self.doc_ids), k):
            raise ModelError(f"doc-topic counts have shape {self.doc_topic_counts.shape}, expected {(len(self.doc_ids), k)}")
        if self.topic_totals.shape != (k,):
            raise ModelError("topic totals must have length k")
        if (self.topic_word_counts < 0).any() or (self.doc_topic_counts < 0).any():
            raise ModelError("negative counts in model")
        if not np.array_equal(self.topic_totals, self.topic_word_counts.sum(axis=1)):
            raise ModelError("topic totals disagree with topic-word counts")
        if self.topic_word_counts.sum() != self.doc_topic_counts.sum():
            raise ModelError("topic-word and doc-topic counts hold different token totals")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TopicModel):
            return NotImplemented
        return (
            (self.k, self.alpha, self.beta, self.seed, self.iterations_run, self.burn_in)
            == (other.k, other.alpha, other.beta, other.seed, other.iterations_run, other.burn_in)
            and self.vocabulary == other.vocabulary
            and self.doc_ids == other.doc_ids
            and np.array_equal(self.topic_word_counts, other.topic_word_counts)
            and np.array_equal(self.doc_topic_counts, other.doc_topic_counts)
            and np.array_equal(self.topic_totals, other.topic_totals)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def topic_ids(self) -> tuple[str, ...]:
        return topic_ids(self.k)

    @property
    def doc_lengths(self) -> np.ndarray:
        return self.doc_topic_counts.sum(axis=1)

    def topic_word_distribution(self) -> np.ndarray:
        """Posterior mean topic-word probabilities, one row per topic."""
        n_terms = len(self.vocabulary)
        return (self.topic_word_counts + self.beta) / (
            self.topic_totals[:, None] + n_terms * self.beta
        )

    def doc_topic_matrix(self) -> np.ndarray:
        """Posterior mean document-topic weights, one row per document."""
        return (self.doc_topic_counts + self.alpha) / (
            self.doc_lengths[:, None] + self.k * self.alpha
        )

    def top_terms(self, topic: int, n: int = 10) -> list[str]:
        counts = self.topic_word_counts[topic]
        order = sorted(range(len(counts)), key=lambda j: (-counts[j], j))
        return [self.vocabulary.terms[j] for j in order[:n]]


@dataclass(frozen=True)
class DocTopicDistribution:
    doc_id: str
    weights: Distribution
    fallback: bool = False  # True when the document had no usable tokens


def _check_params(k: int, alpha: float, beta: float, iterations: int, burn_in: int, seed: int) -> None:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 2:
        raise ParameterError(f"k must be an integer >= 2, got {k!r}")
    if not (alpha > 0 and beta > 0 and np.isfinite(alpha) and np.isfinite(beta)):
        raise ParameterError(f"alpha and beta must be positive, got {alpha!r}, {beta!r}")
    if not 0 <= burn_in < iterations:
        raise ParameterError(f"need iterations > burn_in >= 0, got {iterations}, {burn_in}")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ParameterError(f"seed must be a nonnegative integer, got {seed!r}")


def _doc_ids(corpus: Sequence) -> tuple[str, ...]:
    return tuple(
        doc.doc_id if isinstance(doc, Document) else str(i) for i, doc in enumerate(corpus)
    )


def fit(
    corpus: Sequence[Document | Sequence[str]],
    vocab: Vocabulary,
    k: int = DEFAULT_K,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    on_sweep: SweepCallback | None = None,
) -> TopicModel:
    """Fit LDA to *corpus* by collapsed Gibbs sampling.

    Tokens outside *vocab* are ignored.  Each sweep resamples every token
    from

        (n_dt + alpha) * (n_tw + beta) / (n_t + |V| * beta)

    with the token's own assignment removed from the counts.  The result is
    a deterministic function of the arguments.  *on_sweep*, if given, is
    called after every sweep with ``(sweep, topic_word, doc_topic, totals)``;
    the arrays are live and must not be modified.

    ``alpha`` defaults to ``50 / k``.
    """
    _check_params(k, 1.0 if alpha is None else alpha, beta, iterations, burn_in, seed)
    alpha = default_alpha(k) if alpha is None else float(alpha)
    encoded = [vocab.encode(tokens) for tokens in tokenize_corpus(corpus)]
    n_tokens = sum(len(e) for e in encoded)
    if n_tokens == 0:
        raise ModelError("corpus has no in-vocabulary tokens")

    words = np.concatenate(encoded)
    docs = np.repeat(np.arange(len(encoded), dtype=np.int64), [len(e) for e in encoded])
    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=n_tokens, dtype=np.int64)
    topic_word = np.zeros((k, len(vocab)), dtype=np.int64)
    doc_topic = np.zeros((len(encoded), k), dtype=np.int64)
    np.add.at(topic_word, (z, words), 1)
    np.add.at(doc_topic, (docs, z), 1)
    totals = topic_word.sum(axis=1)

    for sweep in range(1, iterations + 1):
        uniforms = rng.random(n_tokens)
        gibbs_sweep(words, docs, z, topic_word, doc_topic, totals, alpha, float(beta), uniforms, False)
        if on_sweep is not None:
            on_sweep(sweep, topic_word, doc_topic, totals)

    log.debug("fitted k=%d on %d tokens, %d documents", k, n_tokens, len(encoded))
    return TopicModel(
        k=int(k),
        alpha=alpha,
        beta=float(beta),
        topic_word_counts=topic_word,
        doc_topic_counts=doc_topic,
        topic_totals=totals,
        seed=int(seed),
        iterations_run=iterations,
        burn_in=burn_in,
        vocabulary=vocab,
        doc_ids=_doc_ids(corpus),
    )


def _weights(counts: np.ndarray, alpha: float, topics: tuple[str, ...]) -> Distribution:
    k = len(topics)
    w = (counts + alpha) / (counts.sum() + k * alpha)
    return Distribution(zip(topics, w.tolist()), lenient=True)


def doc_topic_distribution(model: TopicModel, doc_index: int) -> DocTopicDistribution:
    """Topic weights ``(n_dt + alpha) / (n_d + k * alpha)`` of a training document."""
    n_docs = len(model.doc_ids)
    if not -n_docs <= doc_index < n_docs:
        raise IndexError(f"document index {doc_index} out of range for {n_docs} documents")
    return DocTopicDistribution(
        model.doc_ids[doc_index],
        _weights(model.doc_topic_counts[doc_index], model.alpha, model.topic_ids),
    )


def _infer(model: TopicModel, words: np.ndarray, frozen: tuple[np.ndarray, np.ndarray],
           iterations: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.integers(0, model.k, size=words.size, dtype=np.int64)
    doc_topic = np.zeros((1, model.k), dtype=np.int64)
    np.add.at(doc_topic, (np.zeros_like(z), z), 1)
    docs = np.zeros(words.size, dtype=np.int64)
    topic_word, totals = frozen
    for _ in range(iterations):
        gibbs_sweep(words, docs, z, topic_word, doc_topic, totals,
                    model.alpha, model.beta, rng.random(words.size), True)
    return doc_topic[0]


def _frozen_counts(model: TopicModel) -> tuple[np.ndarray, np.ndarray]:
    # The kernel never writes frozen counts, but it cannot be handed the
    # model's read-only arrays.
    return model.topic_word_counts.copy(), model.topic_totals.copy()


def _check_infer_args(model: TopicModel, vocab: Vocabulary, iterations: int) -> None:
    if vocab.terms != model.vocabulary.terms:
        raise ModelError("vocabulary does not match the one the model was fitted with")
    if isinstance(iterations, bool) or not isinstance(iterations, (int, np.integer)) or iterations < 1:
        raise ParameterError(f"iterations must be a positive integer, got {iterations!r}")


def _infer_one(model, vocab, doc, iterations, rng, frozen) -> DocTopicDistribution:
    doc_id = doc.doc_id if isinstance(doc, Document) else ""
    words = vocab.encode(tokenize_corpus([doc])[0])
    topics = model.topic_ids
    if words.size == 0:
        log.warning("document %r has no in-vocabulary tokens; using uniform weights", doc_id)
        return DocTopicDistribution(doc_id, Distribution.uniform(topics), fallback=True)
    counts = _infer(model, words, frozen, iterations, rng)
    return DocTopicDistribution(doc_id, _weights(counts, model.alpha, topics))


def infer_held_out(
    model: TopicModel,
    vocab: Vocabulary,
    doc: Document | Sequence[str],
    iterations: int = DEFAULT_INFER_ITERATIONS,
    seed: int | Sequence[int] = 0,
) -> DocTopicDistribution:
    """Topic weights for a document outside the training set.

    Gibbs-samples the new document's assignments against the frozen
    topic-word counts of *model*.  A document without in-vocabulary tokens
    gets the uniform distribution and ``fallback=True``.
    """
    _check_infer_args(model, vocab, iterations)
    return _infer_one(model, vocab, doc, iterations, np.random.default_rng(seed),
                      _frozen_counts(model))


def infer_corpus(
    model: TopicModel,
    corpus: Sequence[Document | Sequence[str]],
    iterations: int = DEFAULT_INFER_ITERATIONS,
    seed: int = 0,
) -> list[DocTopicDistribution]:
    """:func:`infer_held_out` over many documents.

    Document ``i`` is sampled with seed ``(seed, i)``, so each result depends
    only on its own position and not on how the batch is processed.
    """
    vocab = model.vocabulary
    _check_infer_args(model, vocab, iterations)
    frozen = _frozen_counts(model)
    return [
        _infer_one(model, vocab, doc, iterations, np.random.default_rng([seed, i]), frozen)
        for i, doc in enumerate(corpus)
    ]
