"""Aggregate document topic weights into an attention series over topics."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Sequence

import numpy as np

from ..agenda import AttentionSeries, Bucket, IssueCatalog, IssueInfo, Period
from ..errors import ModelError
from ..ingest import Document
from ..measures import Distribution
from .lda import DocTopicDistribution, TopicModel

LABEL_TERMS = 5


def topic_catalog(model: TopicModel, first_seen, last_seen) -> IssueCatalog:
    """Catalog of topics labelled by their most frequent terms."""
    return IssueCatalog(tuple(
        IssueInfo(tid, " ".join(model.top_terms(t, LABEL_TERMS)), first_seen, last_seen)
        for t, tid in enumerate(model.topic_ids)
    ))


def distributions_to_series(
    model: TopicModel,
    corpus: Sequence[Document],
    weights: Sequence[DocTopicDistribution] | np.ndarray,
    period: Period | str,
) -> AttentionSeries:
    """Unweighted per-bucket mean of document topic weights.

    Each document counts once regardless of its length.  Buckets without
    documents are omitted.
    """
    period = Period(period)
    if not corpus:
        raise ModelError("corpus is empty")
    if not isinstance(weights, np.ndarray):
        weights = np.array([w.weights.shares for w in weights])
    if weights.shape != (len(corpus), model.k):
        raise ModelError(f"expected {len(corpus)} x {model.k} topic weights, got {weights.shape}")
    rows = defaultdict(list)
    for i, doc in enumerate(corpus):
        rows[period.start_of(doc.timestamp)].append(i)
    topics = model.topic_ids
    buckets = []
    for start in sorted(rows):
        mean = weights[rows[start]].mean(axis=0)
        buckets.append(Bucket(start, Distribution(zip(topics, mean.tolist()), lenient=True), len(rows[start])))
    stamps = [doc.timestamp for doc in corpus]
    catalog = topic_catalog(model, min(stamps), max(stamps))
    return AttentionSeries(tuple(buckets), period, catalog)


def corpus_to_series(
    model: TopicModel, corpus: Sequence[Document], period: Period | str = Period.MONTHLY
) -> AttentionSeries:
    """Attention series over topics for the corpus the model was fitted on."""
    ids = tuple(doc.doc_id for doc in corpus)
    if ids != model.doc_ids:
        raise ModelError(
            "corpus does not match the documents the model was fitted on; "
            "use infer_corpus for other documents"
        )
    return distributions_to_series(model, corpus, model.doc_topic_matrix(), period)
