"""Volatility measures for issue-attention time series.

Entropy-based effective number of issues, KL-divergence novelty, inverse
Simpson and Pedersen indices, computed from opinion-poll shares or from
document corpora through a built-in LDA topic model.
"""

__version__ = "0.1.0"

from .agenda import (
    AttentionRecord,
    AttentionSeries,
    Bucket,
    IssueCatalog,
    IssueInfo,
    Period,
    align_supports,
    bucketize,
    compute_measures,
    filter_issues,
    truncate_top_k,
)
from .errors import IssueVolError
from .ingest import Document, IngestReport, parse_corpus_jsonl, parse_poll_csv
from .measures import (
    Distribution,
    MeasureRecord,
    effective_number,
    entropy,
    inverse_simpson,
    kl_divergence,
    pedersen,
    smooth,
)

__all__ = [
    "AttentionRecord",
    "AttentionSeries",
    "Bucket",
    "Distribution",
    "Document",
    "IngestReport",
    "IssueCatalog",
    "IssueInfo",
    "IssueVolError",
    "MeasureRecord",
    "Period",
    "align_supports",
    "bucketize",
    "compute_measures",
    "effective_number",
    "entropy",
    "filter_issues",
    "inverse_simpson",
    "kl_divergence",
    "parse_corpus_jsonl",
    "parse_poll_csv",
    "pedersen",
    "smooth",
    "truncate_top_k",
]
