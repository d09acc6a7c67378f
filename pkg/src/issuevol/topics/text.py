"""Tokenization, stopword lists and vocabulary construction."""

from __future__ import annotations

import os
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from itertools import groupby
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import ParameterError, VocabularyError
from ..ingest import Document

STOPWORDS_ENV = "ISSUEVOL_STOPWORDS_DIR"
BUNDLED_STOPWORDS = ("english", "german")

# Runs of letters in any script; digits, underscores and punctuation split.
_WORD_RE = re.compile(r"[^\W\d_]+")


def _alpha_runs(text: str) -> Iterable[str]:
    # The regex admits word characters such as superscript digits that are
    # not letters; those runs are split again on every non-letter.
    for tok in _WORD_RE.findall(text):
        if tok.isalpha():
            yield tok
        else:
            for alpha, chars in groupby(tok, str.isalpha):
                if alpha:
                    yield "".join(chars)


def read_stopword_file(path: str | Path) -> frozenset[str]:
    """One token per line, UTF-8.  Blank lines and ``#`` comments are skipped."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word and not word.startswith("#"):
                words.add(word)
    return frozenset(words)


def load_stopwords(source: str | Path | None = "english") -> frozenset[str]:
    """Load stopwords from a file path or by list name.

    Names are looked up first in the directory named by the
    ``ISSUEVOL_STOPWORDS_DIR`` environment variable (as ``<name>.txt``), then
    among the bundled lists.  Several names can be combined with ``+``, e.g.
    ``"english+german"``.  ``None`` or ``""`` gives an empty set.
    """
    if not source:
        return frozenset()
    path = Path(source)
    if path.is_file():
        return read_stopword_file(path)
    words: set[str] = set()
    for name in str(source).split("+"):
        words |= _named_stopwords(name.strip())
    return frozenset(words)


def _named_stopwords(name: str) -> frozenset[str]:
    env_dir = os.environ.get(STOPWORDS_ENV)
    if env_dir:
        candidate = Path(env_dir) / f"{name}.txt"
        if candidate.is_file():
            return read_stopword_file(candidate)
    if name in BUNDLED_STOPWORDS:
        ref = resources.files(__package__).joinpath("stopwords", f"{name}.txt")
        with resources.as_file(ref) as p:
            return read_stopword_file(p)
    raise ParameterError(f"unknown stopword list or missing file: {name!r}")


def tokenize(doc: Document | str, stopwords: Iterable[str] = ()) -> list[str]:
    """Lowercase, split on non-letters, drop short tokens and stopwords.

    Tokens shorter than three characters are dropped.  Digits never survive
    because they act as separators.
    """
    text = doc.text if isinstance(doc, Document) else doc
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else frozenset(stopwords)
    return [
        tok
        for tok in _alpha_runs(text.lower())
        if len(tok) >= 3 and not tok.isdigit() and tok not in stop
    ]


@dataclass(frozen=True)
class Vocabulary:
    """Sorted term list with per-term document frequencies."""

    terms: tuple[str, ...]
    doc_frequency: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.terms) != len(self.doc_frequency):
            raise VocabularyError("terms and doc_frequency differ in length")
        if any(a >= b for a, b in zip(self.terms, self.terms[1:])):
            raise VocabularyError("vocabulary terms must be sorted and unique")

    @cached_property
    def index(self) -> dict[str, int]:
        return {term: i for i, term in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: object) -> bool:
        return term in self.index

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        """Term ids of in-vocabulary tokens, in order; others are dropped."""
        index = self.index
        return np.array([index[t] for t in tokens if t in index], dtype=np.int64)


def tokenize_corpus(
    corpus: Sequence[Document | Sequence[str]], stopwords: Iterable[str] = ()
) -> list[list[str]]:
    """Tokenize documents; token lists pass through with stopwords removed."""
    stop = frozenset(stopwords)
    out = []
    for doc in corpus:
        if isinstance(doc, (Document, str)):
            out.append(tokenize(doc, stop))
        else:
            out.append([t for t in doc if t not in stop])
    return out


def build_vocabulary(
    corpus: Sequence[Document | Sequence[str]],
    stopwords: Iterable[str] | None = None,
    min_df: int = 5,
    max_df_fraction: float = 0.5,
) -> Vocabulary:
    """Vocabulary of terms with ``min_df <= df <= max_df_fraction * n_docs``.

    *corpus* holds documents or already tokenized documents.  *stopwords*
    defaults to the bundled English list.
    """
    if not corpus:
        raise VocabularyError("cannot build a vocabulary from an empty corpus")
    if isinstance(min_df, bool) or not isinstance(min_df, int) or min_df < 1:
        raise ParameterError(f"min_df must be a positive integer, got {min_df!r}")
    if not 0 < max_df_fraction <= 1:
        raise ParameterError(f"max_df_fraction must be in (0, 1], got {max_df_fraction!r}")
    stop = load_stopwords() if stopwords is None else frozenset(stopwords)

    df: Counter[str] = Counter()
    for tokens in tokenize_corpus(corpus, stop):
        df.update(set(tokens))
    ceiling = max_df_fraction * len(corpus)
    terms = sorted(t for t, n in df.items() if min_df <= n <= ceiling)
    if not terms:
        raise VocabularyError(
            f"no terms left after frequency filtering (min_df={min_df}, "
            f"max_df_fraction={max_df_fraction}, {len(corpus)} documents)"
        )
    return Vocabulary(tuple(terms), tuple(df[t] for t in terms))
