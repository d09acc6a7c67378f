"""Topic model files.

A model file is a single UTF-8 JSON document.  The first keys identify the
format and version; the rest hold hyperparameters, vocabulary, document ids
and both count matrices as nested integer lists.  Output is byte-stable:
identical models always serialize to identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO

import numpy as np

from ..errors import ModelError
from .lda import TopicModel
from .text import Vocabulary

FORMAT_NAME = "issuevol.topic-model"
FORMAT_VERSION = 1


def model_to_dict(model: TopicModel) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "k": model.k,
        "alpha": model.alpha,
        "beta": model.beta,
        "seed": model.seed,
        "iterations_run": model.iterations_run,
        "burn_in": model.burn_in,
        "vocabulary": {
            "terms": list(model.vocabulary.terms),
            "doc_frequency": list(model.vocabulary.doc_frequency),
        },
        "doc_ids": list(model.doc_ids),
        "topic_totals": model.topic_totals.tolist(),
        "topic_word_counts": model.topic_word_counts.tolist(),
        "doc_topic_counts": model.doc_topic_counts.tolist(),
    }


def model_from_dict(obj: dict) -> TopicModel:
    if not isinstance(obj, dict) or obj.get("format") != FORMAT_NAME:
        raise ModelError("not an issuevol topic model file")
    if obj.get("version") != FORMAT_VERSION:
        raise ModelError(f"unsupported model file version {obj.get('version')!r}")
    try:
        vocab = Vocabulary(
            tuple(obj["vocabulary"]["terms"]), tuple(obj["vocabulary"]["doc_frequency"])
        )
        return TopicModel(
            k=obj["k"],
            alpha=obj["alpha"],
            beta=obj["beta"],
            topic_word_counts=obj["topic_word_counts"],
            doc_topic_counts=np.asarray(obj["doc_topic_counts"], dtype=np.int64).reshape(
                len(obj["doc_ids"]), obj["k"]
            ),
            topic_totals=obj["topic_totals"],
            seed=obj["seed"],
            iterations_run=obj["iterations_run"],
            burn_in=obj["burn_in"],
            vocabulary=vocab,
            doc_ids=tuple(obj["doc_ids"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"corrupt model file: {exc}") from exc


def dump_model(model: TopicModel, stream: IO[str]) -> None:
    json.dump(model_to_dict(model), stream, separators=(",", ":"))
    stream.write("\n")


def load_model(path: str | Path) -> TopicModel:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON ({exc.msg})") from exc
    return model_from_dict(obj)


def save_model(model: TopicModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        dump_model(model, fh)
