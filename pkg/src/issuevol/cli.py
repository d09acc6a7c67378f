"""Command-line interface.

Subcommands::

    issuevol measure  poll CSV -> measure CSV
    issuevol fit      corpus JSONL -> topic model file
    issuevol infer    corpus JSONL + model -> per-document topic weights CSV
    issuevol series   corpus JSONL (+ model) -> measure CSV over topics
    issuevol sweep    corpus JSONL -> one measure CSV per k + rank-correlation summary
    issuevol synth    regime/corpus spec -> synthetic CSV or JSONL + ground truth

Settings resolve as command-line flag, then ``--config`` JSON file, then
built-in default.  Every run writes a ``.provenance.json`` sidecar holding
the effective settings.  Outputs are written to a temporary file and renamed
into place, so a failed run leaves nothing behind.

Exit codes: 0 success, 1 internal error, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import itertools
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.stats import spearmanr

from . import __version__
from .agenda import (
    Period,
    bucketize,
    compute_measures,
    filter_issues,
    series_to_records,
    truncate_top_k,
)
from .errors import IssueVolError
from .export import measures_to_csv, table_to_csv, write_files
from .ingest import (
    parse_corpus_jsonl,
    parse_date,
    parse_poll_csv,
    write_corpus_jsonl,
    write_poll_csv,
)
from .synth import corpus_from_dict, generate_agenda_with_truth, regime_from_dict
from .topics import (
    build_vocabulary,
    corpus_to_series,
    fit,
    infer_corpus,
    load_model,
    load_stopwords,
)
from .topics.lda import DEFAULT_INFER_ITERATIONS
from .topics.store import model_to_dict

log = logging.getLogger("issuevol")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2

FIT_DEFAULTS = {
    "k": 50,
    "alpha": None,
    "beta": 0.01,
    "iters": 1000,
    "burn_in": 800,
    "seed": 0,
    "stopwords": "english",
    "min_df": 5,
    "max_df": 0.5,
}
MEASURE_DEFAULTS = {"period": "monthly", "epsilon": None}

DEFAULTS = {
    "measure": {**MEASURE_DEFAULTS, "top_k": None, "cutoff": None},
    "fit": dict(FIT_DEFAULTS),
    "infer": {"iters": DEFAULT_INFER_ITERATIONS, "seed": 0},
    "series": {**FIT_DEFAULTS, **MEASURE_DEFAULTS},
    "sweep": {**FIT_DEFAULTS, **MEASURE_DEFAULTS, "k_list": [20, 35, 50, 65, 80]},
    "synth": {"seed": None},
}


class UsageError(IssueVolError):
    pass


# --- argument parsing --------------------------------------------------------

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _k_list(text: str) -> list[int]:
    items = [s for s in text.replace(" ", "").split(",") if s]
    return [_positive_int(s) for s in items]


def _period(text: str) -> str:
    return Period(text).value


# Converters shared by flags and config-file values.
SETTING_TYPES = {
    "k": _positive_int,
    "alpha": _positive_float,
    "beta": _positive_float,
    "iters": _positive_int,
    "burn_in": _nonneg_int,
    "seed": _nonneg_int,
    "min_df": _positive_int,
    "max_df": _positive_float,
    "epsilon": _positive_float,
    "top_k": _positive_int,
    "period": _period,
    "k_list": _k_list,
    "cutoff": str,
    "stopwords": str,
}


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=_positive_int, help="number of topics (default 50)")
    p.add_argument("--alpha", type=_positive_float, help="document-topic concentration (default 50/k)")
    p.add_argument("--beta", type=_positive_float, help="topic-word concentration (default 0.01)")
    p.add_argument("--iters", type=_positive_int, help="Gibbs sweeps (default 1000)")
    p.add_argument("--burn-in", type=_nonneg_int, help="burn-in sweeps (default 800)")
    p.add_argument("--seed", type=_nonneg_int, help="random seed (default 0)")
    p.add_argument("--stopwords", help="stopword file or bundled list name(s), e.g. english+german")
    p.add_argument("--min-df", type=_positive_int, help="minimum document frequency (default 5)")
    p.add_argument("--max-df", type=_positive_float, help="maximum document fraction (default 0.5)")


def _add_measure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--period", choices=[x.value for x in Period], help="bucket period (default monthly)")
    p.add_argument("--epsilon", type=_positive_float, help="KL smoothing pseudocount (default 1/(10 n))")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="issuevol", description="Diversity and novelty of issue attention over time.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("--input", required=True, help="input file")
        p.add_argument("--output", required=True, help="output file or directory")
        p.add_argument("--config", help="JSON file with default settings")
        return p

    p = command("measure", "measures from a poll CSV")
    _add_measure_flags(p)
    p.add_argument("--top-k", type=_positive_int, help="keep the k issues with the highest mean share")
    p.add_argument("--cutoff", help="drop issues first seen after this date (YYYY-MM-DD)")

    p = command("fit", "fit a topic model to a JSONL corpus")
    _add_fit_flags(p)

    p = command("infer", "per-document topic weights from a fitted model")
    p.add_argument("--model", required=True, help="model file written by `fit`")
    p.add_argument("--iters", type=_positive_int, help="inference sweeps per document (default 200)")
    p.add_argument("--seed", type=_nonneg_int)

    p = command("series", "measures of the topic attention series of a corpus")
    p.add_argument("--model", help="model fitted on this corpus; fitted here if omitted")
    _add_fit_flags(p)
    _add_measure_flags(p)

    p = command("sweep", "fit + series for several topic counts")
    p.add_argument("--k-list", type=_k_list, help="comma-separated topic counts (default 20,35,50,65,80)")
    _add_fit_flags(p)
    _add_measure_flags(p)

    p = command("synth", "write a synthetic fixture from a spec")
    p.add_argument("--seed", type=_nonneg_int, help="override the seed given in the input file")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Effective settings: flags over config file over defaults."""
    defaults = DEFAULTS[args.command]
    config = dict(defaults)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                from_file = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"config {args.config}: invalid JSON ({exc.msg})") from exc
        if not isinstance(from_file, dict):
            raise UsageError(f"config {args.config}: expected a JSON object")
        from_file = {key.replace("-", "_"): value for key, value in from_file.items()}
        unknown = sorted(set(from_file) - set(defaults))
        if unknown:
            raise UsageError(f"config {args.config}: unknown settings {unknown} for `{args.command}`")
        for key, value in from_file.items():
            if value is not None:
                if key == "k_list" and isinstance(value, list):
                    value = ",".join(map(str, value))
                try:
                    value = SETTING_TYPES[key](str(value))
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise UsageError(f"config {args.config}: bad value for {key!r}: {exc}") from exc
            config[key] = value
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


# --- helpers -----------------------------------------------------------------

def _sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _provenance(command: str, config: dict, inputs: dict[str, str], **extra) -> str:
    doc = {
        "tool": "issuevol",
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": {name: {"path": str(p), "sha256": _sha256(p)} for name, p in inputs.items()},
        **extra,
    }
    return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"


def _sidecar(path: Path, suffix: str = ".provenance.json") -> Path:
    return path.with_name(path.name + suffix)


def _read_corpus(path: str):
    with open(path, "rb") as fh:
        docs, report = parse_corpus_jsonl(fh)
    for line, reason in report.rejection_reasons:
        log.warning("%s:%d: rejected: %s", path, line, reason)
    return docs, report


def _fit_from_config(docs, config: dict, k: int):
    if config["iters"] <= config["burn_in"]:
        raise UsageError(f"--iters ({config['iters']}) must exceed --burn-in ({config['burn_in']})")
    stop = load_stopwords(config["stopwords"])
    vocab = build_vocabulary(docs, stop, min_df=config["min_df"], max_df_fraction=config["max_df"])
    return fit(
        docs, vocab, k=k, alpha=config["alpha"], beta=config["beta"],
        iterations=config["iters"], burn_in=config["burn_in"], seed=config["seed"],
    )


def _corpus_measures(model, docs, config: dict) -> str:
    series = corpus_to_series(model, docs, config["period"])
    return measures_to_csv(compute_measures(series, config["epsilon"]))


def _model_summary(model) -> dict:
    return {"k": model.k, "alpha": model.alpha, "beta": model.beta, "seed": model.seed,
            "iterations_run": model.iterations_run, "vocabulary_size": len(model.vocabulary)}


# --- commands ----------------------------------------------------------------

def cmd_measure(args: argparse.Namespace, config: dict) -> int:
    with open(args.input, "rb") as fh:
        records, catalog, report = parse_poll_csv(fh)
    for line, reason in report.rejection_reasons:
        log.warning("%s:%d: rejected: %s", args.input, line, reason)
    series = bucketize(records, config["period"], catalog)
    if config["cutoff"]:
        try:
            cutoff = parse_date(str(config["cutoff"]))
        except ValueError as exc:
            raise UsageError(f"--cutoff: {exc}") from exc
        series = filter_issues(series, cutoff)
    if config["top_k"]:
        series = truncate_top_k(series, config["top_k"])
    records_out = compute_measures(series, config["epsilon"])
    out = Path(args.output)
    write_files({
        out: measures_to_csv(records_out),
        _sidecar(out): _provenance(
            "measure", config, {"input": args.input},
            ingest={"accepted": report.accepted, "rejected": report.rejected},
            issues=list(series.issues), notes=list(series.notes),
            units={"entropy_bits": "bits", "novelty_bits": "bits", "pedersen": "fraction 0-1"},
        ),
    })
    return EXIT_OK


def cmd_fit(args: argparse.Namespace, config: dict) -> int:
    docs, report = _read_corpus(args.input)
    model = _fit_from_config(docs, config, config["k"])
    out = Path(args.output)
    write_files({
        out: json.dumps(model_to_dict(model), separators=(",", ":")) + "\n",
        _sidecar(out): _provenance("fit", config, {"input": args.input},
                                   model=_model_summary(model),
                                   ingest={"accepted": report.accepted, "rejected": report.rejected}),
    })
    return EXIT_OK


def cmd_infer(args: argparse.Namespace, config: dict) -> int:
    docs, _ = _read_corpus(args.input)
    model = load_model(args.model)
    results = infer_corpus(model, docs, iterations=config["iters"], seed=config["seed"])
    rows = [
        [r.doc_id, doc.timestamp.isoformat(), "true" if r.fallback else "false",
         *(f"{w:.6f}" for w in r.weights.shares)]
        for doc, r in zip(docs, results)
    ]
    out = Path(args.output)
    write_files({
        out: table_to_csv(["doc_id", "date", "fallback", *model.topic_ids], rows),
        _sidecar(out): _provenance("infer", config, {"input": args.input, "model": args.model},
                                   model=_model_summary(model)),
    })
    return EXIT_OK


def cmd_series(args: argparse.Namespace, config: dict) -> int:
    docs, _ = _read_corpus(args.input)
    inputs = {"input": args.input}
    if args.model:
        model = load_model(args.model)
        inputs["model"] = args.model
    else:
        model = _fit_from_config(docs, config, config["k"])
    out = Path(args.output)
    write_files({
        out: _corpus_measures(model, docs, config),
        _sidecar(out): _provenance("series", config, inputs, k=model.k, model=_model_summary(model)),
    })
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: dict) -> int:
    k_list = list(config["k_list"])
    if not k_list:
        raise UsageError("--k-list must name at least one topic count")
    docs, _ = _read_corpus(args.input)
    outdir = Path(args.output)
    effective: dict[int, list[float]] = {}
    files: dict[Path, str] = {}
    failures: dict[int, str] = {}
    worst = EXIT_OK
    for k in k_list:
        try:
            model = _fit_from_config(docs, config, k)
            series = corpus_to_series(model, docs, config["period"])
            records = compute_measures(series, config["epsilon"])
        except IssueVolError as exc:
            log.error("k=%d failed: %s", k, exc)
            failures[k], worst = str(exc), max(worst, EXIT_INPUT)
            continue
        except Exception as exc:  # keep going with the other k values
            log.exception("k=%d failed", k)
            failures[k] = f"{type(exc).__name__}: {exc}"
            worst = EXIT_INTERNAL if worst == EXIT_OK else worst
            continue
        effective[k] = [r.effective_number for r in records]
        files[outdir / f"measures_k{k}.csv"] = measures_to_csv(records)

    rows = []
    for a, b in itertools.combinations(sorted(effective), 2):
        rho = spearmanr(effective[a], effective[b]).statistic
        rows.append([a, b, "nan" if np.isnan(rho) else f"{rho:.6f}"])
    files[outdir / "summary.csv"] = table_to_csv(["k_a", "k_b", "spearman"], rows)
    files[outdir / "provenance.json"] = _provenance(
        "sweep", config, {"input": args.input},
        completed=sorted(effective), failures={str(k): v for k, v in failures.items()},
    )
    write_files(files)
    return worst


def _load_spec(source: str) -> dict:
    path = Path(source)
    if not path.is_file():
        ref = resources.files("issuevol").joinpath("data", "regimes", f"{source}.json")
        if not ref.is_file():
            raise UsageError(f"spec {source!r} is neither a file nor a bundled spec")
        text = ref.read_text(encoding="utf-8")
    else:
        text = path.read_text(encoding="utf-8")
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"spec {source}: invalid JSON ({exc.msg})") from exc
    if not isinstance(spec, dict):
        raise UsageError(f"spec {source}: expected a JSON object")
    return spec


def cmd_synth(args: argparse.Namespace, config: dict) -> int:
    spec = _load_spec(args.input)
    if config["seed"] is not None:
        spec["seed"] = config["seed"]
    kind = spec.get("kind", "agenda")
    buf = io.StringIO()
    if kind == "agenda":
        series, truth = generate_agenda_with_truth(regime_from_dict(spec))
        write_poll_csv(series_to_records(series), buf)
        truth_doc = truth.to_dict()
    elif kind == "corpus":
        corpus = corpus_from_dict(spec)
        write_corpus_jsonl(corpus.documents, buf)
        truth_doc = {"spec": spec, **corpus.to_dict()}
    else:
        raise UsageError(f"unknown spec kind {kind!r}; expected 'agenda' or 'corpus'")
    out = Path(args.output)
    write_files({
        out: buf.getvalue(),
        _sidecar(out, ".truth.json"): json.dumps(truth_doc, separators=(",", ":")) + "\n",
        _sidecar(out): json.dumps({"tool": "issuevol", "version": __version__, "command": "synth",
                                   "spec": spec, "config": config}, indent=2, sort_keys=True) + "\n",
    })
    return EXIT_OK


COMMANDS = {
    "measure": cmd_measure,
    "fit": cmd_fit,
    "infer": cmd_infer,
    "series": cmd_series,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](args, config)
    except (IssueVolError, OSError) as exc:
        print(f"issuevol {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:
        log.exception("internal error")
        print(f"issuevol {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
