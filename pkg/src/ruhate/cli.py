"""Command-line surface binding ingestion, normalization, features and reports.

Every command reads stdin when the input path is "-".  With --out set, the
primary artifact is written under that directory; otherwise it goes to
stdout.  Identical inputs, config and seed produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from importlib import resources
from pathlib import Path

from . import agreement
from . import corpus as corpus_mod
from . import eval as eval_mod
from . import features, ingest, models, normalize


class UsageError(Exception):
    """Bad flags or config; exits 2 like argparse's own errors."""


# --------------------------------------------------------------------------
# run configuration: defaults <- config file <- explicit flags
# --------------------------------------------------------------------------

@dataclasses.dataclass
class RunConfig:
    lexicon: str | None = None      # spelling-variant table (TSV)
    stopwords: str | None = None
    lemmas: str | None = None
    pos: str | None = None
    protected: str | None = None
    corpus: str | None = None
    out: str | None = None
    features: str = "cv"
    min_df: int = 1
    max_features: int = 50_000
    classifier: str = "nb"
    alpha: float = 1.0              # nb smoothing
    l2_lambda: float = 1.0          # lr regularization strength
    learning_rate: float = 0.1
    max_iters: int = 1000
    c: float = 1.0                  # svm regularization
    epochs: int = 1000
    n_trees: int = 100
    max_depth: int = 16
    min_leaf: int = 1
    k: int = 10
    seed: int = 42
    threshold: float = 0.4          # language-filter lexicon fraction
    task: str = "top"


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_PATH_KEYS = ("lexicon", "stopwords", "lemmas", "pos", "protected", "corpus", "out")


def _coerce(key: str, value: str):
    if key in _PATH_KEYS or key in ("features", "classifier", "task"):
        return value
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            return int(value)
        return float(value)
    except ValueError:
        raise UsageError(f"config key {key!r} expects a number, got {value!r}") from None


def load_config_file(path: str) -> dict:
    """Flat `key = value` text; blank lines and # comments ignored."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{line_no}: expected `key = value`")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _FIELD_TYPES:
                raise UsageError(f"{path}:{line_no}: unknown config key {key!r}")
            values[key] = _coerce(key, value)
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = dataclasses.asdict(RunConfig())
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for key in _FIELD_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg = RunConfig(**values)
    if cfg.features not in features.FEATURE_CODES:
        raise UsageError(f"unknown feature code {cfg.features!r}")
    if cfg.classifier not in models.TRAINERS:
        raise UsageError(f"unknown classifier {cfg.classifier!r}")
    if cfg.task not in ("top", "fine"):
        raise UsageError(f"task must be top or fine, got {cfg.task!r}")
    if cfg.k < 2:
        raise UsageError("k must be >= 2")
    return cfg


# --------------------------------------------------------------------------
# shared plumbing
# --------------------------------------------------------------------------

def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, cfg: RunConfig, filename: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / filename).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _out_dir(cfg: RunConfig) -> Path:
    if not cfg.out:
        raise UsageError("this command writes file artifacts; pass --out DIR")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_corpus(path: str) -> list:
    if path == "-":
        with tempfile.NamedTemporaryFile(
            "w", suffix=".tsv", delete=False, encoding="utf-8"
        ) as tmp:
            tmp.write(sys.stdin.read())
            name = tmp.name
        try:
            return corpus_mod.load_tsv(name)
        finally:
            os.unlink(name)
    return corpus_mod.load_tsv(path)


def _data_path(name: str):
    return resources.files("ruhate") / "data" / name


def _load_lexicon(cfg: RunConfig) -> normalize.NormalizationLexicon:
    if not any(getattr(cfg, key) for key in ("lexicon", "stopwords", "lemmas", "pos", "protected")):
        return normalize.default_lexicon()
    return normalize.load_lexicon(
        variants_path=cfg.lexicon or _data_path("variants.tsv"),
        stopwords_path=cfg.stopwords or _data_path("stopwords.txt"),
        lemmas_path=cfg.lemmas or _data_path("lemmas.tsv"),
        pos_path=cfg.pos,
        protected_path=cfg.protected or _data_path("protected.txt"),
    )


def _task_labels(comments, task: str) -> tuple[list[str], list[str], str]:
    """Documents, labels and the positive class for the requested task."""
    if task == "top":
        return [c.text for c in comments], [c.path.top for c in comments], "Hostile"
    hostile = [c for c in comments if c.path.top == "Hostile"]
    return [c.text for c in hostile], [c.path.fine for c in hostile], "Hateful"


def _classifier_cfg(cfg: RunConfig):
    if cfg.classifier == "nb":
        return models.NBConfig(alpha=cfg.alpha)
    if cfg.classifier == "lr":
        return models.LRConfig(
            l2_lambda=cfg.l2_lambda,
            learning_rate=cfg.learning_rate,
            max_iters=cfg.max_iters,
            seed=cfg.seed,
        )
    if cfg.classifier == "svm":
        return models.SVMConfig(C=cfg.c, epochs=cfg.epochs, seed=cfg.seed)
    return models.RFConfig(
        n_trees=cfg.n_trees,
        max_depth=cfg.max_depth,
        min_leaf=cfg.min_leaf,
        seed=cfg.seed,
    )


_HYPER_KEYS = {
    "nb": ("alpha",),
    "lr": ("l2_lambda", "learning_rate", "max_iters"),
    "svm": ("c", "epochs"),
    "rf": ("n_trees", "max_depth", "min_leaf"),
}


def _config_echo(cfg: RunConfig, positive: str) -> tuple[tuple[str, str], ...]:
    pairs = [
        ("classifier", cfg.classifier),
        ("features", cfg.features),
        ("min_df", str(cfg.min_df)),
        ("max_features", str(cfg.max_features)),
    ]
    pairs += [(key, str(getattr(cfg, key))) for key in _HYPER_KEYS[cfg.classifier]]
    pairs += [
        ("k", str(cfg.k)),
        ("seed", str(cfg.seed)),
        ("task", cfg.task),
        ("positive", positive),
    ]
    return tuple(pairs)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_clean(args, cfg: RunConfig) -> int:
    tweets = ingest.parse_dump(_read_input(args.dump).splitlines())
    result = ingest.run_pipeline(tweets)
    _emit(ingest.render_tsv(result.ordered(tweets)), cfg, "cleaned.tsv")
    return 0


def cmd_filter(args, cfg: RunConfig) -> int:
    tweets = ingest.parse_dump(_read_input(args.dump).splitlines())
    lex = _load_lexicon(cfg)
    result = ingest.run_pipeline(tweets, lex, threshold=cfg.threshold)
    _emit(ingest.render_tsv(result.ordered(tweets)), cfg, "filtered.tsv")
    return 0


def cmd_normalize(args, cfg: RunConfig) -> int:
    lex = _load_lexicon(cfg)
    collapse = not args.keep_elongations
    lines = _read_input(args.input).splitlines()
    out = [normalize.standardize(line, lex, collapse_elongations=collapse) for line in lines]
    _emit("\n".join(out), cfg, "normalized.txt")
    return 0


def cmd_stats(args, cfg: RunConfig) -> int:
    comments = _load_corpus(args.corpus)
    _emit(corpus_mod.stats_text(corpus_mod.stats(comments)), cfg, "stats.txt")
    return 0


def cmd_kappa(args, cfg: RunConfig) -> int:
    table = agreement.AgreementTable(args.cell_a, args.cell_b, args.cell_c, args.cell_d)
    _emit(agreement.report_text(agreement.kappa(table)), cfg, "kappa.txt")
    return 0


def cmd_featurize(args, cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    comments = _load_corpus(args.corpus)
    docs = [c.text for c in comments]
    fc, scheme = features.config_from_code(
        cfg.features, min_df=cfg.min_df, max_features=cfg.max_features
    )
    vocab = features.fit_vocabulary(docs, fc)
    X = features.transform(vocab, docs, scheme)
    features.save_vocabulary(vocab, str(out / "vocabulary.tsv"))
    features.save_matrix(X, str(out / f"features_{cfg.features}.tsv"))
    sys.stdout.write(
        f"docs={X.n_rows} terms={len(vocab)} nnz={len(X.data)} scheme={scheme}\n"
    )
    return 0


def cmd_train(args, cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    comments = _load_corpus(args.corpus)
    docs, labels, _ = _task_labels(comments, cfg.task)
    fc, scheme = features.config_from_code(
        cfg.features, min_df=cfg.min_df, max_features=cfg.max_features
    )
    vocab = features.fit_vocabulary(docs, fc)
    X = features.transform(vocab, docs, scheme)
    model = models.train(cfg.classifier, X, labels, _classifier_cfg(cfg))
    features.save_vocabulary(vocab, str(out / "vocabulary.tsv"))
    models.save_model(model, str(out / f"model_{cfg.classifier}_{cfg.features}.json"))
    sys.stdout.write(
        f"trained {cfg.classifier} on {X.n_rows} docs x {X.n_cols} features"
        f" classes={','.join(model.classes)}\n"
    )
    return 0


def cmd_cv(args, cfg: RunConfig) -> int:
    comments = _load_corpus(args.corpus)
    docs, labels, positive = _task_labels(comments, cfg.task)
    fc, scheme = features.config_from_code(
        cfg.features, min_df=cfg.min_df, max_features=cfg.max_features
    )
    plan = eval_mod.make_folds(labels, cfg.k, cfg.seed)
    report = eval_mod.cross_validate(
        docs,
        labels,
        feature_config=fc,
        scheme=scheme,
        classifier=cfg.classifier,
        classifier_cfg=_classifier_cfg(cfg),
        plan=plan,
        positive_label=positive,
        feature_code=cfg.features,
        config_echo=_config_echo(cfg, positive),
    )
    _emit(eval_mod.report_tsv(report), cfg, f"cv_{cfg.classifier}_{cfg.features}.tsv")
    if cfg.out:
        blob = dataclasses.asdict(report)
        (Path(cfg.out) / f"run_{cfg.classifier}_{cfg.features}.json").write_text(
            json.dumps(blob, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def _load_run(path: Path) -> eval_mod.RunReport:
    blob = json.loads(path.read_text(encoding="utf-8"))
    return eval_mod.RunReport(
        classifier=blob["classifier"],
        feature_code=blob["feature_code"],
        positive_label=blob["positive_label"],
        k=blob["k"],
        seed=blob["seed"],
        folds=tuple(eval_mod.FoldReport(**f) for f in blob["folds"]),
        config_echo=tuple((k, v) for k, v in blob["config_echo"]),
    )


def cmd_report(args, cfg: RunConfig) -> int:
    paths: list[Path] = []
    for raw in args.runs:
        p = Path(raw)
        if p.is_dir():
            paths.extend(sorted(p.glob("run_*.json")))
        else:
            paths.append(p)
    if not paths:
        raise UsageError("no run files given")
    reports = [_load_run(p) for p in paths]
    lines = []
    for p, r in zip(paths, reports):
        lines.append(
            f"# {p.name}: classifier = {r.classifier}, features = {r.feature_code},"
            f" k = {r.k}, seed = {r.seed}, positive = {r.positive_label}"
        )
    text = "\n".join(lines) + "\n" + eval_mod.accuracy_table(reports)
    if args.folds:
        for r in reports:
            text += f"\n{r.classifier} {r.feature_code}\n"
            text += eval_mod.fold_metric_table(r)
    _emit(text, cfg, "report.txt")
    return 0


def cmd_serve(args, cfg: RunConfig) -> int:
    import uvicorn

    from . import api

    app = api.create_app(
        state_dir=Path(cfg.out) if cfg.out else None,
        ui_dir=Path(args.ui) if args.ui else None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat `key = value` config file; flags override it")
    sub.add_argument("--out", help="directory for output artifacts (default: stdout)")
    sub.add_argument("--seed", type=int, help="RNG seed (default 42)")


def _add_lexicon_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--lexicon", help="spelling-variant TSV (default: packaged)")
    sub.add_argument("--stopwords", help="stopword list (default: packaged)")
    sub.add_argument("--lemmas", help="lemma TSV (default: packaged)")
    sub.add_argument("--pos", help="part-of-speech TSV (default: none)")
    sub.add_argument("--protected", help="protected-abbreviation list (default: packaged)")


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--features", choices=sorted(features.FEATURE_CODES))
    sub.add_argument("--classifier", choices=sorted(models.TRAINERS))
    sub.add_argument("--min-df", type=int, dest="min_df")
    sub.add_argument("--max-features", type=int, dest="max_features")
    sub.add_argument("--alpha", type=float, help="naive Bayes smoothing")
    sub.add_argument("--l2-lambda", type=float, dest="l2_lambda")
    sub.add_argument("--learning-rate", type=float, dest="learning_rate")
    sub.add_argument("--max-iters", type=int, dest="max_iters")
    sub.add_argument("--svm-c", type=float, dest="c")
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--n-trees", type=int, dest="n_trees")
    sub.add_argument("--max-depth", type=int, dest="max_depth")
    sub.add_argument("--min-leaf", type=int, dest="min_leaf")
    sub.add_argument("--task", choices=("top", "fine"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ruhate",
        description="Hostile-speech corpus laboratory: cleanse, normalize, label, classify.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("clean", help="parse a JSONL dump and strip noise from each tweet")
    p.add_argument("dump", help="JSONL dump path, or - for stdin")
    _add_common(p)
    p.set_defaults(func=cmd_clean)

    p = subs.add_parser("filter", help="clean plus reply/retweet/sequence/language filtering")
    p.add_argument("dump", help="JSONL dump path, or - for stdin")
    p.add_argument("--threshold", type=float, help="minimum in-lexicon token fraction")
    _add_lexicon_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_filter)

    p = subs.add_parser("normalize", help="map spelling variants to canonical forms, line by line")
    p.add_argument("input", help="text file (one comment per line), or - for stdin")
    p.add_argument(
        "--keep-elongations",
        action="store_true",
        help="do not collapse letter runs longer than two",
    )
    _add_lexicon_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_normalize)

    p = subs.add_parser("stats", help="label composition summary of a corpus TSV")
    p.add_argument("corpus", help="corpus TSV path, or - for stdin")
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = subs.add_parser("kappa", help="agreement statistics for a 2x2 decision table")
    p.add_argument("cell_a", metavar="a", type=int, help="both chose the first class")
    p.add_argument("cell_b", metavar="b", type=int, help="only annotator 1 chose the first class")
    p.add_argument("cell_c", metavar="c", type=int, help="only annotator 2 chose the first class")
    p.add_argument("cell_d", metavar="d", type=int, help="both chose the second class")
    _add_common(p)
    p.set_defaults(func=cmd_kappa)

    p = subs.add_parser("featurize", help="fit a vocabulary and write the document-term matrix")
    p.add_argument("corpus", help="corpus TSV path, or - for stdin")
    _add_model_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_featurize)

    p = subs.add_parser("train", help="train one classifier on the full corpus")
    p.add_argument("corpus", help="corpus TSV path, or - for stdin")
    _add_model_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = subs.add_parser("cv", help="stratified k-fold cross-validation report")
    p.add_argument("corpus", help="corpus TSV path, or - for stdin")
    p.add_argument("--k", type=int, help="number of folds (default 10)")
    _add_model_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_cv)

    p = subs.add_parser("report", help="accuracy grid across saved cv runs")
    p.add_argument("runs", nargs="+", help="run_*.json files or directories holding them")
    p.add_argument("--folds", action="store_true", help="append per-fold metric tables")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    p = subs.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help="directory with the built workbench bundle to serve at /")
    _add_common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except BrokenPipeError:
        return 0
    except (OSError, ValueError, KeyError, ArithmeticError) as exc:
        detail = " ".join(str(exc).split())
        sys.stderr.write(f"error: {type(exc).__name__}: {detail}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
