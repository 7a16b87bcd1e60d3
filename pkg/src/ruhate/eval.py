"""Stratified k-fold cross-validation, the P/R/F1 metric suite, result
tables, and misclassification reason tagging.

Folds are built by seeded shuffle within each class followed by
round-robin assignment, which keeps per-fold class counts within one item
of the exact proportional share.  Cross-validation refits the vocabulary
on each training split only, so no test-document statistic ever leaks
into the features.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import models as models_mod
from ._util import fmt_fixed
from .features import FeatureConfig, fit_vocabulary, transform

REASON_CODES: dict[str, str] = {
    "A": "Use of Hate word(s)",
    "B": "No Hate word(s)",
    "C": "Sarcasm/Taunt",
    "D": "Offensive Act (without much hate wording)",
    "E": "Blame/Threat (without much hate wording)",
    "F": "Abbreviation of some offensive/hateful term is used",
    "G": "Hate word rarely occurred in the dataset",
    "H": "Word(s) is predominantly hateful in the dataset",
    "I": "Word(s) is predominantly neutral in the dataset",
    "J": "Spelling variations in Roman Urdu",
}


class TooFewExamples(ValueError):
    """A class has fewer members than the requested fold count."""


class UnknownReasonCode(ValueError):
    """A reason tag outside codes A-J."""


# --------------------------------------------------------------------------
# folds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    strata: tuple[str, ...]
    assignments: tuple[int, ...]  # index -> fold id

    @property
    def n(self) -> int:
        return len(self.assignments)

    def fold_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.array(self.assignments) == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.array(self.assignments) != fold)


def make_folds(labels: Sequence[str], k: int, seed: int) -> FoldPlan:
    """Stratified fold plan: shuffle within class, assign round-robin."""
    if k < 2:
        raise ValueError("k must be >= 2")
    labels = list(labels)
    classes = sorted(set(labels))
    rng = np.random.Generator(np.random.PCG64(seed))
    assignments = np.empty(len(labels), dtype=np.int64)
    for cls in classes:
        idx = np.flatnonzero(np.array(labels, dtype=object) == cls)
        if len(idx) < k:
            raise TooFewExamples(f"class {cls!r} has {len(idx)} members, needs >= {k}")
        shuffled = idx.copy()
        rng.shuffle(shuffled)
        for pos, i in enumerate(shuffled):
            assignments[i] = pos % k
    return FoldPlan(k=k, seed=seed, strata=tuple(labels), assignments=tuple(int(a) for a in assignments))


def single_holdout(labels: Sequence[str], seed: int, test_fraction: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Stratified single train/test split; fraction 0.1 mirrors one CV fold."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    k = max(2, round(1.0 / test_fraction))
    plan = make_folds(labels, k, seed)
    return plan.train_indices(0), plan.fold_indices(0)


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    accuracy: float
    zero_guarded: tuple[str, ...] = ()


def metrics(tp: int, fp: int, fn: int, tn: int = 0) -> Metrics:
    """P, R, F1, accuracy with zero denominators returning 0 and a flag."""
    for name, v in (("tp", tp), ("fp", fp), ("fn", fn), ("tn", tn)):
        if v < 0:
            raise ValueError(f"{name} must be >= 0")
    guarded: list[str] = []
    if tp + fp:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        guarded.append("precision")
    if tp + fn:
        recall = tp / (tp + fn)
    else:
        recall = 0.0
        guarded.append("recall")
    if precision + recall:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        guarded.append("f1")
    total = tp + fp + fn + tn
    if total:
        accuracy = (tp + tn) / total
    else:
        accuracy = 0.0
        guarded.append("accuracy")
    return Metrics(precision, recall, f1, accuracy, tuple(guarded))


def confusion(y_true: Sequence[str], y_pred: Sequence[str], positive: str) -> tuple[int, int, int, int]:
    if len(y_true) != len(y_pred):
        raise ValueError("label sequences differ in length")
    tp = fp = fn = tn = 0
    for t, p in zip(y_true, y_pred):
        if p == positive:
            if t == positive:
                tp += 1
            else:
                fp += 1
        else:
            if t == positive:
                fn += 1
            else:
                tn += 1
    return tp, fp, fn, tn


# --------------------------------------------------------------------------
# cross-validation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FoldReport:
    fold: int
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    accuracy: float

    @property
    def test_size(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class RunReport:
    classifier: str
    feature_code: str
    positive_label: str
    k: int
    seed: int
    folds: tuple[FoldReport, ...]
    config_echo: tuple[tuple[str, str], ...] = ()

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([f.accuracy for f in self.folds]))

    @property
    def mean_precision(self) -> float:
        return float(np.mean([f.precision for f in self.folds]))

    @property
    def mean_recall(self) -> float:
        return float(np.mean([f.recall for f in self.folds]))

    @property
    def mean_f1(self) -> float:
        return float(np.mean([f.f1 for f in self.folds]))


def cross_validate(
    docs: Sequence[str | Sequence[str]],
    labels: Sequence[str],
    *,
    feature_config: FeatureConfig,
    scheme: str,
    classifier: str,
    classifier_cfg=None,
    plan: FoldPlan,
    positive_label: str,
    feature_code: str = "",
    config_echo: Iterable[tuple[str, str]] = (),
) -> RunReport:
    """Train and score once per fold; vocabulary fit on the training split only."""
    docs = list(docs)
    labels = list(labels)
    if plan.n != len(docs) or len(labels) != len(docs):
        raise ValueError("plan does not cover the corpus")
    if positive_label not in set(labels):
        raise ValueError(f"positive label {positive_label!r} absent from corpus")
    fold_reports = []
    for fold in range(plan.k):
        train_idx = plan.train_indices(fold)
        test_idx = plan.fold_indices(fold)
        train_docs = [docs[i] for i in train_idx]
        test_docs = [docs[i] for i in test_idx]
        train_y = [labels[i] for i in train_idx]
        test_y = [labels[i] for i in test_idx]
        vocab = fit_vocabulary(train_docs, feature_config)
        X_train = transform(vocab, train_docs, scheme)
        X_test = transform(vocab, test_docs, scheme)
        model = models_mod.train(classifier, X_train, train_y, classifier_cfg)
        preds = models_mod.predict(model, X_test)
        tp, fp, fn, tn = confusion(test_y, preds, positive_label)
        m = metrics(tp, fp, fn, tn)
        fold_reports.append(
            FoldReport(fold, tp, fp, fn, tn, m.precision, m.recall, m.f1, m.accuracy)
        )
    return RunReport(
        classifier=classifier,
        feature_code=feature_code,
        positive_label=positive_label,
        k=plan.k,
        seed=plan.seed,
        folds=tuple(fold_reports),
        config_echo=tuple(config_echo),
    )


# --------------------------------------------------------------------------
# report rendering: TSV and aligned text tables
# --------------------------------------------------------------------------

def report_tsv(report: RunReport) -> str:
    lines = [f"# {k} = {v}" for k, v in report.config_echo]
    lines.append(
        "fold\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\taccuracy"
    )
    for f in report.folds:
        lines.append(
            f"{f.fold + 1}\t{f.tp}\t{f.fp}\t{f.fn}\t{f.tn}"
            f"\t{fmt_fixed(f.precision, 3)}\t{fmt_fixed(f.recall, 3)}"
            f"\t{fmt_fixed(f.f1, 3)}\t{fmt_fixed(f.accuracy, 2)}"
        )
    lines.append(
        f"mean\t-\t-\t-\t-\t{fmt_fixed(report.mean_precision, 3)}"
        f"\t{fmt_fixed(report.mean_recall, 3)}\t{fmt_fixed(report.mean_f1, 3)}"
        f"\t{fmt_fixed(report.mean_accuracy, 2)}"
    )
    return "\n".join(lines) + "\n"


def accuracy_table(reports: Sequence[RunReport]) -> str:
    """Grid of per-fold accuracies: classifier, feature code, folds 1..k, mean."""
    if not reports:
        return ""
    k = reports[0].k
    header = ["classifier", "features"] + [str(i + 1) for i in range(k)] + ["mean"]
    rows = [header]
    for r in reports:
        rows.append(
            [r.classifier.upper(), r.feature_code.upper() or "-"]
            + [fmt_fixed(f.accuracy, 2) for f in r.folds]
            + [fmt_fixed(r.mean_accuracy, 2)]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    out = []
    for row in rows:
        out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"


def fold_metric_table(report: RunReport) -> str:
    """Per-fold confusion counts and P/R/F1, three decimals, plus the mean F1."""
    header = ["fold", "tp", "fp", "fn", "tn", "P", "R", "F1"]
    rows = [header]
    for f in report.folds:
        rows.append(
            [
                str(f.fold + 1),
                str(f.tp),
                str(f.fp),
                str(f.fn),
                str(f.tn),
                fmt_fixed(f.precision, 3),
                fmt_fixed(f.recall, 3),
                fmt_fixed(f.f1, 3),
            ]
        )
    rows.append(["mean", "-", "-", "-", "-", "-", "-", fmt_fixed(report.mean_f1, 3)])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    out = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# misclassification reason tagging
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TaggedError:
    comment: str
    actual: str
    predicted: str
    codes: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.codes:
            raise ValueError("each misclassified comment needs at least one reason code")
        for code in self.codes:
            if code not in REASON_CODES:
                raise UnknownReasonCode(f"reason code {code!r} is not one of A-J")


@dataclass(frozen=True)
class ErrorTagReport:
    entries: tuple[TaggedError, ...]
    counts: Mapping[str, int] = field(default_factory=dict)


def tag_errors(records: Iterable[tuple[str, str, str, Sequence[str]]]) -> ErrorTagReport:
    """Join misclassified comments to human-assigned reason codes A-J."""
    entries = []
    counts: dict[str, int] = {code: 0 for code in REASON_CODES}
    for comment, actual, predicted, codes in records:
        entry = TaggedError(comment, actual, predicted, tuple(codes))
        entries.append(entry)
        for code in entry.codes:
            counts[code] += 1
    return ErrorTagReport(entries=tuple(entries), counts=counts)


def error_report_tsv(report: ErrorTagReport) -> str:
    lines = ["comment\tactual\tpredicted\treasons"]
    for e in report.entries:
        lines.append(f"{e.comment}\t{e.actual}\t{e.predicted}\t{','.join(e.codes)}")
    lines.append("")
    lines.append("code\tdescription\tcount")
    for code, desc in REASON_CODES.items():
        lines.append(f"{code}\t{desc}\t{report.counts.get(code, 0)}")
    return "\n".join(lines) + "\n"
