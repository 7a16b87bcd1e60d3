"""Four supervised classifiers with one train/predict/serialize contract.

Multinomial naive Bayes, L2-regularized logistic regression (full-batch
gradient descent), linear SVM (subgradient descent on hinge loss + L2),
and a random forest of Gini-split CART trees with bootstrap sampling and
per-split feature subsampling.  All four are written against the package's
CSR FeatureMatrix, train deterministically from (data, config, seed), and
serialize to a versioned, diffable JSON artifact.

Binary tasks only: exactly two distinct labels must be present.  Class
ordinals are positions in the lexicographically sorted label pair, and
every tie anywhere breaks toward the lower ordinal.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .features import FeatureMatrix

ARTIFACT_FORMAT = "ruhate-model/1"


class SingleClass(ValueError):
    """Training data contains fewer than two distinct labels."""


class NonFinite(ArithmeticError):
    """Training produced or consumed non-finite numbers (divergence)."""


class VocabularyMismatch(ValueError):
    """The matrix was built with a different vocabulary than the model."""


@dataclass(frozen=True)
class TrainingSet:
    X: FeatureMatrix
    y: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.X.n_rows != len(self.y):
            raise ValueError(f"{self.X.n_rows} rows but {len(self.y)} labels")
        distinct = sorted(set(self.y))
        if len(distinct) < 2:
            raise SingleClass(f"need two classes, got {distinct}")
        if len(distinct) > 2:
            raise ValueError(f"binary tasks only, got classes {distinct}")
        if not np.isfinite(self.X.data).all():
            raise NonFinite("feature matrix contains non-finite values")

    @property
    def classes(self) -> tuple[str, str]:
        c = sorted(set(self.y))
        return (c[0], c[1])


@dataclass(frozen=True)
class NBConfig:
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")


@dataclass(frozen=True)
class LRConfig:
    l2_lambda: float = 1.0
    learning_rate: float = 0.1
    max_iters: int = 1000
    tol: float = 1e-6
    seed: int = 42

    def __post_init__(self) -> None:
        if self.learning_rate <= 0 or self.max_iters < 1 or self.tol < 0 or self.l2_lambda < 0:
            raise ValueError("invalid logistic-regression config")


@dataclass(frozen=True)
class SVMConfig:
    C: float = 1.0
    epochs: int = 1000
    seed: int = 42

    def __post_init__(self) -> None:
        if self.C <= 0 or self.epochs < 1:
            raise ValueError("invalid SVM config")


@dataclass(frozen=True)
class RFConfig:
    n_trees: int = 100
    max_depth: int = 16
    min_leaf: int = 1
    feature_subsample: str = "sqrt"  # "sqrt" or "all"
    bootstrap: bool = True
    seed: int = 42

    def __post_init__(self) -> None:
        if self.n_trees < 1 or self.max_depth < 1 or self.min_leaf < 1:
            raise ValueError("invalid random-forest config")
        if self.feature_subsample not in ("sqrt", "all"):
            raise ValueError("feature_subsample must be 'sqrt' or 'all'")


@dataclass
class Model:
    kind: str
    classes: tuple[str, str]
    vocab_fingerprint: str
    n_features: int
    seed: int
    hyperparameters: dict
    params: dict = field(repr=False)


def _check_matrix(model: Model, X: FeatureMatrix) -> None:
    if X.n_cols != model.n_features:
        raise VocabularyMismatch(
            f"matrix has {X.n_cols} columns, model expects {model.n_features}"
        )
    if model.vocab_fingerprint and X.vocab_fingerprint and X.vocab_fingerprint != model.vocab_fingerprint:
        raise VocabularyMismatch("matrix vocabulary fingerprint differs from the model's")


def _row_ids(X: FeatureMatrix) -> np.ndarray:
    return np.repeat(np.arange(X.n_rows, dtype=np.int64), np.diff(X.indptr))


def _matvec(X: FeatureMatrix, w: np.ndarray) -> np.ndarray:
    return np.bincount(
        _row_ids(X), weights=X.data.astype(np.float64) * w[X.indices], minlength=X.n_rows
    )


# --------------------------------------------------------------------------
# naive Bayes
# --------------------------------------------------------------------------

def train_nb(X: FeatureMatrix, y: Sequence[str], cfg: NBConfig | None = None) -> Model:
    cfg = cfg or NBConfig()
    ts = TrainingSet(X, tuple(y))
    if (X.data < 0).any():
        raise ValueError("naive Bayes requires non-negative features")
    classes = ts.classes
    y_idx = np.array([classes.index(lab) for lab in ts.y], dtype=np.int64)
    n = X.n_rows
    rows = _row_ids(X)
    data = X.data.astype(np.float64)
    feature_count = np.zeros((2, X.n_cols), dtype=np.float64)
    for c in (0, 1):
        mask = y_idx[rows] == c
        feature_count[c] = np.bincount(
            X.indices[mask], weights=data[mask], minlength=X.n_cols
        )
    class_count = np.bincount(y_idx, minlength=2).astype(np.float64)
    smoothed = feature_count + cfg.alpha
    feature_log_prob = np.log(smoothed) - np.log(
        smoothed.sum(axis=1, keepdims=True)
    )
    class_log_prior = np.log(class_count / n)
    return Model(
        kind="nb",
        classes=classes,
        vocab_fingerprint=X.vocab_fingerprint,
        n_features=X.n_cols,
        seed=0,
        hyperparameters={"alpha": cfg.alpha},
        params={
            "class_log_prior": class_log_prior.tolist(),
            "feature_log_prob": feature_log_prob.tolist(),
        },
    )


def _nb_joint_log_likelihood(model: Model, X: FeatureMatrix) -> np.ndarray:
    flp = np.array(model.params["feature_log_prob"], dtype=np.float64)
    prior = np.array(model.params["class_log_prior"], dtype=np.float64)
    jll = np.empty((X.n_rows, 2), dtype=np.float64)
    for c in (0, 1):
        jll[:, c] = _matvec(X, flp[c]) + prior[c]
    return jll


# --------------------------------------------------------------------------
# logistic regression
# --------------------------------------------------------------------------

def logistic_loss_grad(
    w: np.ndarray, b: float, X: FeatureMatrix, y01: np.ndarray, lam: float
) -> tuple[float, np.ndarray, float]:
    """Mean L2-regularized logistic loss and its exact gradient.

    loss = (1/n) sum_i [softplus(z_i) - y_i z_i] + (lam/2) ||w||^2, bias
    unregularized.  This is the same objective the training kernels descend.
    """
    n = X.n_rows
    z = _matvec(X, w) + b
    softplus = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))
    loss = float((softplus - y01 * z).mean() + 0.5 * lam * (w @ w))
    p = 1.0 / (1.0 + np.exp(-z))
    r = (p - y01) / n
    gw = np.bincount(
        X.indices, weights=X.data.astype(np.float64) * r[_row_ids(X)], minlength=X.n_cols
    ) + lam * w
    gb = float(r.sum())
    return loss, gw, gb


def train_lr(X: FeatureMatrix, y: Sequence[str], cfg: LRConfig | None = None) -> Model:
    cfg = cfg or LRConfig()
    ts = TrainingSet(X, tuple(y))
    classes = ts.classes
    y01 = np.array([1.0 if lab == classes[1] else 0.0 for lab in ts.y])
    kern = _kernels.select_kernels()
    w, b, iters, converged, finite = kern["logreg_fit"](
        X.indptr,
        X.indices,
        X.data.astype(np.float64),
        y01,
        X.n_cols,
        cfg.l2_lambda,
        cfg.learning_rate,
        cfg.max_iters,
        cfg.tol,
    )
    if not finite:
        raise NonFinite("logistic loss diverged; lower the learning rate")
    return Model(
        kind="lr",
        classes=classes,
        vocab_fingerprint=X.vocab_fingerprint,
        n_features=X.n_cols,
        seed=cfg.seed,
        hyperparameters={
            "l2_lambda": cfg.l2_lambda,
            "learning_rate": cfg.learning_rate,
            "max_iters": cfg.max_iters,
            "tol": cfg.tol,
        },
        params={
            "w": np.asarray(w, dtype=np.float64).tolist(),
            "b": float(b),
            "iters_run": int(iters),
            "converged": bool(converged),
        },
    )


# --------------------------------------------------------------------------
# linear SVM
# --------------------------------------------------------------------------

def train_svm(X: FeatureMatrix, y: Sequence[str], cfg: SVMConfig | None = None) -> Model:
    cfg = cfg or SVMConfig()
    ts = TrainingSet(X, tuple(y))
    classes = ts.classes
    y_signed = np.array([1.0 if lab == classes[1] else -1.0 for lab in ts.y])
    lam = 1.0 / cfg.C
    kern = _kernels.select_kernels()
    w, b = kern["svm_fit"](
        X.indptr,
        X.indices,
        X.data.astype(np.float64),
        y_signed,
        X.n_cols,
        lam,
        cfg.epochs,
    )
    w = np.asarray(w, dtype=np.float64)
    if not (np.isfinite(w).all() and np.isfinite(b)):
        raise NonFinite("SVM training diverged")
    return Model(
        kind="svm",
        classes=classes,
        vocab_fingerprint=X.vocab_fingerprint,
        n_features=X.n_cols,
        seed=cfg.seed,
        hyperparameters={"C": cfg.C, "epochs": cfg.epochs},
        params={"w": w.tolist(), "b": float(b)},
    )


def hinge_objective(w: np.ndarray, b: float, X: FeatureMatrix, y_signed: np.ndarray, lam: float) -> float:
    margins = y_signed * (_matvec(X, w) + b)
    return float(0.5 * lam * (w @ w) + np.maximum(0.0, 1.0 - margins).mean())


# --------------------------------------------------------------------------
# random forest
# --------------------------------------------------------------------------

def _csc_arrays(X: FeatureMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    order = np.argsort(X.indices, kind="stable")
    col_sorted = X.indices[order]
    rows = _row_ids(X)[order]
    vals = X.data.astype(np.float64)[order]
    indptr = np.zeros(X.n_cols + 1, dtype=np.int64)
    np.add.at(indptr, col_sorted + 1, 1)
    indptr = np.cumsum(indptr)
    return indptr, rows, vals


def _build_tree(csc, n_rows, n_cols, rows, y_idx, cfg: RFConfig, rng, best_split):
    """Grow one CART tree; returns parallel node arrays."""
    col_indptr, col_rows, col_vals = csc
    scratch = np.zeros(n_rows, dtype=np.float64)
    m = max(1, int(np.sqrt(n_cols))) if cfg.feature_subsample == "sqrt" else n_cols

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[int] = []

    def gather(feats: np.ndarray, node_rows: np.ndarray) -> np.ndarray:
        out = np.empty((len(node_rows), len(feats)), dtype=np.float64)
        for jj, j in enumerate(feats):
            lo, hi = col_indptr[j], col_indptr[j + 1]
            touched = col_rows[lo:hi]
            scratch[touched] = col_vals[lo:hi]
            out[:, jj] = scratch[node_rows]
            scratch[touched] = 0.0
        return out

    def majority(node_rows: np.ndarray) -> int:
        # argmax returns the first maximum: lower ordinal wins ties
        return int(np.bincount(y_idx[node_rows], minlength=2).argmax())

    def grow(node_rows: np.ndarray, depth: int) -> int:
        idx = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(majority(node_rows))
        labels = y_idx[node_rows]
        if (
            depth >= cfg.max_depth
            or len(node_rows) < 2 * cfg.min_leaf
            or (labels == labels[0]).all()
        ):
            return idx
        feats = np.sort(rng.choice(n_cols, size=min(m, n_cols), replace=False))
        cols = gather(feats, node_rows)
        j_local, thr, _, found = best_split(cols, labels, 2, cfg.min_leaf)
        if not found:
            return idx
        go_left = cols[:, j_local] <= thr
        feature[idx] = int(feats[j_local])
        threshold[idx] = float(thr)
        left[idx] = grow(node_rows[go_left], depth + 1)
        right[idx] = grow(node_rows[~go_left], depth + 1)
        return idx

    grow(rows, 0)
    return {
        "feature": feature,
        "threshold": threshold,
        "left": left,
        "right": right,
        "value": value,
    }


def train_rf(X: FeatureMatrix, y: Sequence[str], cfg: RFConfig | None = None) -> Model:
    cfg = cfg or RFConfig()
    ts = TrainingSet(X, tuple(y))
    classes = ts.classes
    y_idx = np.array([classes.index(lab) for lab in ts.y], dtype=np.int64)
    csc = _csc_arrays(X)
    best_split = _kernels.select_kernels()["best_split"]
    # one child seed per tree keeps forests reproducible however trees are scheduled
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trees)
    trees = []
    for t in range(cfg.n_trees):
        rng = np.random.Generator(np.random.PCG64(seeds[t]))
        if cfg.bootstrap:
            rows = rng.integers(0, X.n_rows, size=X.n_rows)
        else:
            rows = np.arange(X.n_rows)
        trees.append(_build_tree(csc, X.n_rows, X.n_cols, rows, y_idx, cfg, rng, best_split))
    return Model(
        kind="rf",
        classes=classes,
        vocab_fingerprint=X.vocab_fingerprint,
        n_features=X.n_cols,
        seed=cfg.seed,
        hyperparameters={
            "n_trees": cfg.n_trees,
            "max_depth": cfg.max_depth,
            "min_leaf": cfg.min_leaf,
            "feature_subsample": cfg.feature_subsample,
            "bootstrap": cfg.bootstrap,
        },
        params={"trees": trees},
    )


def _tree_predict(tree: dict, row: dict[int, float]) -> int:
    node = 0
    feature = tree["feature"]
    while feature[node] >= 0:
        v = row.get(feature[node], 0.0)
        node = tree["left"][node] if v <= tree["threshold"][node] else tree["right"][node]
    return tree["value"][node]


def _rf_votes(model: Model, X: FeatureMatrix) -> np.ndarray:
    votes = np.zeros((X.n_rows, 2), dtype=np.int64)
    for i in range(X.n_rows):
        lo, hi = X.indptr[i], X.indptr[i + 1]
        row = {int(j): float(v) for j, v in zip(X.indices[lo:hi], X.data[lo:hi])}
        for tree in model.params["trees"]:
            votes[i, _tree_predict(tree, row)] += 1
    return votes


# --------------------------------------------------------------------------
# shared predict surface
# --------------------------------------------------------------------------

def decision_scores(model: Model, X: FeatureMatrix) -> np.ndarray:
    """Raw per-row score favouring the higher-ordinal class when positive."""
    _check_matrix(model, X)
    if model.kind == "nb":
        jll = _nb_joint_log_likelihood(model, X)
        return jll[:, 1] - jll[:, 0]
    if model.kind in ("lr", "svm"):
        w = np.array(model.params["w"], dtype=np.float64)
        return _matvec(X, w) + model.params["b"]
    if model.kind == "rf":
        votes = _rf_votes(model, X)
        return (votes[:, 1] - votes[:, 0]).astype(np.float64)
    raise ValueError(f"unknown model kind {model.kind!r}")


def predict(model: Model, X: FeatureMatrix) -> list[str]:
    """One label per row; every tie breaks toward the lower class ordinal."""
    scores = decision_scores(model, X)
    return [model.classes[1] if s > 0 else model.classes[0] for s in scores]


def predict_proba(model: Model, X: FeatureMatrix) -> np.ndarray:
    """(n, 2) probabilities, columns ordered like model.classes. LR only."""
    if model.kind != "lr":
        raise ValueError("probabilities are defined for logistic regression only")
    z = decision_scores(model, X)
    p1 = 1.0 / (1.0 + np.exp(-z))
    return np.column_stack([1.0 - p1, p1])


TRAINERS = {"nb": train_nb, "lr": train_lr, "svm": train_svm, "rf": train_rf}


def train(kind: str, X: FeatureMatrix, y: Sequence[str], cfg=None) -> Model:
    try:
        trainer = TRAINERS[kind]
    except KeyError:
        raise ValueError(f"unknown classifier {kind!r}; expected one of {sorted(TRAINERS)}") from None
    return trainer(X, y, cfg)


# --------------------------------------------------------------------------
# serialization: versioned, diffable JSON artifact
# --------------------------------------------------------------------------

def save_model(model: Model, path: str) -> None:
    doc = {
        "format": ARTIFACT_FORMAT,
        "kind": model.kind,
        "classes": list(model.classes),
        "vocab_fingerprint": model.vocab_fingerprint,
        "n_features": model.n_features,
        "seed": model.seed,
        "hyperparameters": model.hyperparameters,
        "params": model.params,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path: str) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != ARTIFACT_FORMAT:
        raise ValueError(f"unsupported artifact format {doc.get('format')!r}")
    return Model(
        kind=doc["kind"],
        classes=tuple(doc["classes"]),
        vocab_fingerprint=doc["vocab_fingerprint"],
        n_features=doc["n_features"],
        seed=doc["seed"],
        hyperparameters=doc["hyperparameters"],
        params=doc["params"],
    )
