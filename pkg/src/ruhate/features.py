"""Document vectorizers: count, term-frequency, and TF-IDF weighting.

Term extraction supports three modes over whitespace-tokenized documents:
single words, word n-grams (contiguous, space-joined), and character
n-grams taken within token boundaries.  A fitted Vocabulary fixes column
order (descending document frequency, ties broken lexicographically) and
carries the fit-time document frequencies used for IDF, so transforming
held-out documents never peeks at their statistics.

TF is raw count divided by the total number of terms the document yields
in the vocabulary's mode (in- or out-of-vocabulary alike).  TF-IDF is
TF * ln(N/df) with no smoothing; a term present in every fitting document
gets IDF 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._util import sha256_hex

MODES = ("word", "word_ngram", "char_ngram")
SCHEMES = ("count", "tf", "tfidf")

DEFAULT_WORD_NGRAM_RANGE = (2, 3)
DEFAULT_CHAR_NGRAM_RANGE = (2, 5)
DEFAULT_MAX_FEATURES = 50_000

# Report/CLI shorthand: feature code -> (mode, weighting scheme)
FEATURE_CODES = {
    "cv": ("word", "count"),
    "wltf": ("word", "tfidf"),
    "ngv": ("word_ngram", "tfidf"),
    "clv": ("char_ngram", "tfidf"),
}


class EmptyVocabulary(ValueError):
    """No term survived fitting (empty corpus or filters too strict)."""


@dataclass(frozen=True)
class FeatureConfig:
    mode: str = "word"
    ngram_range: tuple[int, int] | None = None
    min_df: int = 1
    max_features: int = DEFAULT_MAX_FEATURES

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        rng = self.ngram_range
        if rng is None:
            if self.mode == "word_ngram":
                rng = DEFAULT_WORD_NGRAM_RANGE
            elif self.mode == "char_ngram":
                rng = DEFAULT_CHAR_NGRAM_RANGE
            else:
                rng = (1, 1)
            object.__setattr__(self, "ngram_range", rng)
        lo, hi = self.ngram_range
        if lo < 1 or hi < lo:
            raise ValueError(f"bad ngram_range {self.ngram_range!r}")
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if self.max_features < 1:
            raise ValueError("max_features must be >= 1")


def _tokens(doc: str | Sequence[str]) -> list[str]:
    if isinstance(doc, str):
        return doc.split()
    return list(doc)


def extract_terms(doc: str | Sequence[str], cfg: FeatureConfig) -> list[str]:
    """All terms the document yields in the config's mode, in reading order."""
    tokens = _tokens(doc)
    lo, hi = cfg.ngram_range
    if cfg.mode == "word":
        if (lo, hi) == (1, 1):
            return tokens
        # word mode ignores the range; it always emits unigrams
        return tokens
    if cfg.mode == "word_ngram":
        out: list[str] = []
        for n in range(lo, hi + 1):
            out.extend(
                " ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)
            )
        return out
    out = []
    for tok in tokens:  # char n-grams never cross a token boundary
        for n in range(lo, hi + 1):
            out.extend(tok[i : i + n] for i in range(len(tok) - n + 1))
    return out


@dataclass(frozen=True)
class Vocabulary:
    config: FeatureConfig
    terms: tuple[str, ...]
    df: tuple[int, ...]
    n_docs: int
    index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.terms)

    def fingerprint(self) -> str:
        lo, hi = self.config.ngram_range
        head = f"{self.config.mode}\t{lo},{hi}\t{self.n_docs}\n"
        body = "\n".join(f"{t}\t{d}" for t, d in zip(self.terms, self.df))
        return sha256_hex((head + body).encode("utf-8"))


def fit_vocabulary(docs: Iterable[str | Sequence[str]], cfg: FeatureConfig | None = None) -> Vocabulary:
    """Fit column order and document frequencies from a document collection."""
    cfg = cfg or FeatureConfig()
    doc_list = list(docs)
    df_counts: dict[str, int] = {}
    for doc in doc_list:
        for term in set(extract_terms(doc, cfg)):
            df_counts[term] = df_counts.get(term, 0) + 1
    kept = [(t, d) for t, d in df_counts.items() if d >= cfg.min_df]
    if not kept:
        raise EmptyVocabulary("no term met the fitting criteria")
    kept.sort(key=lambda td: (-td[1], td[0]))
    kept = kept[: cfg.max_features]
    terms = tuple(t for t, _ in kept)
    dfs = tuple(d for _, d in kept)
    index = {t: j for j, t in enumerate(terms)}
    return Vocabulary(config=cfg, terms=terms, df=dfs, n_docs=len(doc_list), index=index)


@dataclass
class FeatureMatrix:
    """Compressed sparse row matrix plus the scheme and vocabulary it came from."""

    n_rows: int
    n_cols: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    scheme: str
    vocab_fingerprint: str

    def row(self, i: int) -> np.ndarray:
        dense = np.zeros(self.n_cols, dtype=self.data.dtype)
        lo, hi = self.indptr[i], self.indptr[i + 1]
        dense[self.indices[lo:hi]] = self.data[lo:hi]
        return dense

    def to_dense(self) -> np.ndarray:
        return np.vstack([self.row(i) for i in range(self.n_rows)]) if self.n_rows else np.zeros((0, self.n_cols))


def _count_rows(docs: list, vocab: Vocabulary) -> tuple[list[dict[int, int]], list[int]]:
    rows: list[dict[int, int]] = []
    totals: list[int] = []
    for doc in docs:
        terms = extract_terms(doc, vocab.config)
        counts: dict[int, int] = {}
        for term in terms:
            j = vocab.index.get(term)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        rows.append(counts)
        totals.append(len(terms))
    return rows, totals


def _assemble(rows: list[dict[int, float]], n_cols: int, scheme: str, fp: str, dtype) -> FeatureMatrix:
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    nnz = sum(len(r) for r in rows)
    indices = np.empty(nnz, dtype=np.int64)
    data = np.empty(nnz, dtype=dtype)
    pos = 0
    for i, row in enumerate(rows):
        for j in sorted(row):
            indices[pos] = j
            data[pos] = row[j]
            pos += 1
        indptr[i + 1] = pos
    return FeatureMatrix(len(rows), n_cols, indptr, indices, data, scheme, fp)


def transform_count(vocab: Vocabulary, docs: Iterable[str | Sequence[str]]) -> FeatureMatrix:
    doc_list = list(docs)
    rows, _ = _count_rows(doc_list, vocab)
    return _assemble(rows, len(vocab), "count", vocab.fingerprint(), np.int64)


def transform_tf(vocab: Vocabulary, docs: Iterable[str | Sequence[str]]) -> FeatureMatrix:
    doc_list = list(docs)
    rows, totals = _count_rows(doc_list, vocab)
    tf_rows: list[dict[int, float]] = []
    for counts, total in zip(rows, totals):
        tf_rows.append({j: c / total for j, c in counts.items()} if total else {})
    return _assemble(tf_rows, len(vocab), "tf", vocab.fingerprint(), np.float64)


def idf_vector(vocab: Vocabulary) -> np.ndarray:
    """ln(N/df) per column, from fit-time statistics."""
    return np.log(vocab.n_docs / np.asarray(vocab.df, dtype=np.float64))


def transform_tfidf(vocab: Vocabulary, docs: Iterable[str | Sequence[str]]) -> FeatureMatrix:
    doc_list = list(docs)
    rows, totals = _count_rows(doc_list, vocab)
    idf = idf_vector(vocab)
    out_rows: list[dict[int, float]] = []
    for counts, total in zip(rows, totals):
        if not total:
            out_rows.append({})
            continue
        out_rows.append({j: (c / total) * idf[j] for j, c in counts.items()})
    return _assemble(out_rows, len(vocab), "tfidf", vocab.fingerprint(), np.float64)


def config_from_code(code: str, *, min_df: int = 1, max_features: int = DEFAULT_MAX_FEATURES) -> tuple[FeatureConfig, str]:
    """Resolve a feature code (cv, wltf, ngv, clv) to (FeatureConfig, scheme)."""
    try:
        mode, scheme = FEATURE_CODES[code]
    except KeyError:
        raise ValueError(f"unknown feature code {code!r}; expected one of {sorted(FEATURE_CODES)}") from None
    return FeatureConfig(mode=mode, min_df=min_df, max_features=max_features), scheme


def transform(vocab: Vocabulary, docs: Iterable[str | Sequence[str]], scheme: str) -> FeatureMatrix:
    if scheme == "count":
        return transform_count(vocab, docs)
    if scheme == "tf":
        return transform_tf(vocab, docs)
    if scheme == "tfidf":
        return transform_tfidf(vocab, docs)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def save_matrix(m: FeatureMatrix, path: str) -> None:
    """Triplet text format: header comment, then one `row<TAB>col<TAB>value` per entry."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# rows={m.n_rows} cols={m.n_cols} scheme={m.scheme} vocab={m.vocab_fingerprint}\n")
        for i in range(m.n_rows):
            lo, hi = m.indptr[i], m.indptr[i + 1]
            for j, v in zip(m.indices[lo:hi], m.data[lo:hi]):
                val = str(int(v)) if m.scheme == "count" else repr(float(v))
                fh.write(f"{i}\t{j}\t{val}\n")


def save_vocabulary(vocab: Vocabulary, path: str) -> None:
    """Sidecar format: metadata comment, then `term<TAB>index<TAB>df` per column."""
    lo, hi = vocab.config.ngram_range
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"# mode={vocab.config.mode} ngram={lo},{hi} n_docs={vocab.n_docs}"
            f" min_df={vocab.config.min_df} max_features={vocab.config.max_features}\n"
        )
        for j, (t, d) in enumerate(zip(vocab.terms, vocab.df)):
            fh.write(f"{t}\t{j}\t{d}\n")


def load_vocabulary(path: str) -> Vocabulary:
    meta: dict[str, str] = {}
    terms: list[str] = []
    dfs: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                for part in line[1:].split():
                    if "=" in part:
                        k, v = part.split("=", 1)
                        meta[k] = v
                continue
            term, idx, df = line.split("\t")
            if int(idx) != len(terms):
                raise ValueError(f"vocabulary indices out of order at {idx}")
            terms.append(term)
            dfs.append(int(df))
    if not terms:
        raise EmptyVocabulary(f"no terms in {path}")
    lo, hi = (int(x) for x in meta.get("ngram", "1,1").split(","))
    cfg = FeatureConfig(
        mode=meta.get("mode", "word"),
        ngram_range=(lo, hi),
        min_df=int(meta.get("min_df", "1")),
        max_features=int(meta.get("max_features", str(DEFAULT_MAX_FEATURES))),
    )
    return Vocabulary(
        config=cfg,
        terms=tuple(terms),
        df=tuple(dfs),
        n_docs=int(meta.get("n_docs", "0")),
        index={t: j for j, t in enumerate(terms)},
    )
