"""Spelling standardization against a variant lexicon, plus the
classification-time preprocessing chain (case folding, tokenization,
stopword removal, dictionary lemmatization, optional POS tags).

Case policy for standardize: a respelling carries the surface's leading
capital onto its canonical form ("Mai" -> "Main"), while an identity
entry pins the canonical spelling verbatim ("Meri" -> "meri").  Protected
abbreviations are always emitted in their stored uppercase form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence


class CycleError(ValueError):
    """A variant chain loops instead of terminating at a canonical form."""


class UnsettledMap(ValueError):
    """Applying the variant map twice would differ from applying it once."""


@dataclass(frozen=True)
class NormalizationLexicon:
    variants: Mapping[str, str] = field(default_factory=dict)
    stopwords: frozenset[str] = frozenset()
    lemmas: Mapping[str, str] = field(default_factory=dict)
    pos: Mapping[str, str] = field(default_factory=dict)
    protected: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str | None = None

    def __post_init__(self) -> None:
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError(f"bad token surface {self.surface!r}")


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...] = ()

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def surfaces(self) -> tuple[str, ...]:
        return tuple(t.surface for t in self.tokens)

    @property
    def lemmas(self) -> tuple[str, ...]:
        return tuple(t.lemma for t in self.tokens)


@dataclass(frozen=True)
class PreprocessConfig:
    remove_stopwords: bool = True
    collapse_elongations: bool = True


# letter elongations: any letter repeated more than twice collapses to two
_RUN_RE = re.compile(r"([^\W\d_])\1{2,}")
# words are runs of letters/digits, apostrophes allowed inside
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*")


def collapse_runs(text: str) -> str:
    return _RUN_RE.sub(r"\1\1", text)


def _carry_leading_capital(surface: str, canonical: str) -> str:
    if surface[:1].isupper():
        return canonical[:1].upper() + canonical[1:]
    return canonical


def standardize(
    text: str, lex: NormalizationLexicon, collapse_elongations: bool = True
) -> str:
    """Replace each whitespace token by its canonical spelling.

    Token count is preserved; tokens without a lexicon entry pass through
    unchanged.
    """
    if collapse_elongations:
        text = collapse_runs(text)
    protected_by_lower = {p.lower(): p for p in lex.protected}
    out = []
    for tok in text.split():
        low = tok.lower()
        stored = protected_by_lower.get(low)
        if stored is not None:
            out.append(stored)
            continue
        canonical = lex.variants.get(low)
        if canonical is None:
            out.append(tok)
        elif canonical == low:
            out.append(canonical)
        else:
            out.append(_carry_leading_capital(tok, canonical))
    return " ".join(out)


def preprocess(
    text: str, lex: NormalizationLexicon, cfg: PreprocessConfig | None = None
) -> TokenStream:
    """Lowercase, tokenize, drop stopwords, attach lemmas and POS tags."""
    cfg = cfg or PreprocessConfig()
    if cfg.collapse_elongations:
        text = collapse_runs(text)
    protected_by_lower = {p.lower(): p for p in lex.protected}
    tokens: list[Token] = []
    for match in _TOKEN_RE.finditer(text):
        word = match.group(0)
        low = word.lower()
        surface = protected_by_lower.get(low, low)
        if cfg.remove_stopwords and low in lex.stopwords:
            continue
        lemma = lex.lemmas.get(low, surface)
        tokens.append(Token(surface=surface, lemma=lemma, pos=lex.pos.get(low)))
    return TokenStream(tuple(tokens))


# --------------------------------------------------------------------------
# lexicon construction and validation
# --------------------------------------------------------------------------

def _validate_lexicon(lex: NormalizationLexicon) -> None:
    protected_lower = {p.lower() for p in lex.protected}
    for k, v in lex.variants.items():
        if k.lower() != k and k.lower() not in protected_lower:
            raise ValueError(f"variant key {k!r} is not lowercase")
        if v.lower() != v and v.lower() not in protected_lower:
            raise ValueError(f"canonical {v!r} is not lowercase")
    # cycle check: follow chains through the map
    for start in lex.variants:
        seen = {start}
        cur = lex.variants[start]
        while cur in lex.variants and lex.variants[cur] != cur:
            if cur in seen:
                raise CycleError(f"variant chain starting at {start!r} loops")
            seen.add(cur)
            cur = lex.variants[cur]
    for k, v in lex.variants.items():
        if k == v:
            continue
        target = lex.variants.get(v)
        if target is not None and target != v:
            raise UnsettledMap(f"{k!r} -> {v!r} but {v!r} re-maps to {target!r}")
        if target == v:
            # the identity entry would lowercase a carried capital on the
            # second pass, breaking standardize idempotence
            raise UnsettledMap(
                f"{v!r} is both a respelling target and an identity key"
            )


def lexicon_vocabulary(lex: NormalizationLexicon) -> set[str]:
    vocab: set[str] = set()
    vocab.update(lex.variants.keys())
    vocab.update(lex.variants.values())
    vocab.update(lex.stopwords)
    vocab.update(lex.lemmas.keys())
    vocab.update(lex.lemmas.values())
    vocab.update(p.lower() for p in lex.protected)
    return {v.lower() for v in vocab}


def build_lexicon(
    corpus: Iterable[str], seed: NormalizationLexicon
) -> tuple[NormalizationLexicon, list[tuple[str, int]]]:
    """Validate the seed map and rank corpus tokens it does not cover."""
    _validate_lexicon(seed)
    known = lexicon_vocabulary(seed)
    counts: dict[str, int] = {}
    for text in corpus:
        for match in _TOKEN_RE.finditer(text):
            low = match.group(0).lower()
            if low not in known:
                counts[low] = counts.get(low, 0) + 1
    uncovered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return seed, uncovered


# --------------------------------------------------------------------------
# file formats
# --------------------------------------------------------------------------

def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [
            line.rstrip("\n")
            for line in fh
            if line.strip() and not line.startswith("#")
        ]


def _read_pairs(path) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for line in _read_lines(path):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"{path}: expected 'token<TAB>token', got {line!r}")
        pairs[parts[0]] = parts[1]
    return pairs


def load_lexicon(
    variants_path=None,
    stopwords_path=None,
    lemmas_path=None,
    pos_path=None,
    protected_path=None,
) -> NormalizationLexicon:
    lex = NormalizationLexicon(
        variants=_read_pairs(variants_path) if variants_path else {},
        stopwords=frozenset(_read_lines(stopwords_path)) if stopwords_path else frozenset(),
        lemmas=_read_pairs(lemmas_path) if lemmas_path else {},
        pos=_read_pairs(pos_path) if pos_path else {},
        protected=frozenset(_read_lines(protected_path)) if protected_path else frozenset(),
    )
    _validate_lexicon(lex)
    return lex


def save_variants(variants: Mapping[str, str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for k in sorted(variants):
            fh.write(f"{k}\t{variants[k]}\n")


def default_lexicon() -> NormalizationLexicon:
    """The packaged seed lexicon."""
    data = resources.files("ruhate") / "data"
    return load_lexicon(
        variants_path=data / "variants.tsv",
        stopwords_path=data / "stopwords.txt",
        lemmas_path=data / "lemmas.tsv",
        protected_path=data / "protected.txt",
    )
