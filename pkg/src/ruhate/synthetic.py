"""Seeded generator of separable labeled corpora for demos and smoke tests.

Documents are bags of tokens drawn from three disjoint keyword pools
(neutral, offensive, hateful) mixed with a shared noise pool.  The class
signal is strong enough for any reasonable classifier while the noise keeps
documents from being duplicates of each other.
"""

from __future__ import annotations

import random

from .corpus import LabelPath, LabeledComment

NEUTRAL_WORDS = (
    "mausam", "barish", "chai", "cricket", "match", "khana", "safar",
    "kitab", "gana", "mehman", "subah", "shaam", "bazar", "school",
    "dost", "mubarak",
)

OFFENSIVE_WORDS = (
    "bakwas", "ghatiya", "besharam", "badtameez", "nikamma", "jahil",
    "paagal", "bewakoof",
)

HATEFUL_WORDS = (
    "nafrat", "dushman", "zalim", "gaddar", "laanat", "qatil",
    "khooni", "daraar",
)

NOISE_WORDS = (
    "hai", "hain", "ka", "ki", "ke", "ko", "se", "per", "aur", "ye",
    "woh", "log", "aj", "din", "raat", "baat", "kaam", "waqt", "sab",
    "kuch", "phir", "abhi", "yahan", "wahan", "bohut", "thora",
    "bilkul", "shayad", "zaroor", "lekin",
)

# fine label -> (keyword pool, decided path)
_CLASSES = {
    "Neutral": (NEUTRAL_WORDS, LabelPath("Neutral", rules=("N1",))),
    "Offensive": (
        OFFENSIVE_WORDS,
        LabelPath("Hostile", "Simple", "Offensive", ("H2", "S1", "SO1")),
    ),
    "Hateful": (
        HATEFUL_WORDS,
        LabelPath("Hostile", "Simple", "Hateful", ("H1", "S1", "SH1")),
    ),
}


def _document(rng: random.Random, keywords: tuple[str, ...]) -> str:
    length = rng.randint(6, 12)
    n_keys = rng.randint(2, 4)
    tokens = [rng.choice(keywords) for _ in range(n_keys)]
    tokens += [rng.choice(NOISE_WORDS) for _ in range(length - n_keys)]
    rng.shuffle(tokens)
    return " ".join(tokens)


def corpus(n: int = 1000, seed: int = 42, hostile_fraction: float = 0.5) -> list[LabeledComment]:
    """Fully labeled synthetic comments, reproducible from the seed.

    Hostile rows split evenly between Hateful and Offensive so both the
    top-level and the fine-grained task are learnable from the same corpus.
    """
    if n < 4:
        raise ValueError("need at least 4 comments to cover both classes")
    if not 0.0 < hostile_fraction < 1.0:
        raise ValueError("hostile_fraction must be in (0, 1)")
    rng = random.Random(seed)
    n_hostile = max(2, round(n * hostile_fraction))
    n_hateful = n_hostile // 2
    fine = (
        ["Hateful"] * n_hateful
        + ["Offensive"] * (n_hostile - n_hateful)
        + ["Neutral"] * (n - n_hostile)
    )
    rng.shuffle(fine)
    width = len(str(n))
    out = []
    for i, label in enumerate(fine):
        keywords, path = _CLASSES[label]
        out.append(
            LabeledComment(
                id=f"s{i + 1:0{width}d}",
                text=_document(rng, keywords),
                path=path,
                annotator="synthetic",
            )
        )
    return out


def generate(n: int = 1000, seed: int = 42, hostile_fraction: float = 0.5) -> tuple[list[str], list[str]]:
    """(documents, top-level labels) with labels in {"Hostile", "Neutral"}."""
    comments = corpus(n, seed, hostile_fraction)
    return [c.text for c in comments], [c.path.top for c in comments]
