"""Labeled-corpus data model, its TSV format, and composition statistics.

A label is a path through the three-level taxonomy: Neutral or Hostile at
the top, Hostile splitting into Simple or Complex structure, and both
structures splitting into Hateful or Offensive.  The rule ids recorded on
a path are the guideline rules the annotator invoked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ._util import int_percent

TOP_LABELS = ("Neutral", "Hostile")
STRUCTURES = ("Simple", "Complex")
FINE_LABELS = ("Hateful", "Offensive")

_RULE_BLOCKS = ("N", "H", "S", "C", "SH", "SO", "CH", "CO")
RULE_IDS: frozenset[str] = frozenset(
    f"{block}{i}" for block in _RULE_BLOCKS for i in (1, 2, 3)
)

# which rule blocks may justify the fine label under each structure
_FINE_BLOCKS = {"Simple": ("SH", "SO"), "Complex": ("CH", "CO")}


def rule_block(rule_id: str) -> str:
    return rule_id.rstrip("123")


class SchemaError(ValueError):
    def __init__(self, line_no: int, column: str, detail: str):
        self.line_no = line_no
        self.column = column
        super().__init__(f"line {line_no}, column {column}: {detail}")


@dataclass(frozen=True)
class LabelPath:
    top: str
    structure: str | None = None
    fine: str | None = None
    rules: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.top not in TOP_LABELS:
            raise ValueError(f"top must be one of {TOP_LABELS}, got {self.top!r}")
        unknown = [r for r in self.rules if r not in RULE_IDS]
        if unknown:
            raise ValueError(f"unknown rule ids {unknown}")
        if len(set(self.rules)) != len(self.rules):
            raise ValueError("duplicate rule ids")
        if self.top == "Neutral":
            if self.structure is not None or self.fine is not None:
                raise ValueError("Neutral paths carry no structure or fine label")
            bad = [r for r in self.rules if rule_block(r) != "N"]
            if bad:
                raise ValueError(f"Neutral paths only cite N rules, got {bad}")
            return
        if self.structure not in STRUCTURES:
            raise ValueError("Hostile paths need structure Simple or Complex")
        if self.fine not in FINE_LABELS:
            raise ValueError("Hostile paths need fine label Hateful or Offensive")
        allowed_fine = _FINE_BLOCKS[self.structure]
        fine_rules = [r for r in self.rules if rule_block(r) in ("SH", "SO", "CH", "CO")]
        misplaced = [r for r in fine_rules if rule_block(r) not in allowed_fine]
        if misplaced:
            raise ValueError(
                f"{self.structure} paths cannot cite {misplaced}"
            )
        hateful_rules = [r for r in fine_rules if rule_block(r).endswith("H")]
        offensive_rules = [r for r in fine_rules if rule_block(r).endswith("O")]
        if self.fine == "Hateful" and not hateful_rules:
            raise ValueError("Hateful label needs at least one hateful-stage rule")
        if self.fine == "Offensive":
            if hateful_rules:
                raise ValueError(
                    "hateful-stage rules force the Hateful label (superior class)"
                )
            if not offensive_rules:
                raise ValueError("Offensive label needs at least one offensive-stage rule")


@dataclass(frozen=True)
class LabeledComment:
    id: str
    text: str
    path: LabelPath
    annotator: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("empty id")
        if not self.text:
            raise ValueError("empty text")
        if not self.annotator:
            raise ValueError("empty annotator")


# --------------------------------------------------------------------------
# composition statistics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusStats:
    total: int
    neutral: int
    hostile: int
    simple: int
    complex: int
    hateful: int
    offensive: int
    simple_hateful: int
    simple_offensive: int
    complex_hateful: int
    complex_offensive: int

    def __post_init__(self) -> None:
        checks = [
            ("neutral + hostile", self.neutral + self.hostile, self.total),
            ("simple + complex", self.simple + self.complex, self.hostile),
            ("hateful + offensive", self.hateful + self.offensive, self.hostile),
            ("simple cells", self.simple_hateful + self.simple_offensive, self.simple),
            ("complex cells", self.complex_hateful + self.complex_offensive, self.complex),
        ]
        for name, got, want in checks:
            if got != want:
                raise ValueError(f"{name} = {got}, expected {want}")

    @property
    def neutral_percent(self) -> int:
        return int_percent(self.neutral, self.total)

    @property
    def hostile_percent(self) -> int:
        return int_percent(self.hostile, self.total)

    @property
    def simple_percent(self) -> int:
        return int_percent(self.simple, self.hostile)

    @property
    def complex_percent(self) -> int:
        return int_percent(self.complex, self.hostile)

    @property
    def hateful_percent(self) -> int:
        return int_percent(self.hateful, self.hostile)

    @property
    def offensive_percent(self) -> int:
        return int_percent(self.offensive, self.hostile)


def stats(corpus: Sequence[LabeledComment]) -> CorpusStats:
    neutral = hostile = 0
    cells = {("Simple", "Hateful"): 0, ("Simple", "Offensive"): 0,
             ("Complex", "Hateful"): 0, ("Complex", "Offensive"): 0}
    for c in corpus:
        if c.path.top == "Neutral":
            neutral += 1
        else:
            hostile += 1
            cells[(c.path.structure, c.path.fine)] += 1
    sh = cells[("Simple", "Hateful")]
    so = cells[("Simple", "Offensive")]
    ch = cells[("Complex", "Hateful")]
    co = cells[("Complex", "Offensive")]
    return CorpusStats(
        total=neutral + hostile,
        neutral=neutral,
        hostile=hostile,
        simple=sh + so,
        complex=ch + co,
        hateful=sh + ch,
        offensive=so + co,
        simple_hateful=sh,
        simple_offensive=so,
        complex_hateful=ch,
        complex_offensive=co,
    )


def stats_text(s: CorpusStats) -> str:
    lines = [
        f"total\t{s.total}",
        f"neutral\t{s.neutral}\t{s.neutral_percent}%",
        f"hostile\t{s.hostile}\t{s.hostile_percent}%",
        f"simple\t{s.simple}\t{s.simple_percent}%",
        f"complex\t{s.complex}\t{s.complex_percent}%",
        f"hateful\t{s.hateful}\t{s.hateful_percent}%",
        f"offensive\t{s.offensive}\t{s.offensive_percent}%",
        f"simple_hateful\t{s.simple_hateful}",
        f"simple_offensive\t{s.simple_offensive}",
        f"complex_hateful\t{s.complex_hateful}",
        f"complex_offensive\t{s.complex_offensive}",
        "# percentages computed from the counts above",
    ]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# TSV format
# --------------------------------------------------------------------------

HEADER = "id\ttext\ttop\tstructure\tfine\trules\tannotator"

_TOP_CODE = {"Neutral": "N", "Hostile": "H"}
_STRUCT_CODE = {"Simple": "S", "Complex": "C", None: "-"}
_FINE_CODE = {"Hateful": "HATE", "Offensive": "OFF", None: "-"}
_TOP_FROM = {v: k for k, v in _TOP_CODE.items()}
_STRUCT_FROM = {v: k for k, v in _STRUCT_CODE.items()}
_FINE_FROM = {v: k for k, v in _FINE_CODE.items()}


def save_tsv(corpus: Sequence[LabeledComment], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(HEADER + "\n")
        for c in corpus:
            for col, value in (("id", c.id), ("text", c.text), ("annotator", c.annotator)):
                if "\t" in value or "\n" in value:
                    raise ValueError(f"{col} contains tab or newline: {value!r}")
            fh.write(
                "\t".join(
                    [
                        c.id,
                        c.text,
                        _TOP_CODE[c.path.top],
                        _STRUCT_CODE[c.path.structure],
                        _FINE_CODE[c.path.fine],
                        ",".join(c.path.rules),
                        c.annotator,
                    ]
                )
                + "\n"
            )


def load_tsv(path) -> list[LabeledComment]:
    corpus: list[LabeledComment] = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != HEADER:
        raise SchemaError(1, "header", f"expected {HEADER!r}")
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 7:
            raise SchemaError(line_no, "row", f"expected 7 columns, got {len(parts)}")
        cid, text, top_code, struct_code, fine_code, rules_col, annotator = parts
        if top_code not in _TOP_FROM:
            raise SchemaError(line_no, "top", f"unknown code {top_code!r}")
        if struct_code not in _STRUCT_FROM:
            raise SchemaError(line_no, "structure", f"unknown code {struct_code!r}")
        if fine_code not in _FINE_FROM:
            raise SchemaError(line_no, "fine", f"unknown code {fine_code!r}")
        rules = tuple(r for r in rules_col.split(",") if r)
        bad = [r for r in rules if r not in RULE_IDS]
        if bad:
            raise SchemaError(line_no, "rules", f"unknown rule ids {bad}")
        try:
            path_obj = LabelPath(
                top=_TOP_FROM[top_code],
                structure=_STRUCT_FROM[struct_code],
                fine=_FINE_FROM[fine_code],
                rules=rules,
            )
            comment = LabeledComment(id=cid, text=text, path=path_obj, annotator=annotator)
        except ValueError as exc:
            raise SchemaError(line_no, "path", str(exc)) from exc
        corpus.append(comment)
    return corpus
