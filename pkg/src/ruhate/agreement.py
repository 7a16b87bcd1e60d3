"""Two-annotator agreement on a binary labelling task.

The unit of analysis is a 2x2 contingency table over a first/second class
pair (Hostile/Neutral at the top level, Hateful/Offensive at the fine
level).  `kappa` computes chance-corrected agreement with a large-sample
standard error and a 95% confidence interval; `table_from_sessions` builds
the table from two annotators' decided label paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from ._util import fmt_fixed

Z_95 = 1.96


class DegenerateTable(ValueError):
    """Chance agreement is 1, so kappa is undefined for this table."""


class CoverageMismatch(ValueError):
    """The two sessions do not cover a usable shared set of comments."""


@dataclass(frozen=True)
class AgreementTable:
    """Counts of paired decisions.

    a: both annotators chose the first class.
    b: annotator 1 first class, annotator 2 second class.
    c: annotator 1 second class, annotator 2 first class.
    d: both chose the second class.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"cell {name} must be a non-negative integer, got {v!r}")
        if self.n < 1:
            raise ValueError("table must contain at least one paired decision")

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d


@dataclass(frozen=True)
class AgreementReport:
    table: AgreementTable
    po: float
    pe: float
    kappa: float
    se: float
    ci_low: float
    ci_high: float


def kappa(table: AgreementTable) -> AgreementReport:
    """Cohen's kappa for a 2x2 table, with SE and 95% CI.

    po = (a+d)/n, pe = ((a+b)(a+c) + (c+d)(b+d))/n^2, kappa = (po-pe)/(1-pe).
    The standard error is the exact large-sample variance of the kappa
    estimate (Fleiss/Cohen/Everitt form), which reduces to 0 at perfect
    agreement; the interval is kappa +/- 1.96*se.
    """
    a, b, c, d, n = table.a, table.b, table.c, table.d, table.n
    po = (a + d) / n
    pe = ((a + b) * (a + c) + (c + d) * (b + d)) / n**2
    if pe == 1.0:
        raise DegenerateTable("chance agreement is 1; kappa undefined")
    k = (po - pe) / (1 - pe)

    p = ((a / n, b / n), (c / n, d / n))
    row = (p[0][0] + p[0][1], p[1][0] + p[1][1])
    col = (p[0][0] + p[1][0], p[0][1] + p[1][1])
    term_diag = sum(
        p[i][i] * ((1 - pe) - (row[i] + col[i]) * (1 - po)) ** 2 for i in range(2)
    )
    term_off = (1 - po) ** 2 * sum(
        p[i][j] * (col[i] + row[j]) ** 2 for i in range(2) for j in range(2) if i != j
    )
    term_center = (po * pe - 2 * pe + po) ** 2
    var = (term_diag + term_off - term_center) / (n * (1 - pe) ** 4)
    se = math.sqrt(max(var, 0.0))
    return AgreementReport(
        table=table,
        po=po,
        pe=pe,
        kappa=k,
        se=se,
        ci_low=k - Z_95 * se,
        ci_high=k + Z_95 * se,
    )


def table_from_sessions(
    a_paths: Mapping[str, object],
    b_paths: Mapping[str, object],
    level: str = "top",
    *,
    allow_partial: bool = False,
) -> AgreementTable:
    """Build the 2x2 table from two annotators' decided paths.

    `a_paths`/`b_paths` map comment id to a decided label path (any object
    with `top` and `fine` attributes).  At level "top" the class pair is
    Hostile/Neutral over every shared comment; at level "fine" it is
    Hateful/Offensive restricted to comments both annotators marked
    Hostile.  Unless `allow_partial`, differing id sets raise
    CoverageMismatch; an empty usable intersection always does.
    """
    if level not in ("top", "fine"):
        raise ValueError(f"unknown agreement level {level!r}")
    ids_a, ids_b = set(a_paths), set(b_paths)
    if not allow_partial and ids_a != ids_b:
        missing = ids_a.symmetric_difference(ids_b)
        raise CoverageMismatch(
            f"sessions cover different comments ({len(missing)} unshared)"
        )
    shared = sorted(ids_a & ids_b)
    if not shared:
        raise CoverageMismatch("sessions share no comments")

    cells = [0, 0, 0, 0]  # a, b, c, d
    for cid in shared:
        pa, pb = a_paths[cid], b_paths[cid]
        if level == "top":
            fa, fb = pa.top == "Hostile", pb.top == "Hostile"
        else:
            if pa.top != "Hostile" or pb.top != "Hostile":
                continue
            fa, fb = pa.fine == "Hateful", pb.fine == "Hateful"
        cells[(0 if fa else 2) + (0 if fb else 1)] += 1
    if sum(cells) == 0:
        raise CoverageMismatch("no comments usable at the requested level")
    return AgreementTable(*cells)


def disagreements(
    a_paths: Mapping[str, object],
    b_paths: Mapping[str, object],
    level: str = "top",
) -> list[tuple[str, str, str]]:
    """Shared comments the two annotators labeled differently at a level.

    Returns (comment_id, a_label, b_label) triples in id order, using the
    same level semantics as table_from_sessions: "top" compares the top
    labels of every shared comment, "fine" compares fine labels over the
    comments both marked Hostile.
    """
    if level not in ("top", "fine"):
        raise ValueError(f"unknown agreement level {level!r}")
    out = []
    for cid in sorted(set(a_paths) & set(b_paths)):
        pa, pb = a_paths[cid], b_paths[cid]
        if level == "top":
            la, lb = pa.top, pb.top
        else:
            if pa.top != "Hostile" or pb.top != "Hostile":
                continue
            la, lb = pa.fine, pb.fine
        if la != lb:
            out.append((cid, la, lb))
    return out


def report_text(report: AgreementReport) -> str:
    """Three-decimal human-readable summary, one row per statistic."""
    t = report.table
    lines = [
        f"n\t{t.n}",
        f"a\t{t.a}",
        f"b\t{t.b}",
        f"c\t{t.c}",
        f"d\t{t.d}",
        f"po\t{fmt_fixed(report.po, 3)}",
        f"pe\t{fmt_fixed(report.pe, 3)}",
        f"kappa\t{fmt_fixed(report.kappa, 3)}",
        f"se\t{fmt_fixed(report.se, 3)}",
        f"ci95\t{fmt_fixed(report.ci_low, 3)} to {fmt_fixed(report.ci_high, 3)}",
    ]
    return "\n".join(lines)
