from __future__ import annotations

import math
from dataclasses import dataclass

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruhate.agreement import (
    AgreementReport,
    AgreementTable,
    CoverageMismatch,
    DegenerateTable,
    disagreements,
    kappa,
    report_text,
    table_from_sessions,
)


@dataclass
class Path:
    top: str
    fine: str | None = None


def test_hostile_neutral_table_matches_frozen_values():
    r = kappa(AgreementTable(393, 7, 13, 87))
    assert r.po == pytest.approx(0.9600, abs=1e-12)
    assert r.pe == pytest.approx(0.6872, abs=1e-12)
    assert r.kappa == pytest.approx(0.872, abs=5e-4)
    assert r.se == pytest.approx(0.028, abs=1e-3)
    assert r.ci_low == pytest.approx(0.817, abs=1e-3)
    assert r.ci_high == pytest.approx(0.927, abs=1e-3)


def test_hateful_offensive_table_matches_frozen_values():
    r = kappa(AgreementTable(15, 7, 2, 76))
    assert r.po == pytest.approx(0.9100, abs=1e-12)
    assert r.pe == pytest.approx(0.6848, abs=1e-12)
    assert r.kappa == pytest.approx(0.714, abs=1e-3)
    assert r.se == pytest.approx(0.089, abs=2e-3)
    assert r.ci_low == pytest.approx(0.541, abs=3e-3)
    assert r.ci_high == pytest.approx(0.888, abs=3e-3)


def test_perfect_agreement_gives_kappa_one_and_zero_se():
    r = kappa(AgreementTable(40, 0, 0, 60))
    assert r.kappa == pytest.approx(1.0)
    assert r.se == pytest.approx(0.0, abs=1e-12)


def test_degenerate_table_raises():
    with pytest.raises(DegenerateTable):
        kappa(AgreementTable(50, 0, 0, 0))


def test_cell_validation():
    with pytest.raises(ValueError):
        AgreementTable(-1, 0, 0, 5)
    with pytest.raises(ValueError):
        AgreementTable(0, 0, 0, 0)


cells = st.integers(min_value=0, max_value=200)


@given(cells, cells, cells, cells)
def test_swapping_annotators_leaves_all_statistics_unchanged(a, b, c, d):
    if a + b + c + d == 0:
        return
    t1, t2 = AgreementTable(a, b, c, d), AgreementTable(a, c, b, d)
    try:
        r1 = kappa(t1)
    except DegenerateTable:
        with pytest.raises(DegenerateTable):
            kappa(t2)
        return
    r2 = kappa(t2)
    for field in ("po", "pe", "kappa", "se", "ci_low", "ci_high"):
        assert getattr(r1, field) == pytest.approx(getattr(r2, field), abs=1e-12)


@given(cells, cells, cells, cells, st.integers(min_value=2, max_value=9))
def test_scaling_counts_preserves_kappa_and_shrinks_se(a, b, c, d, k):
    if a + b + c + d == 0:
        return
    try:
        r1 = kappa(AgreementTable(a, b, c, d))
    except DegenerateTable:
        return
    r2 = kappa(AgreementTable(a * k, b * k, c * k, d * k))
    assert r2.po == pytest.approx(r1.po, abs=1e-12)
    assert r2.pe == pytest.approx(r1.pe, abs=1e-12)
    assert r2.kappa == pytest.approx(r1.kappa, abs=1e-12)
    assert r2.se == pytest.approx(r1.se / math.sqrt(k), rel=1e-9)


def _enumeration_oracle(a, b, c, d):
    # Lay out the paired decisions explicitly and count agreement directly.
    pairs = [(1, 1)] * a + [(1, 0)] * b + [(0, 1)] * c + [(0, 0)] * d
    n = len(pairs)
    po = sum(1 for x, y in pairs if x == y) / n
    pe = 0.0
    for cls in (0, 1):
        pa = sum(1 for x, _ in pairs if x == cls) / n
        pb = sum(1 for _, y in pairs if y == cls) / n
        pe += pa * pb
    return po, pe


def test_kappa_matches_enumeration_oracle_for_all_small_tables():
    checked = 0
    for n in range(1, 21):
        for a in range(n + 1):
            for b in range(n - a + 1):
                for c in range(n - a - b + 1):
                    d = n - a - b - c
                    po, pe = _enumeration_oracle(a, b, c, d)
                    if pe == 1.0:
                        with pytest.raises(DegenerateTable):
                            kappa(AgreementTable(a, b, c, d))
                        continue
                    r = kappa(AgreementTable(a, b, c, d))
                    expect = (po - pe) / (1 - pe)
                    assert r.kappa == pytest.approx(expect, abs=1e-12)
                    checked += 1
    assert checked > 1000


def test_table_from_sessions_top_level():
    a = {f"c{i}": Path("Hostile") for i in range(3)}
    a["c3"] = Path("Neutral")
    b = {f"c{i}": Path("Hostile") for i in range(2)}
    b["c2"] = Path("Neutral")
    b["c3"] = Path("Neutral")
    t = table_from_sessions(a, b, "top")
    assert (t.a, t.b, t.c, t.d) == (2, 1, 0, 1)


def test_table_from_sessions_fine_restricted_to_shared_hostile():
    a = {
        "c0": Path("Hostile", "Hateful"),
        "c1": Path("Hostile", "Offensive"),
        "c2": Path("Neutral"),
        "c3": Path("Hostile", "Hateful"),
    }
    b = {
        "c0": Path("Hostile", "Hateful"),
        "c1": Path("Hostile", "Hateful"),
        "c2": Path("Hostile", "Offensive"),  # only one side hostile: excluded
        "c3": Path("Hostile", "Offensive"),
    }
    t = table_from_sessions(a, b, "fine")
    assert t.n == 3
    assert (t.a, t.b, t.c, t.d) == (1, 1, 1, 0)


def test_table_from_sessions_coverage_mismatch():
    a = {"c0": Path("Hostile"), "c1": Path("Neutral")}
    b = {"c0": Path("Hostile"), "c2": Path("Neutral")}
    with pytest.raises(CoverageMismatch):
        table_from_sessions(a, b, "top")
    t = table_from_sessions(a, b, "top", allow_partial=True)
    assert t.n == 1
    with pytest.raises(CoverageMismatch):
        table_from_sessions({"x": Path("Hostile")}, {"y": Path("Hostile")}, "top", allow_partial=True)


def test_table_from_sessions_fine_with_no_shared_hostile():
    a = {"c0": Path("Neutral")}
    b = {"c0": Path("Neutral")}
    with pytest.raises(CoverageMismatch):
        table_from_sessions(a, b, "fine")


def test_disagreements_lists_differing_pairs_in_id_order():
    a = {
        "c0": Path("Hostile", "Hateful"),
        "c1": Path("Hostile", "Offensive"),
        "c2": Path("Neutral"),
        "c3": Path("Hostile", "Hateful"),
    }
    b = {
        "c0": Path("Hostile", "Hateful"),
        "c1": Path("Hostile", "Hateful"),
        "c2": Path("Hostile", "Offensive"),
        "c3": Path("Hostile", "Offensive"),
    }
    assert disagreements(a, b, "top") == [("c2", "Neutral", "Hostile")]
    assert disagreements(a, b, "fine") == [
        ("c1", "Offensive", "Hateful"),
        ("c3", "Hateful", "Offensive"),
    ]
    assert disagreements(a, a, "top") == []
    with pytest.raises(ValueError):
        disagreements(a, b, "structure")


def test_report_text_three_decimal_rendering():
    text = report_text(kappa(AgreementTable(15, 7, 2, 76)))
    assert "kappa\t0.714" in text
    assert "se\t0.089" in text
    assert "ci95\t0.541 to 0.888" in text


def test_unknown_level_rejected():
    with pytest.raises(ValueError):
        table_from_sessions({}, {}, "structure")
