"""Metric formulas against exact-fraction oracles, fold plan laws, known
published confusion rows, leakage control, and report rendering."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ruhate.eval as ev
from ruhate.eval import (
    FoldPlan,
    TooFewExamples,
    UnknownReasonCode,
    accuracy_table,
    confusion,
    cross_validate,
    error_report_tsv,
    fold_metric_table,
    make_folds,
    metrics,
    report_tsv,
    single_holdout,
    tag_errors,
)
from ruhate.features import FeatureConfig

# Published per-fold confusion counts for the top-level split (logistic
# regression over raw counts), with the P/R/F1 each row should reproduce
# to within half a thousandth.
TOP_LEVEL_FOLDS = [
    (4160, 500, 110, 230, 0.893, 0.974, 0.932),
    (3940, 590, 40, 430, 0.870, 0.990, 0.926),
    (3710, 690, 200, 400, 0.843, 0.949, 0.893),
    (4030, 460, 200, 310, 0.898, 0.953, 0.924),
    (4060, 610, 110, 220, 0.869, 0.974, 0.919),
    (3720, 560, 370, 350, 0.869, 0.910, 0.889),
    (3760, 780, 90, 370, 0.828, 0.977, 0.896),
    (3880, 690, 90, 430, 0.849, 0.977, 0.909),
    (3640, 490, 480, 390, 0.881, 0.883, 0.882),
    (3710, 700, 260, 330, 0.841, 0.935, 0.885),
]
TOP_LEVEL_MEAN_F1 = 0.906

FINE_FOLDS = [
    (880, 60, 700, 2150, 0.936, 0.557, 0.698),
    (980, 120, 620, 2070, 0.891, 0.613, 0.726),
    (690, 120, 370, 2610, 0.852, 0.651, 0.738),
    (750, 170, 390, 2480, 0.815, 0.658, 0.728),
    (630, 170, 390, 2600, 0.788, 0.618, 0.692),
    (890, 200, 290, 2410, 0.817, 0.754, 0.784),
    (580, 70, 200, 2940, 0.892, 0.744, 0.811),
    (810, 240, 250, 2490, 0.771, 0.764, 0.768),
    (690, 80, 250, 1770, 0.896, 0.734, 0.807),
    (622, 60, 228, 1880, 0.912, 0.732, 0.812),
]
FINE_MEAN_F1 = 0.756

TOL = 0.0005 + 1e-9


def oracle_metrics(tp, fp, fn, tn):
    """Exact-fraction recomputation, independent of the implementation."""
    p = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
    r = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    f = 2 * p * r / (p + r) if p + r else Fraction(0)
    total = tp + fp + fn + tn
    a = Fraction(tp + tn, total) if total else Fraction(0)
    return float(p), float(r), float(f), float(a)


class TestMetrics:
    def test_exhaustive_small_grid_matches_fraction_oracle(self):
        checked = 0
        for tp in range(7):
            for fp in range(7):
                for fn in range(7):
                    for tn in range(7):
                        m = metrics(tp, fp, fn, tn)
                        p, r, f, a = oracle_metrics(tp, fp, fn, tn)
                        assert m.precision == pytest.approx(p, abs=1e-12)
                        assert m.recall == pytest.approx(r, abs=1e-12)
                        assert m.f1 == pytest.approx(f, abs=1e-12)
                        assert m.accuracy == pytest.approx(a, abs=1e-12)
                        checked += 1
        assert checked == 7**4

    def test_zero_denominators_flagged(self):
        m = metrics(0, 0, 0, 0)
        assert (m.precision, m.recall, m.f1, m.accuracy) == (0.0, 0.0, 0.0, 0.0)
        assert set(m.zero_guarded) == {"precision", "recall", "f1", "accuracy"}
        m = metrics(0, 0, 3, 5)
        assert "precision" in m.zero_guarded
        assert "recall" not in m.zero_guarded

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            metrics(-1, 0, 0, 0)

    @pytest.mark.parametrize("row", TOP_LEVEL_FOLDS)
    def test_top_level_rows_reproduce(self, row):
        tp, fp, fn, tn, p, r, f = row
        m = metrics(tp, fp, fn, tn)
        assert abs(m.precision - p) <= TOL
        assert abs(m.recall - r) <= TOL
        assert abs(m.f1 - f) <= TOL

    @pytest.mark.parametrize("row", FINE_FOLDS)
    def test_fine_rows_reproduce(self, row):
        tp, fp, fn, tn, p, r, f = row
        m = metrics(tp, fp, fn, tn)
        assert abs(m.precision - p) <= TOL
        assert abs(m.recall - r) <= TOL
        assert abs(m.f1 - f) <= TOL

    def test_mean_f1_across_published_folds(self):
        top = np.mean([metrics(*r[:4]).f1 for r in TOP_LEVEL_FOLDS])
        fine = np.mean([metrics(*r[:4]).f1 for r in FINE_FOLDS])
        assert abs(top - TOP_LEVEL_MEAN_F1) <= TOL
        assert abs(fine - FINE_MEAN_F1) <= TOL

    def test_confusion_by_enumeration(self):
        labels = ["P", "N"]
        for n in range(5):
            for true_bits in range(2**n):
                for pred_bits in range(2**n):
                    y_true = [labels[(true_bits >> i) & 1] for i in range(n)]
                    y_pred = [labels[(pred_bits >> i) & 1] for i in range(n)]
                    tp, fp, fn, tn = confusion(y_true, y_pred, "P")
                    assert tp == sum(t == "P" and p == "P" for t, p in zip(y_true, y_pred))
                    assert fp == sum(t == "N" and p == "P" for t, p in zip(y_true, y_pred))
                    assert fn == sum(t == "P" and p == "N" for t, p in zip(y_true, y_pred))
                    assert tn == sum(t == "N" and p == "N" for t, p in zip(y_true, y_pred))

    def test_confusion_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion(["P"], ["P", "N"], "P")


# --------------------------------------------------------------------------
# fold plans
# --------------------------------------------------------------------------

label_lists = st.lists(st.sampled_from(["x", "y"]), min_size=8, max_size=60).filter(
    lambda ls: min(ls.count("x"), ls.count("y")) >= 4
)


class TestFolds:
    @given(labels=label_lists, k=st.integers(2, 4), seed=st.integers(0, 500))
    @settings(max_examples=200, deadline=None)
    def test_partition_and_stratification(self, labels, k, seed):
        if min(labels.count("x"), labels.count("y")) < k:
            return
        plan = make_folds(labels, k, seed)
        assigned = np.array(plan.assignments)
        assert len(assigned) == len(labels)
        assert set(assigned) <= set(range(k))
        # partition: each index in exactly one fold, folds cover everything
        covered = np.concatenate([plan.fold_indices(f) for f in range(k)])
        assert sorted(covered.tolist()) == list(range(len(labels)))
        # stratification: per-class fold counts within one of each other
        for cls in ("x", "y"):
            counts = [
                sum(1 for i in plan.fold_indices(f) if labels[i] == cls)
                for f in range(k)
            ]
            assert max(counts) - min(counts) <= 1

    def test_train_and_test_disjoint_and_complete(self):
        labels = ["x"] * 10 + ["y"] * 10
        plan = make_folds(labels, 5, seed=42)
        for f in range(5):
            tr = set(plan.train_indices(f).tolist())
            te = set(plan.fold_indices(f).tolist())
            assert tr & te == set()
            assert tr | te == set(range(20))

    def test_same_seed_identical_plan(self):
        labels = ["x", "y"] * 20
        assert make_folds(labels, 10, 7) == make_folds(labels, 10, 7)

    def test_different_seed_shuffles(self):
        labels = ["x", "y"] * 50
        a = make_folds(labels, 10, 1).assignments
        b = make_folds(labels, 10, 2).assignments
        assert a != b

    def test_too_few_examples(self):
        with pytest.raises(TooFewExamples):
            make_folds(["x", "x", "y"], 2, 0)

    def test_k_below_two_rejected(self):
        with pytest.raises(ValueError):
            make_folds(["x", "y"], 1, 0)

    def test_single_holdout_mirrors_one_fold(self):
        labels = ["x"] * 30 + ["y"] * 20
        train, test = single_holdout(labels, seed=3, test_fraction=0.1)
        assert set(train.tolist()) & set(test.tolist()) == set()
        assert len(train) + len(test) == 50
        assert len(test) == 5
        test_labels = [labels[i] for i in test]
        assert test_labels.count("x") == 3
        assert test_labels.count("y") == 2


# --------------------------------------------------------------------------
# cross-validation
# --------------------------------------------------------------------------

def synthetic_corpus(n=120, seed=0):
    """Separable two-class corpus over disjoint keyword sets plus noise."""
    rng = np.random.default_rng(seed)
    pos_words = ["alpha", "beta", "gamma"]
    neg_words = ["delta", "epsilon", "zeta"]
    noise = ["lorem", "ipsum", "dolor", "sit"]
    docs, labels = [], []
    for i in range(n):
        pos = i % 2 == 0
        pool = pos_words if pos else neg_words
        toks = list(rng.choice(pool, size=3)) + list(rng.choice(noise, size=2))
        rng.shuffle(toks)
        docs.append(" ".join(toks))
        labels.append("hit" if pos else "miss")
    return docs, labels


class TestCrossValidate:
    def test_separable_corpus_scores_high(self):
        docs, labels = synthetic_corpus()
        plan = make_folds(labels, 5, seed=42)
        report = cross_validate(
            docs,
            labels,
            feature_config=FeatureConfig(mode="word"),
            scheme="count",
            classifier="nb",
            plan=plan,
            positive_label="hit",
            feature_code="cv",
        )
        assert report.k == 5
        assert len(report.folds) == 5
        assert sum(f.test_size for f in report.folds) == len(docs)
        assert report.mean_accuracy >= 0.95

    def test_vocabulary_never_sees_test_docs(self, monkeypatch):
        docs, labels = synthetic_corpus(n=40)
        plan = make_folds(labels, 4, seed=1)
        seen: list[tuple] = []
        real_fit = ev.fit_vocabulary

        def spy(train_docs, cfg):
            seen.append(tuple(train_docs))
            return real_fit(train_docs, cfg)

        monkeypatch.setattr(ev, "fit_vocabulary", spy)
        cross_validate(
            docs,
            labels,
            feature_config=FeatureConfig(mode="word"),
            scheme="tfidf",
            classifier="nb",
            plan=plan,
            positive_label="hit",
        )
        assert len(seen) == 4
        for fold, fitted in enumerate(seen):
            train_expected = tuple(docs[i] for i in plan.train_indices(fold))
            assert fitted == train_expected

    def test_plan_corpus_size_mismatch_rejected(self):
        docs, labels = synthetic_corpus(n=20)
        plan = make_folds(labels, 2, seed=0)
        with pytest.raises(ValueError):
            cross_validate(
                docs[:-1],
                labels[:-1],
                feature_config=FeatureConfig(mode="word"),
                scheme="count",
                classifier="nb",
                plan=plan,
                positive_label="hit",
            )

    def test_absent_positive_label_rejected(self):
        docs, labels = synthetic_corpus(n=20)
        plan = make_folds(labels, 2, seed=0)
        with pytest.raises(ValueError):
            cross_validate(
                docs,
                labels,
                feature_config=FeatureConfig(mode="word"),
                scheme="count",
                classifier="nb",
                plan=plan,
                positive_label="nothere",
            )


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------

class TestRendering:
    def _report(self):
        folds = []
        for i, (tp, fp, fn, tn, *_rest) in enumerate(FINE_FOLDS):
            m = metrics(tp, fp, fn, tn)
            folds.append(
                ev.FoldReport(i, tp, fp, fn, tn, m.precision, m.recall, m.f1, m.accuracy)
            )
        return ev.RunReport(
            classifier="lr",
            feature_code="cv",
            positive_label="Hateful",
            k=10,
            seed=42,
            folds=tuple(folds),
            config_echo=(("seed", "42"), ("k", "10")),
        )

    def test_tsv_rounds_half_up(self):
        text = report_tsv(self._report())
        lines = text.splitlines()
        assert lines[0] == "# seed = 42"
        assert lines[1] == "# k = 10"
        # fold 5 precision is exactly 630/800 = 0.7875, displayed 0.788
        row5 = lines[2 + 5].split("\t")
        assert row5[0] == "5"
        assert row5[5] == "0.788"

    def test_fold_metric_table_mean(self):
        text = fold_metric_table(self._report())
        assert text.splitlines()[-1].split()[-1] == "0.756"

    def test_accuracy_table_layout(self):
        r = self._report()
        text = accuracy_table([r])
        lines = text.splitlines()
        assert lines[0].split() == ["classifier", "features"] + [str(i) for i in range(1, 11)] + ["mean"]
        cells = lines[1].split()
        assert cells[0] == "LR"
        assert cells[1] == "CV"
        assert len(cells) == 13

    def test_empty_table(self):
        assert accuracy_table([]) == ""


# --------------------------------------------------------------------------
# reason tagging
# --------------------------------------------------------------------------

class TestReasonTags:
    def test_codes_are_the_published_ten(self):
        assert sorted(ev.REASON_CODES) == list("ABCDEFGHIJ")
        assert ev.REASON_CODES["A"] == "Use of Hate word(s)"
        assert ev.REASON_CODES["J"] == "Spelling variations in Roman Urdu"

    def test_tagging_counts(self):
        report = tag_errors(
            [
                ("eik nasli kutta 100 badnasal yaron se behter hota hai", "Neutral", "Hostile", ["A"]),
                ("maryam ka papa papa nai papi hai", "Hostile", "Neutral", ["C", "E"]),
            ]
        )
        assert len(report.entries) == 2
        assert report.counts["A"] == 1
        assert report.counts["C"] == 1
        assert report.counts["E"] == 1
        assert report.counts["B"] == 0

    def test_unknown_code_rejected(self):
        with pytest.raises(UnknownReasonCode):
            tag_errors([("c", "a", "b", ["K"])])

    def test_empty_codes_rejected(self):
        with pytest.raises(ValueError):
            tag_errors([("c", "a", "b", [])])

    def test_report_tsv_lists_catalog(self):
        report = tag_errors([("some text", "Hostile", "Neutral", ["C", "E"])])
        text = error_report_tsv(report)
        assert "some text\tHostile\tNeutral\tC,E" in text
        assert "C\tSarcasm/Taunt\t1" in text
        assert "A\tUse of Hate word(s)\t0" in text
