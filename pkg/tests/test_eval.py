import itertools
import random

import pytest

from hinglishqe.evaluation import (cohen_kappa, evaluate, f1_score, mse,
                                   round_clip)

import oracles


class TestRoundClip:
    def test_half_up(self):
        assert round_clip(7.5, "quality") == 8

    def test_clip_high(self):
        assert round_clip(12.3, "quality") == 10

    def test_clip_low_disagreement(self):
        assert round_clip(-0.4, "disagreement") == 0

    def test_in_range_integer_idempotent(self):
        for v in range(1, 11):
            assert round_clip(float(v), "quality") == v
        for v in range(0, 10):
            assert round_clip(float(v), "disagreement") == v

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            round_clip(float("nan"), "quality")


class TestF1:
    def test_perfect_all_modes(self):
        for mode in ("macro", "micro", "weighted"):
            assert f1_score([1, 2, 3], [1, 2, 3], average=mode) == 1.0

    def test_binary_balanced(self):
        # TP=1, FP=1, FN=1, TN=1 for the positive class
        gold = [1, 1, 0, 0]
        pred = [1, 0, 1, 0]
        classes, cm = oracles.naive_confusion_matrix(gold, pred)
        tp = cm[1][1]
        assert 2 * tp / (2 * tp + 1 + 1) == 0.5
        assert f1_score(gold, pred, average="macro") == 0.5

    def test_macro_hand_computed(self):
        assert f1_score([1, 1, 2], [1, 2, 2], average="macro") == pytest.approx(2 / 3)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            f1_score([1], [1, 2])


class TestKappa:
    def test_perfect(self):
        assert cohen_kappa([1, 2, 1], [1, 2, 1]) == 1.0

    def test_confusion_2_1_1_2(self):
        gold = [0, 0, 0, 1, 1, 1]
        pred = [0, 0, 1, 0, 1, 1]
        assert cohen_kappa(gold, pred) == pytest.approx(1 / 3, abs=1e-15)

    def test_constant_pred_absent_class(self):
        # brute force over all 2-class gold/pred lists up to length 4
        for n in range(1, 5):
            for gold in itertools.product([0, 1], repeat=n):
                if len(set(gold)) < 2:
                    continue
                pred = [2] * n
                assert cohen_kappa(list(gold), pred) <= 0

    def test_pe_one_flagged_zero(self):
        assert cohen_kappa([1, 1], [1, 1]) == 0.0


class TestMse:
    def test_identical(self):
        assert mse([1, 2], [1, 2]) == 0.0

    def test_worked(self):
        assert mse([2, 2], [1, 3]) == 1.0

    def test_single(self):
        assert mse([5], [8]) == 9.0


class TestBruteForceEquivalence:
    def test_exhaustive_three_classes_up_to_len_5(self):
        for n in range(1, 6):
            for gold in itertools.product([0, 1, 2], repeat=n):
                for pred in itertools.product([0, 1, 2], repeat=n):
                    gold_l, pred_l = list(gold), list(pred)
                    for mode in ("macro", "micro", "weighted"):
                        assert f1_score(gold_l, pred_l, mode) == pytest.approx(
                            oracles.naive_f1(gold_l, pred_l, mode), abs=1e-12)
                    assert cohen_kappa(gold_l, pred_l) == pytest.approx(
                        oracles.naive_kappa(gold_l, pred_l), abs=1e-12)

    def test_kappa_at_most_one_and_one_iff_agreement(self):
        rng = random.Random(3)
        for _ in range(300):
            n = rng.randint(1, 8)
            gold = [rng.randint(0, 3) for _ in range(n)]
            pred = [rng.randint(0, 3) for _ in range(n)]
            k = cohen_kappa(gold, pred)
            assert k <= 1.0 + 1e-12
            if gold == pred:
                # perfect agreement gives 1 unless expected agreement is 1
                assert k in (1.0, 0.0)
            else:
                assert k < 1.0


class TestEvaluate:
    def test_perfect_predictions(self):
        gold = [1, 5, 10, 5]
        report = evaluate(gold, [1.0, 5.0, 10.0, 5.0], "quality")
        assert report.f1 == 1.0
        assert report.cohen_kappa == 1.0
        assert report.mse_rounded == 0.0
        assert report.mse_raw == 0.0
        assert report.n == 4

    def test_constant_predictions(self):
        gold = [3, 5, 7, 9]
        report = evaluate(gold, [5.2, 5.2, 5.2, 5.2], "quality")
        assert report.per_class_counts == {5: 4}
        assert report.mse_rounded == sum((g - 5) ** 2 for g in gold) / 4

    def test_order_invariance(self):
        gold = [3, 5, 7, 9]
        raw = [2.9, 5.4, 6.6, 9.9]
        r1 = evaluate(gold, raw, "quality")
        order = [2, 0, 3, 1]
        r2 = evaluate([gold[i] for i in order], [raw[i] for i in order], "quality")
        assert r1 == r2

    def test_disagreement_has_no_kappa(self):
        report = evaluate([0, 3], [0.1, 2.9], "disagreement")
        assert report.cohen_kappa is None

    def test_mse_rounded_equals_raw_on_integer_preds(self):
        gold = [2, 4]
        report = evaluate(gold, [3.0, 5.0], "quality")
        assert report.mse_rounded == report.mse_raw

    def test_relabel_invariance(self):
        gold = [1, 2, 2, 3]
        pred = [1, 2, 3, 3]
        # shift every class id by the same offset
        assert f1_score(gold, pred, "weighted") == f1_score(
            [g + 4 for g in gold], [p + 4 for p in pred], "weighted")
        assert cohen_kappa(gold, pred) == cohen_kappa(
            [g + 4 for g in gold], [p + 4 for p in pred])
