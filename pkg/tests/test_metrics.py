"""eval_metrics contract tests, all checked against brute-force counting."""

import numpy as np
import pytest

from swarmforge.errors import ShapeMismatchError
from swarmforge.metrics import (
    EvalReport,
    binarize,
    macro_prf,
    multilabel_accuracy,
    read_predictions_csv,
    recall_monotone,
    threshold_sweep,
    write_predictions_csv,
)


def brute_force_prf(y_true, y_pred):
    """Per-class precision/recall/F1 via explicit confusion counts (pure Python)."""
    n, c = len(y_true), len(y_true[0])
    out = []
    for j in range(c):
        tp = fp = fn = 0
        for i in range(n):
            t, p = int(y_true[i][j]), int(y_pred[i][j])
            if t == 1 and p == 1:
                tp += 1
            elif t == 0 and p == 1:
                fp += 1
            elif t == 1 and p == 0:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out.append((precision, recall, f1))
    return out


def brute_force_accuracy(y_true, y_pred):
    n, c = len(y_true), len(y_true[0])
    total = 0.0
    for i in range(n):
        correct = sum(1 for j in range(c) if int(y_true[i][j]) == int(y_pred[i][j]))
        total += correct / c
    return total / n


def random_instance(rng, n=200):
    y = (rng.random((n, 6)) < 0.3).astype(int)
    scores = rng.random((n, 6))
    return y, scores


def test_binarize_strict_boundary():
    scores = np.array([[0.30, 0.31, 0.29, 0.3000001, 0.0, 1.0]])
    out = binarize(scores, 0.3)
    np.testing.assert_array_equal(out, [[0, 1, 0, 1, 0, 1]])


def test_binarize_monotone_in_tau():
    rng = np.random.default_rng(0)
    for _ in range(20):
        scores = rng.random((50, 6))
        low = binarize(scores, 0.3)
        high = binarize(scores, 0.7)
        assert np.all(high <= low)


def test_binarize_tau_range():
    with pytest.raises(ValueError):
        binarize(np.zeros((1, 6)), 0.0)
    with pytest.raises(ValueError):
        binarize(np.zeros((1, 6)), 1.0)


def test_accuracy_identity_and_complement():
    rng = np.random.default_rng(1)
    y = (rng.random((40, 6)) < 0.4).astype(int)
    assert multilabel_accuracy(y, y) == 1.0
    assert multilabel_accuracy(y, 1 - y) == 0.0


def test_accuracy_single_sample_hand_case():
    y = np.array([[1, 0, 1, 0, 0, 0]])
    y_hat = np.array([[1, 0, 0, 0, 0, 0]])
    assert multilabel_accuracy(y, y_hat) == pytest.approx(5 / 6)


def test_accuracy_column_permutation_invariant():
    rng = np.random.default_rng(2)
    y = (rng.random((30, 6)) < 0.5).astype(int)
    y_hat = (rng.random((30, 6)) < 0.5).astype(int)
    perm = rng.permutation(6)
    assert multilabel_accuracy(y, y_hat) == multilabel_accuracy(y[:, perm], y_hat[:, perm])


def test_accuracy_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        multilabel_accuracy(np.zeros((3, 6)), np.zeros((4, 6)))


def test_macro_prf_perfect():
    rng = np.random.default_rng(3)
    y = (rng.random((25, 6)) < 0.5).astype(int)
    y[0] = 1  # every class present at least once
    report = macro_prf(y, y)
    assert report.macro_precision == 1.0
    assert report.macro_recall == 1.0
    assert report.macro_f1 == 1.0


def test_macro_prf_absent_class_flagged():
    y = np.zeros((10, 6), dtype=int)
    y[:, 0] = 1
    y_hat = y.copy()
    report = macro_prf(y, y_hat)
    assert report.precision_defined[5] is False
    assert report.recall_defined[5] is False
    assert report.precision[5] == 0.0
    assert report.recall[5] == 0.0
    assert report.support[5] == 0


def test_macro_prf_matches_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(10):
        y, scores = random_instance(rng)
        y_hat = binarize(scores, 0.5)
        report = macro_prf(y, y_hat)
        expected = brute_force_prf(y.tolist(), y_hat.tolist())
        for j in range(6):
            assert report.precision[j] == expected[j][0]
            assert report.recall[j] == expected[j][1]
            assert report.f1[j] == expected[j][2]
        assert report.macro_precision == np.mean([e[0] for e in expected])
        assert report.multilabel_accuracy == pytest.approx(
            brute_force_accuracy(y.tolist(), y_hat.tolist()), abs=1e-15
        )


def test_f1_bounds_and_zero_tp():
    rng = np.random.default_rng(5)
    y, scores = random_instance(rng, n=100)
    report = macro_prf(y, binarize(scores, 0.5))
    for j in range(6):
        p, r, f = report.precision[j], report.recall[j], report.f1[j]
        if report.f1_defined[j]:
            assert min(p, r) - 1e-12 <= f <= max(p, r) + 1e-12
        if p == 0.0 and r == 0.0:
            assert f == 0.0


def test_threshold_sweep_recall_monotone():
    rng = np.random.default_rng(6)
    for _ in range(10):
        y, scores = random_instance(rng)
        reports = threshold_sweep(scores, y)
        assert recall_monotone(reports)
        r03, r05, r07 = [r.macro_recall for r in reports]
        assert r03 >= r05 >= r07


def test_threshold_sweep_all_zero_scores():
    y = np.eye(6, dtype=int)
    scores = np.zeros((6, 6))
    for report in threshold_sweep(scores, y):
        assert report.macro_recall == 0.0
        assert all(not d for d in report.precision_defined)


def test_threshold_sweep_perfect_scores():
    rng = np.random.default_rng(7)
    y = (rng.random((30, 6)) < 0.5).astype(int)
    y[0] = 1
    for report in threshold_sweep(y.astype(float), y):
        assert report.multilabel_accuracy == 1.0
        assert report.macro_f1 == 1.0


def test_threshold_sweep_rejects_out_of_range_scores():
    with pytest.raises(ValueError):
        threshold_sweep(np.full((2, 6), 1.5), np.zeros((2, 6), dtype=int))


def test_report_macro_is_mean_of_per_class():
    rng = np.random.default_rng(8)
    y, scores = random_instance(rng)
    report = macro_prf(y, binarize(scores, 0.3), tau=0.3)
    assert report.macro_f1 == pytest.approx(np.mean(report.f1), abs=1e-15)
    payload = report.to_json()
    assert payload["tau"] == 0.3
    assert len(payload["precision"]) == 6


def test_predictions_csv_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    ids = [f"sample_{i:06d}" for i in range(10)]
    scores = rng.random((10, 6))
    path = tmp_path / "pred.csv"
    write_predictions_csv(ids, scores, path)
    back_ids, back_scores = read_predictions_csv(path)
    assert back_ids == ids
    np.testing.assert_array_equal(back_scores, scores)


def test_predictions_csv_header_enforced(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("sample_id,a,b,c,d,e,f\ns0,0,0,0,0,0,0\n")
    with pytest.raises(ValueError):
        read_predictions_csv(path)


def test_predictions_csv_score_range_enforced(tmp_path):
    path = tmp_path / "range.csv"
    header = "sample_id,p_ae_aegypti,p_ae_albopictus,p_an_arabiensis,p_an_gambiae,p_cx_quinque,p_cx_pipiens"
    path.write_text(header + "\ns0,0.5,0.5,0.5,0.5,0.5,1.5\n")
    with pytest.raises(ValueError):
        read_predictions_csv(path)
