"""Multi-label evaluation: strict thresholding, per-label accuracy, macro P/R/F1.

Binarization is a strict greater-than (a score exactly at the threshold is
negative). Zero-denominator metrics are reported as 0 and flagged undefined
rather than silently dropped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ShapeMismatchError
from .species import CSV_COLUMNS, N_SPECIES

DEFAULT_TAUS = (0.3, 0.5, 0.7)


def _check_pair(y_true: np.ndarray, y_pred: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(y_true)
    b = np.asarray(y_pred)
    if a.shape != b.shape or a.ndim != 2:
        raise ShapeMismatchError(f"shapes {a.shape} vs {b.shape}")
    return a, b


def binarize(scores: np.ndarray, tau: float) -> np.ndarray:
    """Entry = 1 iff score > tau (strict)."""
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must be in (0, 1), got {tau}")
    return (np.asarray(scores) > tau).astype(np.int64)


def multilabel_accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Mean over samples of the per-sample fraction of correct labels."""
    a, b = _check_pair(y_true, y_pred)
    return float(np.mean(a == b))


@dataclass(frozen=True)
class EvalReport:
    """Metrics at one decision threshold."""

    tau: float
    multilabel_accuracy: float
    precision: tuple  # per class
    recall: tuple
    f1: tuple
    precision_defined: tuple  # False where TP+FP == 0 etc.
    recall_defined: tuple
    f1_defined: tuple
    macro_precision: float
    macro_recall: float
    macro_f1: float
    support: tuple  # positives per class in y_true

    def to_json(self) -> dict:
        return asdict(self)


def macro_prf(y_true: np.ndarray, y_pred: np.ndarray, tau: float = 0.5) -> EvalReport:
    """Per-class and macro precision/recall/F1 from binary matrices."""
    a, b = _check_pair(y_true, y_pred)
    precision, recall, f1 = [], [], []
    p_def, r_def, f_def = [], [], []
    support = []
    for j in range(a.shape[1]):
        t, p = a[:, j], b[:, j]
        tp = int(np.sum((t == 1) & (p == 1)))
        fp = int(np.sum((t == 0) & (p == 1)))
        fn = int(np.sum((t == 1) & (p == 0)))
        support.append(tp + fn)
        p_def.append(tp + fp > 0)
        r_def.append(tp + fn > 0)
        pj = tp / (tp + fp) if tp + fp > 0 else 0.0
        rj = tp / (tp + fn) if tp + fn > 0 else 0.0
        f_def.append(pj + rj > 0)
        fj = 2 * pj * rj / (pj + rj) if pj + rj > 0 else 0.0
        precision.append(pj)
        recall.append(rj)
        f1.append(fj)
    return EvalReport(
        tau=tau,
        multilabel_accuracy=multilabel_accuracy(a, b),
        precision=tuple(precision),
        recall=tuple(recall),
        f1=tuple(f1),
        precision_defined=tuple(p_def),
        recall_defined=tuple(r_def),
        f1_defined=tuple(f_def),
        macro_precision=float(np.mean(precision)),
        macro_recall=float(np.mean(recall)),
        macro_f1=float(np.mean(f1)),
        support=tuple(support),
    )


def threshold_sweep(scores: np.ndarray, y_true: np.ndarray, taus=DEFAULT_TAUS) -> list[EvalReport]:
    """One report per threshold, in the given order.

    Recall is non-increasing in tau by construction (strict binarization
    only removes positives); a violation would mean corrupted inputs.
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.min() < 0.0 or s.max() > 1.0:
        raise ValueError("scores must lie in [0, 1]")
    reports = [macro_prf(y_true, binarize(s, tau), tau=tau) for tau in taus]
    return reports


def recall_monotone(reports: list[EvalReport]) -> bool:
    """Diagnostic: macro recall non-increasing when reports are sorted by tau."""
    ordered = sorted(reports, key=lambda r: r.tau)
    return all(
        ordered[i].macro_recall >= ordered[i + 1].macro_recall - 1e-12
        for i in range(len(ordered) - 1)
    )


def write_predictions_csv(sample_ids, scores: np.ndarray, path) -> None:
    scores = np.asarray(scores)
    if scores.shape != (len(sample_ids), N_SPECIES):
        raise ShapeMismatchError(f"scores shape {scores.shape} vs {len(sample_ids)} ids")
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["sample_id", *CSV_COLUMNS])
        for sid, row in zip(sample_ids, scores):
            writer.writerow([sid, *(repr(float(v)) for v in row)])


def read_predictions_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a predictions CSV; validates the exact header and score range."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["sample_id", *CSV_COLUMNS]:
            raise ValueError(f"unexpected predictions header: {header}")
        ids, rows = [], []
        for row in reader:
            if not row:
                continue
            if len(row) != 1 + N_SPECIES:
                raise ValueError(f"bad row length {len(row)} in {path}")
            ids.append(row[0])
            rows.append([float(v) for v in row[1:]])
    scores = np.array(rows, dtype=np.float64) if rows else np.zeros((0, N_SPECIES))
    if scores.size and (scores.min() < 0.0 or scores.max() > 1.0):
        raise ValueError("prediction scores must lie in [0, 1]")
    return ids, scores
