"""Prediction post-processing and the shared-task evaluation measures."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .core import round_half_up

TASK_RANGES = {"quality": (1, 10), "disagreement": (0, 9)}


@dataclass(frozen=True)
class EvalReport:
    task: str
    f1: float
    f1_average: str
    cohen_kappa: Optional[float]  # quality task only
    mse_rounded: float
    mse_raw: float
    n: int
    per_class_counts: dict  # predicted class -> count

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "f1": self.f1,
            "f1_average": self.f1_average,
            "cohen_kappa": self.cohen_kappa,
            "mse_rounded": self.mse_rounded,
            "mse_raw": self.mse_raw,
            "n": self.n,
            "per_class_counts": {str(k): v for k, v in sorted(self.per_class_counts.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def round_clip(prediction: float, task: str) -> int:
    """Half-up rounding followed by clipping to the task's target range."""
    if not math.isfinite(prediction):
        raise ValueError(f"non-finite prediction: {prediction!r}")
    lo, hi = TASK_RANGES[task]
    return min(hi, max(lo, round_half_up(prediction)))


def _confusion(gold: list, pred: list) -> tuple[list, dict]:
    if len(gold) != len(pred):
        raise ValueError("gold and predictions must have equal length")
    if not gold:
        raise ValueError("empty label lists")
    classes = sorted(set(gold) | set(pred))
    counts = Counter(zip(gold, pred))
    return classes, counts


def f1_score(gold: list, pred: list, average: str = "weighted") -> float:
    """Per-class F1 combined by macro, micro, or weighted (gold-support) averaging.

    Classes absent from both gold and predictions are excluded.
    """
    if average not in ("macro", "micro", "weighted"):
        raise ValueError(f"unknown averaging mode {average!r}")
    classes, counts = _confusion(gold, pred)
    n = len(gold)
    if average == "micro":
        tp = sum(counts[(c, c)] for c in classes)
        # single-label: micro-F1 reduces to accuracy
        return tp / n
    f1s, supports = [], []
    for c in classes:
        tp = counts[(c, c)]
        fp = sum(v for (g, p), v in counts.items() if p == c and g != c)
        fn = sum(v for (g, p), v in counts.items() if g == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        f1s.append(f1)
        supports.append(tp + fn)
    if average == "macro":
        return sum(f1s) / len(f1s)
    return sum(f * s for f, s in zip(f1s, supports)) / n


def cohen_kappa(gold: list, pred: list) -> float:
    """(p_o - p_e)/(1 - p_e); 0.0 when expected agreement is exactly 1."""
    classes, counts = _confusion(gold, pred)
    n = len(gold)
    p_o = sum(counts[(c, c)] for c in classes) / n
    gold_marginals = Counter(gold)
    pred_marginals = Counter(pred)
    p_e = sum(gold_marginals[c] * pred_marginals[c] for c in classes) / (n * n)
    if p_e == 1.0:
        return 0.0
    return (p_o - p_e) / (1.0 - p_e)


def mse(gold: list, pred: list) -> float:
    if len(gold) != len(pred):
        raise ValueError("gold and predictions must have equal length")
    if not gold:
        raise ValueError("empty lists")
    return sum((g - p) ** 2 for g, p in zip(gold, pred)) / len(gold)


def evaluate(gold: list, raw_predictions: list, task: str,
             f1_average: str = "weighted") -> EvalReport:
    """Round-clip raw predictions, then compute F1, kappa (quality only), MSE."""
    if task not in TASK_RANGES:
        raise ValueError(f"unknown task {task!r}")
    if len(gold) != len(raw_predictions):
        raise ValueError("gold and predictions must have equal length")
    rounded = [round_clip(p, task) for p in raw_predictions]
    return EvalReport(
        task=task,
        f1=f1_score(gold, rounded, average=f1_average),
        f1_average=f1_average,
        cohen_kappa=cohen_kappa(gold, rounded) if task == "quality" else None,
        mse_rounded=mse(gold, rounded),
        mse_raw=mse(gold, raw_predictions),
        n=len(gold),
        per_class_counts=dict(Counter(rounded)),
    )
