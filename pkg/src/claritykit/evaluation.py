"""ROC/AUC evaluation, paired bootstrap significance, threshold selection,
and ambiguity-bucket reporting.

Scores follow the toolkit-wide convention: higher means more ambiguous.
Labels are booleans, True when the query needs clarification.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import DataError

DEFAULT_RESAMPLES = 10000


@dataclass
class EvalReport:
    """One method's evaluation artifacts; serializes to JSON and ROC CSV."""

    method_id: str
    auc: float
    roc_points: list[tuple[float, float]]
    n_pos: int
    n_neg: int
    p_values: dict[str, float] = field(default_factory=dict)
    per_k: dict[int, float] | None = None

    def to_json(self) -> str:
        payload = {
            "method_id": self.method_id,
            "auc": self.auc,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "roc_points": [[fpr, tpr] for fpr, tpr in self.roc_points],
            "p_values": self.p_values,
        }
        if self.per_k is not None:
            payload["per_k"] = {str(k): v for k, v in sorted(self.per_k.items())}
        return json.dumps(payload, sort_keys=True, indent=2)

    def roc_csv(self) -> str:
        lines = ["fpr,tpr"]
        lines += [f"{fpr!r},{tpr!r}" for fpr, tpr in self.roc_points]
        return "\n".join(lines) + "\n"


def _check_coverage(scores: Mapping[str, float], labels: Mapping[str, bool]) -> list[str]:
    missing = sorted(q for q in labels if q not in scores)
    if missing:
        raise DataError(f"scores missing for {len(missing)} labeled query(ies): {missing}")
    ids = sorted(labels)
    if not ids:
        raise DataError("no labeled queries")
    n_pos = sum(1 for q in ids if labels[q])
    if n_pos == 0 or n_pos == len(ids):
        raise DataError("labels are single-class; ROC needs both classes")
    return ids


def roc_points(scores: Mapping[str, float], labels: Mapping[str, bool]) -> list[tuple[float, float]]:
    """ROC points from sweeping unique score thresholds descending.

    Starts at (0, 0), ends at (1, 1); both coordinates non-decreasing. Tied
    scores collapse into one point, so the trapezoidal area credits ties 0.5.
    """
    ids = _check_coverage(scores, labels)
    n_pos = sum(1 for q in ids if labels[q])
    n_neg = len(ids) - n_pos
    by_score: dict[float, list[bool]] = {}
    for q in ids:
        by_score.setdefault(scores[q], []).append(labels[q])
    points = [(0.0, 0.0)]
    tp = fp = 0
    for value in sorted(by_score, reverse=True):
        group = by_score[value]
        tp += sum(group)
        fp += len(group) - sum(group)
        points.append((fp / n_neg, tp / n_pos))
    return points


def trapezoid_auc(points: list[tuple[float, float]]) -> float:
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def roc_and_auc(
    scores: Mapping[str, float], labels: Mapping[str, bool], method_id: str = ""
) -> EvalReport:
    """ROC sweep plus trapezoidal AUC for one method.

    Raises DataError when labels are single-class or any labeled query has
    no score.
    """
    points = roc_points(scores, labels)
    ids = sorted(labels)
    n_pos = sum(1 for q in ids if labels[q])
    return EvalReport(
        method_id=method_id,
        auc=trapezoid_auc(points),
        roc_points=points,
        n_pos=n_pos,
        n_neg=len(ids) - n_pos,
    )


def _auc_of_pairs(pairs: list[tuple[float, bool]]) -> float:
    """Trapezoidal AUC of (score, label) pairs; assumes both classes present."""
    n_pos = sum(1 for _, lab in pairs if lab)
    n_neg = len(pairs) - n_pos
    by_score: dict[float, int] = {}
    pos_by_score: dict[float, int] = {}
    for s, lab in pairs:
        by_score[s] = by_score.get(s, 0) + 1
        if lab:
            pos_by_score[s] = pos_by_score.get(s, 0) + 1
    area = 0.0
    tp = fp = 0
    prev_x = prev_y = 0.0
    for value in sorted(by_score, reverse=True):
        tp += pos_by_score.get(value, 0)
        fp += by_score[value] - pos_by_score.get(value, 0)
        x, y = fp / n_neg, tp / n_pos
        area += (x - prev_x) * (prev_y + y) / 2.0
        prev_x, prev_y = x, y
    return area


def paired_significance(
    scores_a: Mapping[str, float],
    scores_b: Mapping[str, float],
    labels: Mapping[str, bool],
    resamples: int = DEFAULT_RESAMPLES,
    seed: int = 0,
) -> float:
    """Two-sided paired bootstrap p-value for the AUC difference of two methods.

    Query ids are resampled with replacement; a resample counts against the
    observed difference when its AUC difference is zero or opposite in sign.
    p = (count + 1) / (resamples + 1), deterministic for a fixed seed.
    Single-class resamples are redrawn with bounded retries.
    """
    ids = _check_coverage(scores_a, labels)
    _check_coverage(scores_b, labels)
    observed = _auc_of_pairs([(scores_a[q], labels[q]) for q in ids]) - _auc_of_pairs(
        [(scores_b[q], labels[q]) for q in ids]
    )
    rng = random.Random(seed)
    n = len(ids)
    flips = 0
    for _ in range(resamples):
        for _attempt in range(1000):
            sample = [ids[rng.randrange(n)] for _ in range(n)]
            sample_labels = [labels[q] for q in sample]
            if any(sample_labels) and not all(sample_labels):
                break
        else:
            raise DataError("could not draw a two-class bootstrap resample in 1000 tries")
        diff = _auc_of_pairs(
            [(scores_a[q], labels[q]) for q in sample]
        ) - _auc_of_pairs([(scores_b[q], labels[q]) for q in sample])
        if diff * observed <= 0.0:
            flips += 1
    return (flips + 1) / (resamples + 1)


def select_threshold(dev_scores: Mapping[str, float], dev_labels: Mapping[str, bool]) -> float:
    """Threshold maximizing Youden's J = TPR - FPR on a dev split.

    Decisions use score > threshold; candidates are the unique dev scores
    and ties break toward the higher threshold.
    """
    ids = _check_coverage(dev_scores, dev_labels)
    n_pos = sum(1 for q in ids if dev_labels[q])
    n_neg = len(ids) - n_pos
    best_threshold = None
    best_j = None
    for t in sorted(set(dev_scores[q] for q in ids), reverse=True):
        tp = sum(1 for q in ids if dev_labels[q] and dev_scores[q] > t)
        fp = sum(1 for q in ids if not dev_labels[q] and dev_scores[q] > t)
        j = tp / n_pos - fp / n_neg
        if best_j is None or j > best_j:
            best_j, best_threshold = j, t
    assert best_threshold is not None
    return best_threshold


def bucket_report(
    scores: Mapping[str, float], buckets: Mapping[str, int], threshold: float
) -> dict[int, float]:
    """Percentage of queries scored above `threshold` per ambiguity bucket.

    Bucket counts >= 4 group into bucket 4 ("4+"). Empty buckets are absent
    from the result, not reported as zero.
    """
    missing = sorted(q for q in buckets if q not in scores)
    if missing:
        raise DataError(f"scores missing for {len(missing)} bucketed query(ies): {missing}")
    grouped: dict[int, list[str]] = {}
    for q, bucket in buckets.items():
        if bucket < 1:
            raise DataError(f"bucket for {q!r} must be >= 1, got {bucket}")
        grouped.setdefault(min(bucket, 4), []).append(q)
    return {
        b: 100.0 * sum(1 for q in members if scores[q] > threshold) / len(members)
        for b, members in sorted(grouped.items())
    }


def bucket_label(bucket: int) -> str:
    return "4+" if bucket >= 4 else str(bucket)


def save_report(report: EvalReport, out_dir: str | Path) -> tuple[Path, Path]:
    """Write <method>.report.json and <method>.roc.csv under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{report.method_id}.report.json"
    csv_path = out_dir / f"{report.method_id}.roc.csv"
    json_path.write_text(report.to_json() + "\n", encoding="utf-8")
    csv_path.write_text(report.roc_csv(), encoding="utf-8")
    return json_path, csv_path
