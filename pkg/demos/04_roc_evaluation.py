"""Evaluating ambiguity predictors: ROC/AUC, significance, thresholds, buckets.

Run: python demos/04_roc_evaluation.py
"""

import random

from claritykit import (
    bucket_report,
    paired_significance,
    roc_and_auc,
    select_threshold,
)

rng = random.Random(4)
labels = {f"q{i}": i % 2 == 1 for i in range(40)}  # True = needs clarification

# a decent predictor: ambiguous queries usually (not always) score higher
good = {q: rng.gauss(1.0 if labels[q] else 0.0, 0.6) for q in labels}
# a coin-flip predictor
noise = {q: rng.random() for q in labels}

good_report = roc_and_auc(good, labels, method_id="good")
noise_report = roc_and_auc(noise, labels, method_id="noise")
print(f"good  predictor AUC = {good_report.auc:.3f}")
print(f"noise predictor AUC = {noise_report.auc:.3f}")

p = paired_significance(good, noise, labels, resamples=2000, seed=0)
print(f"paired bootstrap p-value (good vs noise): {p:.4f}")

threshold = select_threshold(good, labels)
print(f"\nYouden threshold selected on this split: {threshold:.3f}")

buckets = {q: rng.choice([1, 1, 2, 3, 4, 5]) for q in labels}
table = bucket_report(good, buckets, threshold)
print("percent flagged ambiguous per bucket (4 groups 4+):")
for bucket, pct in table.items():
    label = "4+" if bucket == 4 else str(bucket)
    print(f"  bucket {label}: {pct:5.1f}%")
