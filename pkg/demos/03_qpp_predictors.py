"""The four unsupervised query performance predictors on toy score lists.

A confident retrieval has high scores well above the corpus score with a
sharp drop-off; a drifting retrieval hugs the corpus score. Higher
predictor values mean better predicted performance, i.e. a clearer query.

Run: python demos/03_qpp_predictors.py
"""

from claritykit import QppInput, n_sigma_percent, nqc, smv, wig

confident = QppInput(scores=(9.0, 8.5, 3.0, 2.5, 2.0), s_c=1.5, q_len=3)
drifting = QppInput(scores=(2.1, 2.0, 2.0, 1.9, 1.9), s_c=1.8, q_len=3)

header = f"{'predictor':<10}{'confident':>12}{'drifting':>12}"
print(header)
print("-" * len(header))
for name, fn in (("wig", wig), ("nqc", nqc), ("smv", smv)):
    print(f"{name:<10}{fn(confident):>12.4f}{fn(drifting):>12.4f}")
print(f"{'n(sigma%)':<10}{n_sigma_percent(confident, 50):>12.4f}"
      f"{n_sigma_percent(drifting, 50):>12.4f}")
