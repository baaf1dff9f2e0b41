"""How the data-driven threshold trades discoveries against the FDR level.

Builds a toy vector of ranking statistics by hand, then scans target
levels to show the chosen cutoff and the selections it implies, for both
the plain rule ("l") and the +1-corrected rule ("lplus").
"""

import numpy as np

from mfsda import fdp_threshold

# six clear signals, a dozen null-ish values straddling zero
rng = np.random.default_rng(7)
w = np.concatenate([np.array([9.0, 8.1, 7.4, 6.2, 5.9, 4.8]), rng.normal(0, 1, 12)])

print("w:", np.round(w, 2))
print(f"\n{'alpha':>6} {'L':>8} {'selected':>9} {'L+':>8} {'selected':>9}")
for alpha in (0.05, 0.1, 0.2, 0.3, 0.5):
    thr_l = fdp_threshold(w, alpha, offset=0)
    thr_lp = fdp_threshold(w, alpha, offset=1)
    n_l = int(np.sum(w >= thr_l))
    n_lp = int(np.sum(w >= thr_lp))
    print(f"{alpha:>6} {thr_l:>8.3f} {n_l:>9} {thr_lp:>8.3f} {n_lp:>9}")

# the estimated false-discovery proportion at a cutoff t is the count of
# statistics at or below -t over the count at or above t; the rule returns
# the smallest t where that estimate drops under alpha
t = fdp_threshold(w, 0.2)
neg = int(np.sum(w <= -t))
pos = int(np.sum(w >= t))
print(f"\nat alpha=0.2: t={t:.3f}, negative tail {neg}, positive tail {pos}, "
      f"estimate {neg}/{pos} = {neg / pos:.3f}")
