"""Reproduce one cell of the low-dimensional benchmark table.

Runs 200 seeded replications of scenario 1a (normal AR(1) covariates,
rho=0.5) and prints the aggregate row: empirical FDR near the 20% target
and high power. With `n_is_total=True` and n=500 this matches the
published numbers for this setting (FDR ~0.21, TPR ~0.87); the default
per-split semantics doubles the data and pushes power toward 1.
"""

from mfsda import CovariateSpec, MethodConfig, ScenarioSpec, aggregate_csv, run_replications

result = run_replications(
    scenario=ScenarioSpec("1a", p=20, p1=10),
    covariates=CovariateSpec("normal", p=20, rho=0.5),
    method=MethodConfig(rule="l"),
    n=500,
    reps=200,
    base_seed=2024,
    jobs=2,
    n_is_total=True,
)

print(aggregate_csv([result.row]))

fdr, tpr = result.row["fdr"], result.row["tpr"]
print(f"FDR {fdr:.3f} (target level 0.20), TPR {tpr:.3f}")

# the same cell is available from the command line:
#   mfsda simulate --scenario 1a --dist normal --n 500 --p 20 --p1 10 \
#       --rho 0.5 --reps 200 --seed 2024 --n-is-total --out cell.csv
