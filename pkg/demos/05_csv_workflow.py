"""End-to-end CSV workflow: write a dataset, select via the CLI, read the report.

Mirrors what a user with their own data does: one headered CSV in, one
JSON report out. Uses a subprocess so the exact installed entry point is
exercised.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from mfsda import CovariateSpec, Dataset, ScenarioSpec, gen_covariates, gen_response
from mfsda.cli import write_dataset

with tempfile.TemporaryDirectory() as tmp:
    csv_path = Path(tmp) / "measurements.csv"
    report_path = Path(tmp) / "selection.json"

    scenario = ScenarioSpec("1a", p=15, p1=5)
    x = gen_covariates(CovariateSpec("normal", p=15, rho=0.3), n=600, seed=21)
    y = gen_response(scenario, x, seed=22)
    names = tuple(f"gene_{j}" for j in range(1, 16))
    write_dataset(Dataset(x, y, names), str(csv_path), response_name="outcome")

    cmd = [
        sys.executable, "-m", "mfsda.cli", "select",
        "--input", str(csv_path), "--response", "outcome",
        "--alpha", "0.2", "--seed", "1", "--out", str(report_path),
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(proc.stdout)
    assert proc.returncode == 0, proc.stderr

    report = json.loads(report_path.read_text())
    print("selected names:", report["selected_names"])
    print("threshold     :", report["threshold"])
