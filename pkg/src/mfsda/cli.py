"""Command-line front end: `mfsda select` and `mfsda simulate`.

Exit codes
----------
0  success (including an empty selection)
1  unexpected internal failure
2  configuration error (bad level, bad scenario, bad flags)
3  input-data error (missing file/column, non-numeric cell, duplicate header)
4  pipeline error (too few samples, singular Gram, degenerate slicing)

stdout carries the human-readable summary (or the aggregate CSV when no
output file is given); stderr carries diagnostics.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import sys

import click
import numpy as np

from .dataset import Dataset
from .errors import (
    ColumnNotFound,
    DatasetError,
    DuplicateHeader,
    MfsdaError,
    MissingInputFile,
    MissingValue,
)
from .lasso import ScreenConfig
from .selector import run_mfsda
from .simbench import (
    CovariateSpec,
    MethodConfig,
    ScenarioSpec,
    aggregate_csv,
    detail_csv,
    run_replications,
    sweep_csv,
)
from .transforms import FAMILIES, TransformSpec


def read_dataset(path: str, response_column: str) -> Dataset:
    """Load a headered CSV into a Dataset.

    ``response_column`` is a header name or a 0-based column index. Every
    non-response column must be numeric; NaN/Inf/empty cells are rejected
    with the offending line and column named.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError:
        raise MissingInputFile(f"input file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        seen = set()
        for name in header:
            if name in seen:
                raise DuplicateHeader(f"duplicate column name {name!r} in {path}")
            seen.add(name)

        if response_column in header:
            y_col = header.index(response_column)
        else:
            try:
                y_col = int(response_column)
            except ValueError:
                raise ColumnNotFound(
                    f"response column {response_column!r} not found in header {header}"
                ) from None
            if not 0 <= y_col < len(header):
                raise ColumnNotFound(
                    f"response index {y_col} out of range for {len(header)} columns"
                )

        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"line {line_no}: {len(row)} cells for {len(header)} columns"
                )
            parsed = []
            for col, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    value = math.nan
                if not math.isfinite(value):
                    raise MissingValue(
                        f"line {line_no}, column {header[col]!r}: "
                        f"cell {cell.strip()!r} is not a finite number"
                    )
                parsed.append(value)
            rows.append(parsed)

    if not rows:
        raise DatasetError(f"{path} has a header but no data rows")
    data = np.asarray(rows)
    x_cols = [j for j in range(len(header)) if j != y_col]
    names = tuple(header[j] for j in x_cols)
    return Dataset(x=data[:, x_cols], y=data[:, y_col], feature_names=names)


def write_dataset(dataset: Dataset, path: str, response_name: str = "y") -> None:
    """Write a Dataset back to headered CSV (inverse of read_dataset)."""
    names = dataset.feature_names or tuple(f"x{j + 1}" for j in range(dataset.p))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([response_name, *names])
        for i in range(dataset.n):
            writer.writerow([repr(float(dataset.y[i])),
                             *(repr(float(v)) for v in dataset.x[i])])


def _fail(exc: MfsdaError):
    click.echo(f"error: {exc}", err=True)
    sys.exit(exc.exit_code)


@click.group()
def main():
    """Model-free variable selection with false-discovery-rate control."""


@main.command()
@click.option("--input", "input_path", required=True, help="CSV file with header row.")
@click.option("--response", required=True,
              help="Response column name or 0-based index.")
@click.option("--alpha", default=0.2, show_default=True, help="Target FDR level.")
@click.option("--transform", "family", type=click.Choice(FAMILIES),
              default="indicator", show_default=True)
@click.option("--slices", "n_slices", default=4, show_default=True,
              help="Number of response slices H.")
@click.option("--poly-degree", default=2, show_default=True)
@click.option("--rule", type=click.Choice(["auto", "l", "lplus"]), default="auto",
              show_default=True, help="Threshold rule; auto picks by mode.")
@click.option("--mode", type=click.Choice(["auto", "lowdim", "highdim"]),
              default="auto", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--cv-folds", default=5, show_default=True)
@click.option("--lambda-grid", "path_length", default=50, show_default=True,
              help="Number of penalty grid points for screening.")
@click.option("--screen-cap", default=None, type=int,
              help="Max screened-set size (default: split size / 3).")
@click.option("--out", "out_path", default=None,
              help="Write the selection report as JSON here.")
def select(input_path, response, alpha, family, n_slices, poly_degree, rule,
           mode, seed, cv_folds, path_length, screen_cap, out_path):
    """Select variables from a CSV dataset."""
    try:
        data = read_dataset(input_path, response)
        transform = TransformSpec(family=family, n_slices=n_slices,
                                  poly_degree=poly_degree)
        screen = ScreenConfig(folds=cv_folds, path_length=path_length,
                              cap=screen_cap)
        result = run_mfsda(
            data, transform=transform, alpha=alpha, mode=mode,
            rule=None if rule == "auto" else rule, screen=screen, seed=seed,
        )
    except MfsdaError as exc:
        _fail(exc)

    report = result.to_json_dict()
    names = data.feature_names or tuple(f"x{j + 1}" for j in range(data.p))
    report["selected_names"] = [names[j] for j in result.selected]
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")

    thr = "inf" if math.isinf(result.threshold) else f"{result.threshold:.4f}"
    click.echo(f"mode: {result.mode}  rule: {result.rule}  alpha: {result.alpha}")
    click.echo(f"threshold: {thr}  selected {result.selected.size} of {data.p} features")
    order = np.argsort(-result.stats.w[result.selected], kind="stable")
    for j in result.selected[order]:
        click.echo(f"  {names[j]}  w={result.stats.w[j]:.4f}")
    if out_path:
        click.echo(f"report written to {out_path}")


_PRESETS = {
    "lowdim-table": {
        "scenario": ("1a", "1b", "1c"),
        "dist": ("normal", "t5", "mixed"),
        "n": (300, 400, 500),
        "p": (20,), "p1": (10,), "rho": (0.5,),
        "default_reps": 200,
    },
    "highdim-table": {
        "scenario": ("2a", "2b", "2c"),
        "dist": ("normal", "mixed"),
        "n": (500,),
        "p": (1000,), "p1": (10,), "rho": (0.5,),
        "default_reps": 50,
    },
}


@main.command()
@click.option("--preset", type=click.Choice(sorted(_PRESETS)), default=None,
              help="Table-reproduction grid; overrides the grid flags.")
@click.option("--scenario", multiple=True,
              type=click.Choice(["1a", "1b", "1c", "2a", "2b", "2c"]))
@click.option("--dist", multiple=True, type=click.Choice(["normal", "t5", "mixed"]))
@click.option("--n", multiple=True, type=int, help="Per-split sample size.")
@click.option("--p", multiple=True, type=int)
@click.option("--p1", multiple=True, type=int)
@click.option("--rho", multiple=True, type=float)
@click.option("--reps", default=None, type=int,
              help="Replications per cell (default 200 low-dim, 50 high-dim).")
@click.option("--jobs", default=1, show_default=True)
@click.option("--seed", required=True, type=int, help="Base seed (mandatory).")
@click.option("--alpha", default=0.2, show_default=True)
@click.option("--transform", "family", type=click.Choice(FAMILIES), default="indicator")
@click.option("--slices", "n_slices", default=4, show_default=True)
@click.option("--poly-degree", default=2, show_default=True)
@click.option("--rule", type=click.Choice(["auto", "l", "lplus"]), default="auto")
@click.option("--mode", type=click.Choice(["auto", "lowdim", "highdim"]), default="auto")
@click.option("--method", type=click.Choice(["mfsda", "topk"]), default="mfsda")
@click.option("--topk-c", default=0.5, show_default=True,
              help="Baseline model-size constant c in floor(c*n/log n).")
@click.option("--cv-folds", default=5, show_default=True)
@click.option("--lambda-grid", "path_length", default=50, show_default=True)
@click.option("--screen-cap", default=None, type=int)
@click.option("--n-is-total", is_flag=True,
              help="Interpret --n as the total sample size instead of per split.")
@click.option("--t-cov-scale", is_flag=True,
              help="Rescale t5 covariates so their covariance matches the AR(1) matrix.")
@click.option("--no-timing", is_flag=True,
              help="Report runtime as 0 for byte-reproducible output.")
@click.option("--out", "out_path", default=None, help="Aggregate CSV path.")
@click.option("--detail-out", default=None,
              help="Per-replication CSV (single-cell grids only).")
@click.option("--sweep-x", default=None,
              type=click.Choice(["p", "rho", "p1", "n"]),
              help="Emit figure data (x, fdr, tpr) against this column.")
@click.option("--sweep-out", default=None, help="Figure-data CSV path.")
def simulate(preset, scenario, dist, n, p, p1, rho, reps, jobs, seed, alpha,
             family, n_slices, poly_degree, rule, mode, method, topk_c,
             cv_folds, path_length, screen_cap, n_is_total, t_cov_scale,
             no_timing, out_path, detail_out, sweep_x, sweep_out):
    """Run the seeded simulation bench over a parameter grid."""
    if preset:
        grid = _PRESETS[preset]
        scenario, dist = grid["scenario"], grid["dist"]
        n, p, p1, rho = grid["n"], grid["p"], grid["p1"], grid["rho"]
        if reps is None:
            reps = grid["default_reps"]
    else:
        scenario = scenario or ("1a",)
        dist = dist or ("normal",)
        n = n or (500,)
        p = p or (20,)
        p1 = p1 or (10,)
        rho = rho or (0.5,)

    cells = list(itertools.product(scenario, dist, n, p, p1, rho))
    if detail_out and len(cells) > 1:
        click.echo("error: --detail-out needs a single-cell grid", err=True)
        sys.exit(2)
    if (sweep_x is None) != (sweep_out is None):
        click.echo("error: --sweep-x and --sweep-out go together", err=True)
        sys.exit(2)

    try:
        transform = TransformSpec(family=family, n_slices=n_slices,
                                  poly_degree=poly_degree)
        screen = ScreenConfig(folds=cv_folds, path_length=path_length, cap=screen_cap)
        method_cfg = MethodConfig(
            name=method, transform=transform, alpha=alpha,
            rule=None if rule == "auto" else rule, mode=mode,
            screen=screen, topk_c=topk_c,
        )
        rows = []
        last = None
        for sid, dname, nn, pp, pp1, rr in cells:
            if reps is None:
                n_split = nn // 2 if n_is_total else nn
                cell_reps = 50 if pp >= n_split else 200
            else:
                cell_reps = reps
            last = run_replications(
                scenario=ScenarioSpec(scenario_id=sid, p=pp, p1=pp1),
                covariates=CovariateSpec(kind=dname, p=pp, rho=rr,
                                         scale_to_covariance=t_cov_scale),
                method=method_cfg,
                n=nn, reps=cell_reps, base_seed=seed, jobs=jobs,
                n_is_total=n_is_total, timing=not no_timing,
            )
            rows.append(last.row)
    except MfsdaError as exc:
        _fail(exc)

    text = aggregate_csv(rows)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        click.echo(f"{len(rows)} rows written to {out_path}")
    else:
        click.echo(text, nl=False)
    if detail_out and last is not None:
        with open(detail_out, "w", encoding="utf-8") as fh:
            fh.write(detail_csv(last.details))
    if sweep_out:
        with open(sweep_out, "w", encoding="utf-8") as fh:
            fh.write(sweep_csv(rows, sweep_x))


if __name__ == "__main__":
    main()
