"""Synthetic benchmark: covariate designs, response scenarios, metrics.

Covariate designs
-----------------
* ``normal`` -- rows i.i.d. N(0, S) with S_ij = rho^|i-j|.
* ``t5``     -- multivariate t with 5 df and scale matrix S (classic
  construction Z / sqrt(u/5); covariance is then (5/3) S. Set
  ``scale_to_covariance`` to rescale so the covariance equals S).
* ``mixed``  -- first third AR(1)-correlated normal, middle third
  independent normal, remainder i.i.d. univariate t(5).

Scenarios
---------
Six response models ("1a".."1c" low-dimensional, "2a".."2c"
high-dimensional) with active features 1..p1. The leading coefficient
blocks are fixed by the scenario; the last block stretches with p1.

Replications
------------
Each replication r draws covariates, noise, the data split, and the
cross-validation folds from four independent streams keyed by
(base_seed, r, stage), so aggregate results are bit-reproducible for a
given base seed regardless of worker count.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from joblib import Parallel, delayed

from .dataset import Dataset
from .errors import InvalidScenario, MfsdaError
from .lasso import ScreenConfig
from .selector import RULES, _resolve_mode, run_mfsda
from .transforms import TransformSpec

COVARIATE_KINDS = ("normal", "t5", "mixed")
SCENARIOS = ("1a", "1b", "1c", "2a", "2b", "2c")

# RNG stream tags: one independent stream per randomness source per rep
_STAGE_COVARIATES = 0
_STAGE_NOISE = 1
_STAGE_SPLIT = 2
_STAGE_SCREEN = 3

AGGREGATE_COLUMNS = (
    "scenario", "dist", "n", "p", "p1", "rho", "method", "rule", "alpha",
    "reps", "fdr", "tpr", "pa", "mean_runtime_ms", "failures",
)

DETAIL_COLUMNS = ("rep", "failed", "fdp", "tpr", "covered", "n_selected", "runtime_ms")


@dataclass(frozen=True)
class CovariateSpec:
    kind: str = "normal"
    p: int = 20
    rho: float = 0.5
    scale_to_covariance: bool = False  # t5 only: rescale to covariance S

    def __post_init__(self):
        if self.kind not in COVARIATE_KINDS:
            raise InvalidScenario(
                f"unknown covariate kind {self.kind!r}; choose from {COVARIATE_KINDS}"
            )
        if self.p < 1:
            raise InvalidScenario(f"p must be >= 1, got {self.p}")
        if not 0.0 <= self.rho < 1.0:
            raise InvalidScenario(f"rho must be in [0, 1), got {self.rho}")


@dataclass(frozen=True)
class ScenarioSpec:
    """A response model plus its true active set {0, .., p1-1} (0-based)."""

    scenario_id: str
    p: int
    p1: int

    def __post_init__(self):
        if self.scenario_id not in SCENARIOS:
            raise InvalidScenario(
                f"unknown scenario {self.scenario_id!r}; choose from {SCENARIOS}"
            )
        minimum = {"1a": 1, "2a": 1, "1b": 6, "2b": 6, "1c": 7, "2c": 7}[self.scenario_id]
        if not minimum <= self.p1 <= self.p:
            raise InvalidScenario(
                f"scenario {self.scenario_id} needs {minimum} <= p1 <= p, "
                f"got p1={self.p1}, p={self.p}"
            )

    @property
    def active_set(self) -> np.ndarray:
        return np.arange(self.p1)

    def _block(self, start: int, stop: int) -> np.ndarray:
        beta = np.zeros(self.p)
        beta[start:stop] = 1.0
        return beta


def ar1_covariance(p: int, rho: float) -> np.ndarray:
    """The p-by-p matrix with entries rho^|i-j|."""
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def gen_covariates(
    spec: CovariateSpec, n: int, seed: int | np.random.Generator = 0
) -> np.ndarray:
    """Draw an n-by-p covariate matrix for the requested design."""
    if n < 1:
        raise InvalidScenario(f"n must be >= 1, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = spec.p
    if spec.kind == "normal":
        chol = np.linalg.cholesky(ar1_covariance(p, spec.rho))
        return rng.standard_normal((n, p)) @ chol.T
    if spec.kind == "t5":
        chol = np.linalg.cholesky(ar1_covariance(p, spec.rho))
        z = rng.standard_normal((n, p)) @ chol.T
        u = rng.chisquare(5, size=n)
        x = z / np.sqrt(u / 5.0)[:, None]
        if spec.scale_to_covariance:
            x *= math.sqrt(3.0 / 5.0)
        return x
    # mixed: correlated normal block, independent normal block, t(5) tail
    b = p // 3
    x = np.empty((n, p))
    if b > 0:
        chol = np.linalg.cholesky(ar1_covariance(b, spec.rho))
        x[:, :b] = rng.standard_normal((n, b)) @ chol.T
        x[:, b:2 * b] = rng.standard_normal((n, b))
    x[:, 2 * b:] = rng.standard_t(5, size=(n, p - 2 * b))
    return x


def gen_response(
    spec: ScenarioSpec, x: np.ndarray, seed: int | np.random.Generator = 0
) -> np.ndarray:
    """Evaluate the scenario's response formula with independent N(0,1) noise."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[1] != spec.p:
        raise InvalidScenario(
            f"covariates have {x.shape[1]} columns but scenario expects {spec.p}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    eta = rng.standard_normal(x.shape[0])
    sid, p1 = spec.scenario_id, spec.p1
    if sid == "1a":
        return x @ spec._block(0, p1) + 3.0 * eta
    if sid == "1b":
        return (np.abs(x @ spec._block(0, 5))
                + np.exp(3.0 + x @ spec._block(5, p1)) + eta)
    if sid == "1c":
        return (x @ spec._block(0, 3) + (x @ spec._block(3, 6) + 3.0) ** 2
                + np.exp(x @ spec._block(6, p1)) + eta)
    if sid == "2a":
        return np.exp(5.0 + x @ spec._block(0, p1)) + eta
    if sid == "2b":
        return (2.0 * (x @ spec._block(0, 5))
                + 3.0 * np.exp(x @ spec._block(5, p1)) + eta)
    # 2c
    return (x @ spec._block(0, 3) + np.abs(x @ spec._block(3, 6) + 5.0)
            + np.exp(x @ spec._block(6, p1)) + eta)


@dataclass(frozen=True)
class RepMetrics:
    """Selection quality of one replication."""

    fdp: float
    tpr: float
    covered: bool
    n_selected: int
    runtime_ms: float = 0.0


def evaluate(
    selected: np.ndarray, true_active: np.ndarray, runtime_ms: float = 0.0
) -> RepMetrics:
    """False-discovery proportion, true-positive rate, and coverage."""
    true_active = np.asarray(true_active)
    if true_active.size == 0:
        raise InvalidScenario("true active set is empty")
    sel = set(int(j) for j in np.asarray(selected).ravel())
    act = set(int(j) for j in true_active.ravel())
    n_false = len(sel - act)
    return RepMetrics(
        fdp=n_false / max(len(sel), 1),
        tpr=len(sel & act) / len(act),
        covered=act.issubset(sel),
        n_selected=len(sel),
        runtime_ms=runtime_ms,
    )


def baseline_topk(stats: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest statistics; ties go to the lower index."""
    stats = np.asarray(stats, dtype=np.float64)
    if k < 1:
        raise InvalidScenario(f"model size must be >= 1, got {k}")
    k = min(k, stats.size)
    order = np.argsort(-stats, kind="stable")
    return np.sort(order[:k])


@dataclass(frozen=True)
class MethodConfig:
    """What to run per replication: the selector or the top-k baseline."""

    name: str = "mfsda"  # "mfsda" or "topk"
    transform: TransformSpec = field(default_factory=TransformSpec)
    alpha: float = 0.2
    rule: str | None = None  # None -> mode default
    mode: str = "auto"
    screen: ScreenConfig | None = None
    topk_c: float = 0.5  # model size floor(c * n / log n) for "topk"

    def __post_init__(self):
        if self.name not in ("mfsda", "topk"):
            raise InvalidScenario(f"unknown method {self.name!r}")
        if self.rule is not None and self.rule not in RULES:
            raise InvalidScenario(f"unknown rule {self.rule!r}")

    @property
    def label(self) -> str:
        return self.name if self.name == "mfsda" else f"topk-c{self.topk_c:g}"


def _stream(base_seed: int, rep: int, stage: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(base_seed), int(rep), int(stage)])


def run_replication(
    scenario: ScenarioSpec,
    covariates: CovariateSpec,
    method: MethodConfig,
    n_total: int,
    base_seed: int,
    rep: int,
    timing: bool = True,
) -> RepMetrics:
    """One seeded replication: generate, select, score."""
    rng_cov = np.random.default_rng(_stream(base_seed, rep, _STAGE_COVARIATES))
    rng_noise = np.random.default_rng(_stream(base_seed, rep, _STAGE_NOISE))
    x = gen_covariates(covariates, n_total, rng_cov)
    y = gen_response(scenario, x, rng_noise)
    data = Dataset(x, y)

    start = time.perf_counter()
    result = run_mfsda(
        data,
        transform=method.transform,
        alpha=method.alpha,
        mode=method.mode,
        rule=method.rule,
        screen=method.screen,
        split_seed=_stream(base_seed, rep, _STAGE_SPLIT),
        screen_seed=_stream(base_seed, rep, _STAGE_SCREEN),
    )
    if method.name == "topk":
        half = data.n // 2
        k = max(int(method.topk_c * half / math.log(half)), 1)
        selected = baseline_topk(result.stats.w, k)
    else:
        selected = result.selected
    elapsed = (time.perf_counter() - start) * 1e3 if timing else 0.0
    return evaluate(selected, scenario.active_set, runtime_ms=elapsed)


@dataclass(frozen=True)
class BenchResult:
    """Aggregate of one benchmark cell plus optional per-rep detail."""

    row: dict[str, Any]
    details: list[RepMetrics | None] = field(default_factory=list)


def run_replications(
    scenario: ScenarioSpec,
    covariates: CovariateSpec,
    method: MethodConfig,
    n: int,
    reps: int,
    base_seed: int,
    jobs: int = 1,
    n_is_total: bool = False,
    timing: bool = True,
) -> BenchResult:
    """Run ``reps`` seeded replications and aggregate them.

    ``n`` is the per-split sample size (2n rows generated) unless
    ``n_is_total``. Replication r uses streams keyed by base_seed + r only,
    so the aggregate is independent of ``jobs``. Failed replications are
    excluded from the means and counted in the ``failures`` column.
    """
    if reps < 1:
        raise InvalidScenario(f"reps must be >= 1, got {reps}")
    if base_seed < 0:
        raise InvalidScenario("base seed must be non-negative")
    n_total = n if n_is_total else 2 * n

    def one(rep: int) -> RepMetrics | None:
        try:
            return run_replication(
                scenario, covariates, method, n_total, base_seed, rep, timing
            )
        except MfsdaError:
            return None

    if jobs == 1:
        details = [one(r) for r in range(reps)]
    else:
        details = Parallel(n_jobs=jobs)(delayed(one)(r) for r in range(reps))

    ok = [m for m in details if m is not None]
    failures = reps - len(ok)
    if ok:
        fdr = float(np.mean([m.fdp for m in ok]))
        tpr = float(np.mean([m.tpr for m in ok]))
        pa = float(np.mean([m.covered for m in ok]))
        runtime = float(np.mean([m.runtime_ms for m in ok]))
    else:
        fdr = tpr = pa = runtime = math.nan

    if method.name == "topk":
        resolved_rule = ""
    else:
        resolved_mode = _resolve_mode(method.mode, n_total, covariates.p)
        resolved_rule = method.rule or ("lplus" if resolved_mode == "highdim" else "l")
    row = {
        "scenario": scenario.scenario_id,
        "dist": covariates.kind,
        "n": n,
        "p": covariates.p,
        "p1": scenario.p1,
        "rho": covariates.rho,
        "method": method.label,
        "rule": resolved_rule,
        "alpha": method.alpha,
        "reps": reps,
        "fdr": fdr,
        "tpr": tpr,
        "pa": pa,
        "mean_runtime_ms": runtime,
        "failures": failures,
    }
    return BenchResult(row=row, details=list(details))


def _format_cell(column: str, value: Any) -> str:
    if column in ("fdr", "tpr", "pa", "rho", "alpha"):
        return f"{float(value):.6f}"
    if column == "mean_runtime_ms":
        return f"{float(value):.3f}"
    return str(value)


def aggregate_csv(rows: Sequence[dict[str, Any]]) -> str:
    """Render aggregate rows as CSV text with stable float formatting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_COLUMNS)
    for row in rows:
        writer.writerow([_format_cell(c, row[c]) for c in AGGREGATE_COLUMNS])
    return buf.getvalue()


def write_aggregate_csv(rows: Sequence[dict[str, Any]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(aggregate_csv(rows))


def detail_csv(details: Sequence[RepMetrics | None]) -> str:
    """Per-replication CSV (failed reps keep their slot, flagged)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DETAIL_COLUMNS)
    for rep, m in enumerate(details):
        if m is None:
            writer.writerow([rep, 1, "", "", "", "", ""])
        else:
            writer.writerow([
                rep, 0, f"{m.fdp:.6f}", f"{m.tpr:.6f}", int(m.covered),
                m.n_selected, f"{m.runtime_ms:.3f}",
            ])
    return buf.getvalue()


def sweep_csv(rows: Sequence[dict[str, Any]], x_column: str) -> str:
    """Figure data: one (x, fdr, tpr) line per aggregate row."""
    if x_column not in AGGREGATE_COLUMNS:
        raise InvalidScenario(f"unknown sweep column {x_column!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "fdr", "tpr"])
    for row in rows:
        writer.writerow([
            _format_cell(x_column, row[x_column]),
            _format_cell("fdr", row["fdr"]),
            _format_cell("tpr", row["tpr"]),
        ])
    return buf.getvalue()
