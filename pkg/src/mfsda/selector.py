"""Variable selection with FDR control via data splitting.

The pipeline: split the sample in two, fit a multi-response least-squares
estimate of the transformed-response coefficients on each half, combine the
two coefficient rows per feature into a scaled inner product ("w statistic"
below), and pick the smallest statistic value at which the estimated
false-discovery proportion drops below the target level. Inactive features
produce statistics that are symmetric around zero, so the negative tail
counts estimate the false positives in the positive tail.

Low-dimensional data (split size > p) is fitted directly; otherwise split 1
is screened by cross-validated lasso and split 2 refitted on the screened
set only. The "lplus" threshold rule adds one to the negative-tail count,
trading a little power for a sharper control guarantee; it is the default
in the screened (high-dimensional) mode.
"""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .dataset import Dataset
from .errors import (
    InsufficientSamples,
    InternalContractViolation,
    InvalidLevel,
    InvalidScenario,
    MfsdaError,
)
from .lasso import ScreenConfig, screen_fits
from .linalg import center_columns, multi_response_ols, spd_inverse_diagonal
from .transforms import TransformSpec, apply_transform, make_slice_boundaries

MODES = ("lowdim", "highdim")
# threshold rule name -> numerator correction added to the negative-tail count
RULES = {"l": 0, "lplus": 1}


@dataclass(frozen=True)
class SplitPair:
    """Two disjoint halves of a dataset (the first gets the odd row)."""

    d1: Dataset
    d2: Dataset
    split_seed: int | None = None


@dataclass(frozen=True)
class SplitFit:
    """Per-split coefficient matrix and scale factors.

    ``coefficients`` has one row per fitted feature; ``scales`` holds the
    square roots of the inverse-Gram diagonal; ``feature_indices`` maps the
    rows back into the original 0..p-1 columns.
    """

    coefficients: np.ndarray  # (k, H)
    scales: np.ndarray  # (k,) strictly positive
    feature_indices: np.ndarray  # (k,) ints into the original columns

    def __post_init__(self):
        if np.any(self.scales <= 0):
            raise InternalContractViolation("non-positive scale factor in split fit")
        if self.coefficients.shape[0] != self.feature_indices.size:
            raise InternalContractViolation("coefficient rows do not match feature map")


@dataclass(frozen=True)
class RankingStats:
    """Length-p symmetrized statistics; exactly zero off the screened set."""

    w: np.ndarray
    screened: np.ndarray


@dataclass(frozen=True)
class SelectionResult:
    threshold: float
    selected: np.ndarray  # 0-based indices
    stats: RankingStats
    alpha: float
    mode: str
    rule: str
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict[str, Any]:
        """Wire form: indices reported 1-based."""
        return {
            "threshold": float(self.threshold),
            "selected_indices": [int(j) + 1 for j in self.selected],
            "w_statistics": [float(v) for v in self.stats.w],
            "alpha": self.alpha,
            "mode": self.mode,
            "rule": self.rule,
            "screened_set": [int(j) + 1 for j in self.stats.screened],
            "diagnostics": self.diagnostics,
        }


@contextmanager
def _stage(name: str, timings: dict[str, float] | None = None):
    """Tag pipeline errors with the stage they came from; record wall time."""
    start = time.perf_counter()
    try:
        yield
    except MfsdaError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    finally:
        if timings is not None:
            timings[name] = (time.perf_counter() - start) * 1e3


def split_data(dataset: Dataset, seed: int | np.random.Generator = 0) -> SplitPair:
    """Seeded uniformly-random split into halves (odd row goes to the first)."""
    if dataset.n < 4:
        raise InsufficientSamples(f"splitting needs >= 4 rows, got {dataset.n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = rng.permutation(dataset.n)
    half = (dataset.n + 1) // 2
    return SplitPair(
        d1=dataset.subset(perm[:half]),
        d2=dataset.subset(perm[half:]),
        split_seed=seed if isinstance(seed, int) else None,
    )


def fit_split(
    split: Dataset,
    transform: TransformSpec,
    feature_indices: np.ndarray | None = None,
) -> SplitFit:
    """Center one split, build its slice transform, and fit least squares.

    ``feature_indices`` restricts the design to those columns (used for the
    refit on a screened set); default is all columns. Requires more rows
    than fitted columns.
    """
    if feature_indices is None:
        feature_indices = np.arange(split.p)
    feature_indices = np.asarray(feature_indices, dtype=np.intp)
    x = split.x[:, feature_indices]
    if split.n <= feature_indices.size:
        raise InsufficientSamples(
            f"{split.n} rows cannot fit {feature_indices.size} features; "
            "use the screened (high-dimensional) mode"
        )
    xc, _ = center_columns(x)
    boundaries = make_slice_boundaries(split.y, transform.n_slices)
    f_mat = apply_transform(transform, split.y, boundaries)
    coefficients, inv_diag = multi_response_ols(xc, f_mat)
    return SplitFit(
        coefficients=coefficients,
        scales=np.sqrt(inv_diag),
        feature_indices=feature_indices,
    )


def ranking_statistics(fit1: SplitFit, fit2: SplitFit, p: int) -> RankingStats:
    """Scaled inner product of the two splits' coefficient rows.

    w_j = <b1_j, b2_j> / (s1_j * s2_j) on the common feature set, 0 off it.
    Symmetric in its two arguments.
    """
    if not np.array_equal(fit1.feature_indices, fit2.feature_indices):
        raise InternalContractViolation("split fits cover different feature sets")
    w = np.zeros(p)
    inner = np.sum(fit1.coefficients * fit2.coefficients, axis=1)
    w[fit1.feature_indices] = inner / (fit1.scales * fit2.scales)
    if not np.all(np.isfinite(w)):
        raise InternalContractViolation("non-finite ranking statistic")
    return RankingStats(w=w, screened=np.sort(fit1.feature_indices))


def fdp_threshold(w: np.ndarray, alpha: float, offset: int = 0) -> float:
    """Smallest candidate t with estimated FDP at or below ``alpha``.

    Candidates are the nonzero |w_j|, scanned ascending; the estimate at t
    is (offset + #{w_j <= -t}) / max(#{w_j >= t}, 1) with inclusive
    comparisons. Returns +inf when no candidate qualifies (the empty
    selection). ``offset=1`` gives the more conservative "+1" rule.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidLevel(f"target FDR level must be in (0, 1), got {alpha}")
    w = np.asarray(w, dtype=np.float64)
    if not np.all(np.isfinite(w)):
        raise InternalContractViolation("ranking statistics must be finite")
    candidates = np.unique(np.abs(w[w != 0]))
    if candidates.size == 0:
        return math.inf
    pos = np.sort(w[w > 0])
    neg = np.sort(-w[w < 0])
    n_pos = pos.size - np.searchsorted(pos, candidates, side="left")
    n_neg = neg.size - np.searchsorted(neg, candidates, side="left")
    fdp = (offset + n_neg) / np.maximum(n_pos, 1)
    ok = np.flatnonzero(fdp <= alpha)
    if ok.size == 0:
        return math.inf
    return float(candidates[ok[0]])


def _resolve_mode(mode: str, n: int, p: int) -> str:
    if mode not in MODES + ("auto",):
        raise InvalidScenario(f"unknown mode {mode!r}")
    if mode != "auto":
        return mode
    return "highdim" if p >= n // 2 else "lowdim"


def _as_seedseq(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def run_mfsda(
    dataset: Dataset,
    transform: TransformSpec = TransformSpec(),
    alpha: float = 0.2,
    mode: str = "auto",
    rule: str | None = None,
    screen: ScreenConfig | None = None,
    seed: int | np.random.SeedSequence = 0,
    split_seed=None,
    screen_seed=None,
) -> SelectionResult:
    """Run the full split / fit / rank / threshold pipeline.

    ``mode`` "auto" screens iff p >= split size. ``rule`` defaults to "l"
    in lowdim mode and "lplus" in highdim mode. ``split_seed`` and
    ``screen_seed`` override the two internal random streams (both are
    derived from ``seed`` when not given). Errors carry the pipeline stage
    they occurred in.
    """
    if rule is not None and rule not in RULES:
        raise InvalidScenario(f"unknown threshold rule {rule!r}; choose from {sorted(RULES)}")
    if not 0.0 < alpha < 1.0:
        raise InvalidLevel(f"target FDR level must be in (0, 1), got {alpha}")
    if split_seed is None or screen_seed is None:
        derived = _as_seedseq(seed).spawn(2)
        split_seed = derived[0] if split_seed is None else split_seed
        screen_seed = derived[1] if screen_seed is None else screen_seed
    if not isinstance(split_seed, np.random.Generator):
        split_seed = np.random.default_rng(split_seed)

    resolved = _resolve_mode(mode, dataset.n, dataset.p)
    rule = rule or ("lplus" if resolved == "highdim" else "l")
    timings: dict[str, float] = {}

    with _stage("split", timings):
        pair = split_data(dataset, split_seed)

    if resolved == "lowdim":
        with _stage("fit-split-1", timings):
            fit1 = fit_split(pair.d1, transform)
        with _stage("fit-split-2", timings):
            fit2 = fit_split(pair.d2, transform)
        with _stage("ranking", timings):
            stats = ranking_statistics(fit1, fit2, dataset.p)
    else:
        with _stage("screen", timings):
            x1c, _ = center_columns(pair.d1.x)
            bounds1 = make_slice_boundaries(pair.d1.y, transform.n_slices)
            f1 = apply_transform(transform, pair.d1.y, bounds1)
            cfg = screen or ScreenConfig()
            support, coefs1, _ = screen_fits(x1c, f1, cfg, _as_seedseq(screen_seed))
        if support.size == 0:
            stats = RankingStats(w=np.zeros(dataset.p), screened=support)
        else:
            with _stage("refit", timings):
                scales1 = np.sqrt(spd_inverse_diagonal(
                    x1c[:, support].T @ x1c[:, support]
                ))
                fit1 = SplitFit(
                    coefficients=coefs1[support],
                    scales=scales1,
                    feature_indices=support,
                )
                fit2 = fit_split(pair.d2, transform, feature_indices=support)
            with _stage("ranking", timings):
                stats = ranking_statistics(fit1, fit2, dataset.p)

    with _stage("threshold", timings):
        threshold = fdp_threshold(stats.w, alpha, RULES[rule])
    selected = np.flatnonzero(stats.w >= threshold)

    diagnostics = {
        "d1_rows": pair.d1.n,
        "d2_rows": pair.d2.n,
        "screened_size": int(stats.screened.size),
        "timings_ms": {k: round(v, 3) for k, v in timings.items()},
    }
    return SelectionResult(
        threshold=threshold,
        selected=selected,
        stats=stats,
        alpha=alpha,
        mode=resolved,
        rule=rule,
        diagnostics=diagnostics,
    )
