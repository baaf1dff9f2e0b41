"""Response transformations: slice-based columns f_1(y), ..., f_H(y).

Three families are supported, all built on empirical-quantile slices of the
response:

* ``indicator`` -- 1 if the observation falls in slice h, else 0;
* ``cire``      -- y itself inside slice h, else 0;
* ``poly``      -- y**m inside slice h, else 0 (m = ``poly_degree``).

Columns are mean-centered after construction so each satisfies the sample
analogue of a zero-mean transformation. Boundaries are computed from the
responses of the split being fitted: each data split slices by its own
quantiles, which keeps the two halves of a split pipeline independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSlicing,
    InsufficientDistinctResponses,
    InvalidScenario,
)

FAMILIES = ("indicator", "cire", "poly")


@dataclass(frozen=True)
class TransformSpec:
    """Which transformation family to use and how many slices to build."""

    family: str = "indicator"
    n_slices: int = 4
    poly_degree: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidScenario(
                f"unknown transform family {self.family!r}; choose from {FAMILIES}"
            )
        if self.n_slices < 2:
            raise InvalidScenario(f"need at least 2 slices, got {self.n_slices}")
        if self.poly_degree < 1:
            raise InvalidScenario(f"poly degree must be >= 1, got {self.poly_degree}")


@dataclass(frozen=True)
class SliceBoundaries:
    """Strictly increasing interior cutpoints delimiting H slices."""

    cutpoints: np.ndarray = field()

    def __post_init__(self):
        cp = np.asarray(self.cutpoints, dtype=np.float64)
        if cp.ndim != 1 or cp.size < 1:
            raise DegenerateSlicing("cutpoints must be a non-empty 1-d vector")
        if np.any(np.diff(cp) <= 0):
            raise DegenerateSlicing("cutpoints must be strictly increasing")
        object.__setattr__(self, "cutpoints", cp)

    @property
    def n_slices(self) -> int:
        return self.cutpoints.size + 1


def make_slice_boundaries(y: np.ndarray, n_slices: int) -> SliceBoundaries:
    """Interior cutpoints at the k/H empirical quantiles, k = 1..H-1.

    Quantiles use linear interpolation of the order statistics. Requires at
    least 2H distinct response values; raises ``DegenerateSlicing`` if ties
    still collapse a slice.
    """
    y = np.asarray(y, dtype=np.float64)
    distinct = np.unique(y).size
    if distinct < 2 * n_slices:
        raise InsufficientDistinctResponses(
            f"{distinct} distinct responses cannot fill {n_slices} slices "
            f"(need at least {2 * n_slices})"
        )
    probs = np.arange(1, n_slices) / n_slices
    cutpoints = np.quantile(y, probs, method="linear")
    if np.any(np.diff(cutpoints) <= 0):
        raise DegenerateSlicing("tied quantiles produced an empty slice")
    boundaries = SliceBoundaries(cutpoints)
    counts = np.bincount(slice_memberships(y, boundaries), minlength=n_slices)
    if np.any(counts == 0):
        raise DegenerateSlicing("empty slice after tie resolution")
    return boundaries


def slice_memberships(y: np.ndarray, boundaries: SliceBoundaries) -> np.ndarray:
    """0-based slice index per observation.

    Observation i sits in slice h iff b_{h-1} < y_i <= b_h with b_0 = -inf
    and b_H = +inf; a value exactly at a cutpoint goes to the lower slice.
    """
    return np.searchsorted(boundaries.cutpoints, y, side="left")


def apply_transform(
    spec: TransformSpec, y: np.ndarray, boundaries: SliceBoundaries
) -> np.ndarray:
    """Build the centered n-by-H transformed-response matrix.

    Raw column h holds the family value for observations in slice h and 0
    elsewhere; every column is then mean-centered.
    """
    y = np.asarray(y, dtype=np.float64)
    h = boundaries.n_slices
    if spec.n_slices != h:
        raise DegenerateSlicing(
            f"boundaries built for {h} slices but spec asks for {spec.n_slices}"
        )
    members = slice_memberships(y, boundaries)
    raw = np.zeros((y.size, h))
    raw[np.arange(y.size), members] = 1.0
    if spec.family == "cire":
        raw *= y[:, None]
    elif spec.family == "poly":
        raw *= (y**spec.poly_degree)[:, None]
    return raw - raw.mean(axis=0)
