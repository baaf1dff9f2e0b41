"""Container for a supervised sample: response vector plus covariate matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DatasetError


@dataclass(frozen=True)
class Dataset:
    """A response vector ``y`` paired with an n-by-p covariate matrix ``x``.

    ``feature_names`` is optional; when present it must have one name per
    covariate column. Arrays are validated to be finite on construction.
    """

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 2:
            raise DatasetError(f"covariate matrix must be 2-d, got shape {x.shape}")
        if y.ndim != 1:
            raise DatasetError(f"response must be 1-d, got shape {y.shape}")
        if x.shape[0] != y.shape[0]:
            raise DatasetError(
                f"row mismatch: {x.shape[0]} covariate rows vs {y.shape[0]} responses"
            )
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise DatasetError("dataset needs at least one row and one column")
        if not np.all(np.isfinite(x)):
            raise DatasetError("covariates contain NaN or Inf")
        if not np.all(np.isfinite(y)):
            raise DatasetError("responses contain NaN or Inf")
        if self.feature_names is not None and len(self.feature_names) != x.shape[1]:
            raise DatasetError(
                f"{len(self.feature_names)} feature names for {x.shape[1]} columns"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def subset(self, rows: np.ndarray) -> "Dataset":
        """Dataset restricted to the given row indices (copy)."""
        return Dataset(self.x[rows], self.y[rows], self.feature_names)
