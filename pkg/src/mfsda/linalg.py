"""Dense linear-algebra primitives for the selection pipeline.

Everything here is a thin, contract-checked layer over numpy/scipy:
column centering, symmetric positive-definite factorization and solves,
inverse-Gram diagonals, and multi-response ordinary least squares. All
functions are pure and safe to call concurrently.

Gram matrices are used unnormalized (X^T X, no 1/n). Rescaling the Gram
by a constant rescales every downstream ranking statistic by the same
global factor, which leaves the selected set unchanged because thresholds
only compare the statistics against data-derived candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateInput, InsufficientSamples, SingularGram

# Relative pivot tolerance for declaring a Gram matrix singular.
PIVOT_RTOL = 1e-12


def center_columns(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Subtract the sample mean from every column.

    Parameters
    ----------
    m : ndarray, shape (n, k)
        Input with at least two rows.

    Returns
    -------
    centered : ndarray, shape (n, k)
        Copy of ``m`` with zero-mean columns.
    means : ndarray, shape (k,)
        The per-column means that were subtracted.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    if m.shape[0] < 2:
        raise DegenerateInput(f"centering needs >= 2 rows, got {m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise DegenerateInput("matrix contains NaN or Inf")
    means = m.mean(axis=0)
    return m - means, means


@dataclass(frozen=True)
class SpdFactor:
    """Lower-triangular Cholesky factor of a symmetric positive-definite matrix."""

    dimension: int
    factor: np.ndarray  # (k, k) lower triangular, strictly positive diagonal

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve A x = b where A = L L^T is the factored matrix."""
        z = scipy.linalg.solve_triangular(self.factor, b, lower=True)
        return scipy.linalg.solve_triangular(self.factor, z, lower=True, trans="T")

    def inverse_diagonal(self) -> np.ndarray:
        """Diagonal of A^-1, i.e. e_j^T A^-1 e_j for each j."""
        inv_l = scipy.linalg.solve_triangular(
            self.factor, np.eye(self.dimension), lower=True
        )
        return np.sum(inv_l**2, axis=0)


def factor_spd(a: np.ndarray) -> SpdFactor:
    """Factor a symmetric positive-definite matrix as L L^T.

    Raises
    ------
    SingularGram
        If the factorization fails or any pivot falls at or below
        ``PIVOT_RTOL * max|a|``.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DegenerateInput(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T)) > 1e-10 * max(scale, 1.0):
        raise DegenerateInput("matrix is not symmetric")
    try:
        lower = scipy.linalg.cholesky(a, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularGram(f"matrix is not positive definite: {exc}") from None
    pivots = np.diagonal(lower) ** 2
    tol = PIVOT_RTOL * np.max(np.abs(a))
    if np.min(pivots) <= tol:
        raise SingularGram(
            f"pivot {np.min(pivots):.3e} at or below tolerance {tol:.3e}"
        )
    return SpdFactor(dimension=a.shape[0], factor=lower)


def spd_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A X = B for symmetric positive-definite A.

    One step of iterative refinement keeps the multiply-back residual small
    even for poorly conditioned (but still accepted) systems.
    """
    b = np.asarray(b, dtype=np.float64)
    fac = factor_spd(a)
    x = fac.solve(b)
    return x + fac.solve(b - a @ x)


def spd_inverse_diagonal(a: np.ndarray) -> np.ndarray:
    """Diagonal entries of A^-1 for symmetric positive-definite A."""
    return factor_spd(a).inverse_diagonal()


def multi_response_ols(
    x: np.ndarray, f: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares coefficients for several responses sharing one design.

    Solves the normal equations (X^T X) B = X^T F column by column and
    returns, alongside the q-by-H coefficient matrix, the diagonal of the
    inverse Gram matrix (the squared per-feature scale factors).

    Parameters
    ----------
    x : ndarray, shape (n, q)
        Centered design matrix with n > q.
    f : ndarray, shape (n, H) or (n,)
        Centered response columns.

    Returns
    -------
    coefficients : ndarray, shape (q, H)
    inv_gram_diag : ndarray, shape (q,)
        e_j^T (X^T X)^-1 e_j, strictly positive.
    """
    x = np.asarray(x, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 1:
        f = f[:, None]
    n, q = x.shape
    if n <= q:
        raise InsufficientSamples(f"n={n} samples for q={q} features needs n > q")
    if f.shape[0] != n:
        raise DegenerateInput(f"design has {n} rows but responses have {f.shape[0]}")
    fac = factor_spd(x.T @ x)
    coefficients = fac.solve(x.T @ f)
    return coefficients, fac.inverse_diagonal()
