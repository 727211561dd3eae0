"""Input-validation helpers shared across estimators and free functions."""

from __future__ import annotations

import numpy as np
from scipy import sparse


def as_row_vector(x) -> sparse.csr_matrix:
    """Coerce a 1-D array, list, or sparse row into a 1 x n CSR matrix."""
    if sparse.issparse(x):
        m = x.tocsr().astype(np.float64)
        if m.shape[0] != 1:
            if m.shape[1] == 1:
                m = m.T.tocsr()
            else:
                raise ValueError(f"expected a vector, got shape {m.shape}")
        return m
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        arr = np.squeeze(arr)
    if arr.ndim != 1:
        raise ValueError(f"expected a vector, got shape {np.shape(x)}")
    return sparse.csr_matrix(arr.reshape(1, -1))


def check_nonnegative(v: sparse.csr_matrix, name: str = "vector") -> None:
    if v.nnz and v.data.min() < 0:
        raise ValueError(f"{name} has negative components")


def as_csr_rows(X) -> sparse.csr_matrix:
    """Coerce a 2-D array or sparse matrix into CSR float64 rows."""
    if sparse.issparse(X):
        return X.tocsr().astype(np.float64)
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    return sparse.csr_matrix(arr)


def row_norms(X: sparse.csr_matrix) -> np.ndarray:
    return np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())


def check_finite(a: np.ndarray, name: str = "array") -> None:
    if not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite values")
