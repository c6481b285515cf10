"""
Finite-difference building blocks on interior-node grids with zero Dirichlet boundary.
"""
from functools import lru_cache
from typing import List

import numpy as np
from scipy import sparse

from nlsground.core.models.schemas import Grid


def abs_power(values: np.ndarray, power: float) -> np.ndarray:
    """Return |values|**power, evaluated as exp(power*log|v|) with |v|=0 mapped to 0.

    ``power == 0`` gives ones everywhere, so sigma=0 keeps a constant shift.
    """
    magnitude = np.abs(values)
    if power == 0:
        return np.ones_like(magnitude)
    out = np.zeros_like(magnitude)
    nonzero = magnitude > 0
    out[nonzero] = np.exp(power * np.log(magnitude[nonzero]))
    return out


def forward_differences(values: np.ndarray, grid: Grid) -> List[np.ndarray]:
    """Forward differences along every axis, including the two boundary edges."""
    diffs = []
    for axis, step in enumerate(grid.h):
        pad = [(0, 0)] * values.ndim
        pad[axis] = (1, 1)
        diffs.append(np.diff(np.pad(values, pad), axis=axis) / step)
    return diffs


def apply_neg_laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Apply the 3-point (1D) or 5-point (2D) negative Dirichlet Laplacian."""
    out = np.zeros_like(values, dtype=float)
    for axis, step in enumerate(grid.h):
        pad = [(0, 0)] * values.ndim
        pad[axis] = (1, 1)
        padded = np.pad(values, pad)
        upper = np.take(padded, np.arange(2, values.shape[axis] + 2), axis=axis)
        lower = np.take(padded, np.arange(0, values.shape[axis]), axis=axis)
        out += (2.0 * values - upper - lower) / step ** 2
    return out


def _second_difference(count: int, step: float) -> sparse.csr_matrix:
    main = np.full(count, 2.0 / step ** 2)
    off = np.full(count - 1, -1.0 / step ** 2)
    return sparse.diags([off, main, off], [-1, 0, 1], format="csr")


@lru_cache(maxsize=16)
def neg_laplacian_matrix(grid: Grid) -> sparse.csr_matrix:
    """Sparse negative Laplacian on ``grid`` in C-order flattening (cached per grid)."""
    if grid.dim == 1:
        return _second_difference(grid.n[0], grid.h[0])
    first = _second_difference(grid.n[0], grid.h[0])
    second = _second_difference(grid.n[1], grid.h[1])
    eye_first = sparse.identity(grid.n[0], format="csr")
    eye_second = sparse.identity(grid.n[1], format="csr")
    return (sparse.kron(first, eye_second) + sparse.kron(eye_first, second)).tocsr()
