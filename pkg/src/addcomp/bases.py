"""Haar and sine/cosine basis families sampled at design points.

The component of interest lives on [0,1] and is expanded in the Haar
wavelet family; each nuisance covariate gets a sine/cosine family.  A
Haar label is a pair ``(level, shift)`` with ``0 <= shift < 2**level``,
flattened to the single index ``k = 2**level + shift`` for ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError

HaarLabel = tuple[int, int]


@dataclass(frozen=True)
class SampledBasis:
    """Basis functions evaluated at design points, one function per column."""

    matrix: np.ndarray
    labels: tuple

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def haar_mother(x):
    """Mother wavelet: +1 on [0, 1/2), -1 on [1/2, 1), 0 elsewhere."""
    x = np.asarray(x, dtype=float)
    return np.where((x >= 0) & (x < 0.5), 1.0, np.where((x >= 0.5) & (x < 1.0), -1.0, 0.0))


def haar_eval(level: int, shift: int, x):
    """Haar function ``2**(level/2) * mother(2**level * x - shift)`` on [0,1].

    The support is the half-open dyadic cell, so the value at x = 1 is 0.
    """
    if level < 0 or not 0 <= shift < 2**level:
        raise ValueError(f"invalid Haar label ({level}, {shift})")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise ValueError("Haar functions are defined on [0, 1]")
    out = 2.0 ** (level / 2.0) * haar_mother(2.0**level * x - shift)
    return float(out) if out.ndim == 0 else out


def fourier_eval(k: int, y):
    """k-th sine/cosine function on [0,1]: cos(pi y), sin(pi y), cos(2 pi y), ...

    Even k gives ``sin((k/2) pi y)``, odd k gives ``cos(((k+1)/2) pi y)``.
    """
    if k < 1:
        raise ValueError("index must be >= 1")
    y = np.asarray(y, dtype=float)
    if k % 2 == 0:
        out = np.sin((k // 2) * np.pi * y)
    else:
        out = np.cos(((k + 1) // 2) * np.pi * y)
    return float(out) if out.ndim == 0 else out


def haar_depth(n: int) -> int:
    """Deepest Haar level for a sample of size n: floor(log2(2 sqrt(n) + 1/2))."""
    if n < 4:
        raise ValueError("need n >= 4")
    return int(math.floor(math.log(2.0 * math.sqrt(n) + 0.5) / math.log(2.0)))


def fourier_depth(n: int, n_nuisance: int) -> int:
    """Frequencies per nuisance covariate: floor((4 sqrt(n) - 1) / (2 K))."""
    if n < 4:
        raise ValueError("need n >= 4")
    if n_nuisance < 1:
        raise ValueError("need at least one nuisance covariate")
    return int(math.floor((4.0 * math.sqrt(n) - 1.0) / (2.0 * n_nuisance)))


def dims_for(n: int, n_nuisance: int) -> tuple[int, int, int, int]:
    """Basis depths and dimensions for a design of size n with K nuisance covariates.

    Returns ``(haar_depth, haar_dim, fourier_depth, nuisance_dim)`` where
    ``haar_dim = 2**(haar_depth+1) - 1`` and ``nuisance_dim = 2*K*fourier_depth + 1``
    (the +1 is the constant column).  The combined dimension must leave room
    in R^n, i.e. ``haar_dim + K * 2 * fourier_depth < n``.
    """
    d = haar_depth(n)
    dim_haar = 2 ** (d + 1) - 1
    dp = fourier_depth(n, n_nuisance)
    dim_nuis = 2 * n_nuisance * dp + 1
    if dim_haar + n_nuisance * 2 * dp >= n:
        raise ConfigurationError(
            f"basis dimensions {dim_haar} + {n_nuisance}*{2 * dp} do not fit in a sample of size {n}"
        )
    return d, dim_haar, dp, dim_nuis


def haar_labels(depth: int) -> tuple[HaarLabel, ...]:
    """All labels with level <= depth, ordered by k = 2**level + shift."""
    return tuple((i, j) for i in range(depth + 1) for j in range(2**i))


def haar_design(x: np.ndarray, depth: int) -> SampledBasis:
    """Haar family up to ``depth`` sampled at points x in [0,1]^n.

    Columns follow the flattened ordering k = 2**level + shift, so the
    matrix has ``2**(depth+1) - 1`` columns.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise ValueError("design points must lie in [0, 1]")
    labels = haar_labels(depth)
    n = x.size
    cols = np.zeros((n, len(labels)))
    pos = 0
    for level in range(depth + 1):
        scaled = 2.0**level * x
        cell = np.minimum(scaled.astype(int), 2**level - 1)
        frac = scaled - cell
        # sign of the mother wavelet on the half-open cell; x = 1 gets 0
        value = np.where(frac < 0.5, 1.0, -1.0) * 2.0 ** (level / 2.0)
        value[(x == 1.0)] = 0.0
        cols[np.arange(n), pos + cell] = value
        pos += 2**level
    return SampledBasis(cols, labels)


def nuisance_design(y: np.ndarray, depth: int) -> SampledBasis:
    """Constant column plus sine/cosine families sampled at nuisance covariates.

    ``y`` is (n, K); for each covariate j the block holds
    cos(i pi y_j), sin(i pi y_j) for i = 1..depth.  The constant column
    comes first and absorbs the intercept of the regression.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    n, n_nuisance = y.shape
    if n_nuisance and (np.any(y < 0) or np.any(y > 1)):
        raise ValueError("design points must lie in [0, 1]")
    cols = np.ones((n, 1 + 2 * n_nuisance * depth))
    labels: list = ["const"]
    for j in range(n_nuisance):
        phase = np.pi * y[:, j, None] * np.arange(1, depth + 1)
        block = slice(1 + 2 * depth * j, 1 + 2 * depth * (j + 1))
        cols[:, block.start : block.stop : 2] = np.cos(phase)
        cols[:, block.start + 1 : block.stop : 2] = np.sin(phase)
        for i in range(1, depth + 1):
            labels.append((j, "cos", i))
            labels.append((j, "sin", i))
    return SampledBasis(cols, tuple(labels))
