"""Vector and matrix primitives under the empirical (1/n-scaled) inner product.

All routines work on plain numpy arrays in double precision.  The
empirical norm of ``x`` in R^n is ``sqrt(mean(x**2))``; orthonormality
below always means orthonormality with respect to the matching inner
product ``mean(x*y)``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


def empirical_norm_sq(x: np.ndarray) -> float:
    """Squared empirical norm, ``(1/n) * sum(x_i**2)``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a nonempty 1-d vector")
    return float(x @ x) / x.size


def empirical_inner(x: np.ndarray, y: np.ndarray) -> float:
    """Empirical inner product, ``(1/n) * sum(x_i * y_i)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected nonempty 1-d vectors")
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    return float(x @ y) / x.size


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value of a square matrix.

    The operator norm induced by the empirical norm coincides with the
    Euclidean one (the 1/n factors cancel), so a dense SVD gives it
    exactly.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return float(np.linalg.svd(a, compute_uv=False)[0])


def orthonormalize(columns: np.ndarray, tol: float = 1e-8):
    """Re-orthogonalized Gram-Schmidt under the empirical inner product.

    Parameters
    ----------
    columns : (n, d) array
        Input vectors, one per column.
    tol : float
        Drop tolerance, relative to the largest input column norm.
        Columns whose residual falls below it are treated as linearly
        dependent and skipped.

    Returns
    -------
    basis : (n, k) array
        Orthonormal columns (``basis.T @ basis / n == I_k``) spanning
        the same space, in input order.
    transform : (d, k) array
        Coefficients expressing the output in terms of the input,
        ``basis == columns @ transform``.
    kept : list of int
        Indices of the input columns that produced an output vector.
    """
    m = np.asarray(columns, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0:
        raise ValueError("expected a 2-d array of column vectors")
    n, d = m.shape
    if tol <= 0:
        raise ValueError("tol must be positive")
    col_norms = np.sqrt((m * m).sum(axis=0) / n)
    scale = col_norms.max() if d else 0.0

    # full-rank fast path via a thin QR, oriented like Gram-Schmidt output
    if d and d <= n:
        q, r = np.linalg.qr(m, mode="reduced")
        diag = np.diag(r)
        if np.abs(diag).min() > tol * scale * np.sqrt(n):
            signs = np.sign(diag)
            basis = q * (signs * np.sqrt(n))
            transform = scipy.linalg.solve_triangular(r, np.diag(signs * np.sqrt(n)))
            return basis, transform, list(range(d))

    basis = np.empty((n, d))
    transform = np.zeros((d, d))
    kept: list[int] = []
    k = 0
    for i in range(d):
        v = m[:, i].copy()
        t = np.zeros(d)
        t[i] = 1.0
        # two passes are enough for full re-orthogonalization
        for _ in range(2):
            if k:
                r = basis[:, :k].T @ v / n
                v -= basis[:, :k] @ r
                t -= transform[:, :k] @ r
        nv = np.sqrt((v @ v) / n)
        if nv <= tol * scale:
            continue
        basis[:, k] = v / nv
        transform[:, k] = t / nv
        kept.append(i)
        k += 1
    return basis[:, :k], transform[:, :k].copy(), kept


def gram_schmidt(columns, tol: float = 1e-8) -> list[np.ndarray]:
    """Orthonormalize a list of vectors under the empirical inner product.

    Rank-deficient inputs yield a shorter output list; see
    :func:`orthonormalize` for the matrix form with the change of basis.
    """
    cols = [np.asarray(c, dtype=float) for c in columns]
    if not cols:
        return []
    basis, _, _ = orthonormalize(np.column_stack(cols), tol=tol)
    return [basis[:, j].copy() for j in range(basis.shape[1])]


def project(basis: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Orthogonal projection of ``z`` onto the span of an orthonormal basis.

    ``basis`` is an (n, d) array with orthonormal columns under the
    empirical inner product; d may be zero.  Returns
    ``sum_i <z, u_i>_n u_i``.
    """
    z = np.asarray(z, dtype=float)
    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[1] == 0:
        return np.zeros_like(z)
    if basis.shape[0] != z.shape[0]:
        raise ValueError("basis and vector lengths differ")
    return basis @ (basis.T @ z / z.size)


def check_orthonormal(basis: np.ndarray, tol: float = 1e-8) -> None:
    """Raise ValueError unless the columns are empirically orthonormal."""
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2:
        raise ValueError("expected a 2-d array of column vectors")
    if basis.shape[1] == 0:
        return
    gram = basis.T @ basis / basis.shape[0]
    if not np.allclose(gram, np.eye(basis.shape[1]), atol=tol):
        raise ValueError("basis columns are not orthonormal under the empirical inner product")
