"""Oblique projection onto the sampled target space along the nuisance space.

Given sampled bases of a target space E and a nuisance space F with
trivial intersection, the projector maps z to the E-part of its joint
least-squares decomposition over E + F (and kills the orthogonal
complement of E + F).  It is idempotent, has image E and kernel
containing F, and is generally not symmetric.

The dense matrix is kept because every diagnostic the selection step
needs (spectral norm, trace of P'P, per-vector traces) is then exact
and cheap at the sample sizes this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .bases import SampledBasis
from .exceptions import ConfigurationError, DesignDegeneracyError
from .linalg import check_orthonormal, empirical_norm_sq, orthonormalize


@dataclass(frozen=True)
class ObliqueProjector:
    """Dense oblique projector with cached diagnostics.

    Attributes
    ----------
    matrix : (n, n) array
        The projector P.
    basis : (n, dim_target) array
        Orthonormal basis of the image, under the empirical inner
        product, in the order of the surviving target columns.
    labels : tuple
        Labels of the surviving target columns (Haar labels in the
        additive-model pipeline).
    basis_transform : (d_raw, dim_target) array
        Change of basis from the raw target columns to ``basis``.
    rho : float
        Spectral norm of P; at least 1 for a nonzero projector.
    total_trace : float
        Trace of P'P (squared Frobenius norm).
    basis_traces : (dim_target,) array
        Per-basis-vector traces ``|P' u_i|_n^2``; the trace attached to
        a model spanned by a subset of ``basis`` is the matching
        partial sum.
    """

    matrix: np.ndarray
    basis: np.ndarray
    labels: tuple
    basis_transform: np.ndarray
    dim_target: int
    dim_nuisance: int
    rho: float
    total_trace: float
    basis_traces: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def rho2(self) -> float:
        return self.rho**2

    def apply(self, z: np.ndarray) -> np.ndarray:
        """Project a vector: Pz."""
        z = np.asarray(z, dtype=float)
        if z.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}")
        return self.matrix @ z

    def positions(self, labels) -> np.ndarray:
        """Column positions in ``basis`` of the given labels."""
        index = {lab: i for i, lab in enumerate(self.labels)}
        return np.array([index[lab] for lab in labels], dtype=int)


def build_projector(
    target: SampledBasis,
    nuisance: SampledBasis | None,
    gs_tol: float = 1e-8,
    rank_tol: float = 1e-10,
) -> ObliqueProjector:
    """Construct the projector onto span(target) along span(nuisance).

    The two spans must intersect trivially; this is checked through a
    rank-revealing pivoted QR of the stacked orthonormalized blocks with
    relative tolerance ``rank_tol``.  Linearly dependent columns inside
    either block are dropped (with ``gs_tol``) rather than treated as an
    overlap.

    Raises
    ------
    DesignDegeneracyError
        If the spans overlap beyond the tolerance.
    ConfigurationError
        If the combined dimension exceeds the sample size.
    """
    u_t, transform, kept = orthonormalize(target.matrix, tol=gs_tol)
    labels = tuple(target.labels[i] for i in kept)
    n, k_t = u_t.shape
    if k_t == 0:
        raise ConfigurationError("target basis is empty after rank reduction")

    if nuisance is not None and nuisance.matrix.shape[1] > 0:
        u_f, _, _ = orthonormalize(nuisance.matrix, tol=gs_tol)
    else:
        u_f = np.empty((n, 0))
    k_f = u_f.shape[1]
    if k_t + k_f > n:
        raise ConfigurationError(
            f"target ({k_t}) plus nuisance ({k_f}) dimensions exceed the sample size {n}"
        )

    if k_f == 0:
        # no nuisance space: plain orthogonal projection onto the target span
        rows = u_t.T / n
    else:
        w = np.concatenate([u_t, u_f], axis=1)
        q, r, piv = scipy.linalg.qr(w, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r))
        rank = int((diag > rank_tol * diag[0]).sum())
        if rank < k_t + k_f:
            raise DesignDegeneracyError(
                "sampled target and nuisance spaces intersect; the procedure "
                "assumes a trivial intersection"
            )
        # coefficients of z over [target nuisance]; keep the target rows
        coeffs = scipy.linalg.solve_triangular(r, q.T)
        rows = np.empty((k_t, n))
        for qr_row, col in enumerate(piv):
            if col < k_t:
                rows[col] = coeffs[qr_row]
    p = u_t @ rows

    # P = U M with U'U = n I, so the nonzero spectrum of P'P is n * eig(M M')
    # and |P' u_i|_n^2 = n * (M M')_ii; this keeps the diagnostics exact
    # without a dense SVD.
    gram = rows @ rows.T
    eigs = np.linalg.eigvalsh(gram)
    return ObliqueProjector(
        matrix=p,
        basis=u_t,
        labels=labels,
        basis_transform=transform,
        dim_target=k_t,
        dim_nuisance=k_f,
        rho=float(np.sqrt(n * max(eigs[-1], 0.0))),
        total_trace=float(n * np.trace(gram)),
        basis_traces=n * np.diag(gram).copy(),
    )


def model_trace(projector: ObliqueProjector, model_basis: np.ndarray) -> float:
    """Trace of P' pi_m P for the model spanned by an orthonormal basis.

    ``model_basis`` is (n, d) with empirically orthonormal columns; the
    result equals the trace of the explicit matrix product with the
    Euclidean projector of the span, and sits in [0, rho^2 * d].
    """
    model_basis = np.asarray(model_basis, dtype=float)
    if model_basis.ndim == 1:
        model_basis = model_basis[:, None]
    if model_basis.shape[1] == 0:
        return 0.0
    check_orthonormal(model_basis)
    pt_v = projector.matrix.T @ model_basis
    return float((pt_v * pt_v).sum()) / projector.n


def residual_trace(projector: ObliqueProjector, v_basis: np.ndarray) -> float:
    """Trace of P'(I - pi)P for the variance space V spanned by ``v_basis``.

    V must satisfy the half-trace condition
    ``Tr(P' pi P) <= Tr(P'P) / 2``; the returned value is then strictly
    positive and is the denominator of the residual variance estimator.
    """
    tr_v = model_trace(projector, v_basis)
    half = projector.total_trace / 2.0
    if tr_v > half * (1.0 + 1e-12):
        raise ConfigurationError(
            f"variance space violates the half-trace condition: "
            f"Tr(P' pi P) = {tr_v:.6g} > Tr(P'P)/2 = {half:.6g}"
        )
    return projector.total_trace - tr_v


def estimate_variance(y: np.ndarray, v_basis: np.ndarray, projector: ObliqueProjector) -> float:
    """Residual least-squares estimator of the noise variance.

    ``n * |y - pi y|_n^2 / Tr(P'(I - pi)P)`` where pi is the orthogonal
    projection onto the variance space V.
    """
    y = np.asarray(y, dtype=float)
    v_basis = np.asarray(v_basis, dtype=float)
    denom = residual_trace(projector, v_basis)
    if v_basis.ndim == 2 and v_basis.shape[1] > 0:
        resid = y - v_basis @ (v_basis.T @ y / y.size)
    else:
        resid = y
    return y.size * empirical_norm_sq(resid) / denom


def default_variance_space(projector: ObliqueProjector) -> np.ndarray:
    """Largest leading slice of the image basis allowed by the half-trace condition.

    Grows the candidate space one basis vector at a time, from dimension
    zero upward, and stops before the cumulative trace would exceed
    Tr(P'P)/2.
    """
    cum = np.cumsum(projector.basis_traces)
    half = projector.total_trace / 2.0
    dim = int((cum <= half * (1.0 + 1e-12)).sum())
    return projector.basis[:, :dim]
