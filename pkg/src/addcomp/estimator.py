"""Scikit-learn style estimator for one component of an additive model.

The estimator fits the component attached to the FIRST column of X; the
remaining columns are nuisance covariates whose additive effects (and
the intercept) are projected out before model selection.  All covariates
must live in [0,1]; they are never rescaled, because the basis functions
are defined on the unit interval and silent rescaling would change the
estimand.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .bases import dims_for, haar_depth, haar_design, haar_eval, nuisance_design
from .exceptions import ConfigurationError
from .projection import build_projector
from .selection import COMPLETE, NESTED, PenaltySpec, select

DEFAULT_C = {NESTED: 1.5, COMPLETE: 4.5}


def check_unit_interval(values: np.ndarray, name: str) -> None:
    """Raise ValueError if any value falls outside [0, 1]."""
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise ValueError(f"column {name} has values outside [0, 1]")


class AdditiveComponentRegressor(BaseEstimator, RegressorMixin):
    """Penalized least-squares estimator of one additive component.

    Parameters
    ----------
    collection : {"nested", "complete"}
        Family of candidate models over the Haar expansion of the
        component.  "nested" keeps one model per resolution level;
        "complete" searches every subset of coefficients (via exact
        thresholding) and pays a log-cardinality premium in the penalty.
    C : float or None
        Penalty tuning constant.  ``None`` picks 1.5 for the nested
        family and 4.5 for the complete one.
    sigma2 : float or None
        Known noise variance.  ``None`` plugs in the residual variance
        estimator computed on a large subspace of the projected data.
    gs_tol : float
        Drop tolerance of the orthonormalization of the sampled bases.
    rank_tol : float
        Relative tolerance of the rank check guarding against an
        overlap between the target and nuisance spaces.

    Attributes
    ----------
    coef_ : ndarray of shape (n_basis,)
        Coefficients of the fitted component in the raw Haar function
        basis, aligned with ``labels_``; zero outside the selected model.
    selected_labels_ : tuple of (level, shift)
        Labels of the selected model.
    fitted_values_ : ndarray of shape (n_samples,)
        Fitted component at the training covariate.
    sigma2_used_ : float
        Variance value that entered the penalty.
    rho_, rho2_ : float
        Spectral norm of the projector and its square; values close to
        one mean the nuisance space barely inflates the noise.
    """

    def __init__(
        self,
        collection: str = NESTED,
        C: float | None = None,
        sigma2: float | None = None,
        gs_tol: float = 1e-8,
        rank_tol: float = 1e-10,
    ):
        self.collection = collection
        self.C = C
        self.sigma2 = sigma2
        self.gs_tol = gs_tol
        self.rank_tol = rank_tol

    def _resolved_C(self) -> float:
        if self.C is not None:
            return float(self.C)
        try:
            return DEFAULT_C[self.collection]
        except KeyError:
            raise ValueError(f"unknown collection {self.collection!r}") from None

    def fit(self, X, y):
        X = check_array(X, dtype=float, ensure_2d=True)
        y = column_or_1d(y, warn=False).astype(float)
        n, n_cols = X.shape
        if y.shape[0] != n:
            raise ValueError("X and y have inconsistent lengths")
        if n < 4:
            raise ValueError("need at least 4 samples")
        n_nuisance = n_cols - 1
        check_unit_interval(X[:, 0], "x")
        for j in range(n_nuisance):
            check_unit_interval(X[:, j + 1], f"y{j + 1}")

        if n_nuisance >= 1:
            depth, _, f_depth, _ = dims_for(n, n_nuisance)
        else:
            depth, f_depth = haar_depth(n), 0
            if 2 ** (depth + 1) - 1 >= n:
                raise ConfigurationError("Haar basis does not fit in the sample")
        target = haar_design(X[:, 0], depth)
        nuisance = nuisance_design(X[:, 1:], f_depth)
        projector = build_projector(target, nuisance, gs_tol=self.gs_tol, rank_tol=self.rank_tol)

        projected = projector.matrix @ y
        spec = PenaltySpec(family=self.collection, C=self._resolved_C(), sigma2=self.sigma2)
        outcome = select(projected, spec, projector)

        # back to function space: coefficients on the raw Haar functions
        full = np.zeros(projector.dim_target)
        full[projector.positions(outcome.model.labels)] = [
            outcome.coefficients[lab] for lab in outcome.model.labels
        ]
        self.coef_ = projector.basis_transform @ full
        self.labels_ = target.labels
        self.selected_labels_ = outcome.model.labels
        self.basis_coef_ = dict(outcome.coefficients)
        self.fitted_values_ = outcome.estimate
        self.criterion_ = outcome.criterion
        self.sigma2_used_ = outcome.sigma2_used
        self.rho_ = projector.rho
        self.rho2_ = projector.rho2
        self.total_trace_ = projector.total_trace
        self.selected_trace_ = outcome.diagnostics["trace"]
        self.haar_depth_ = depth
        self.fourier_depth_ = f_depth
        self.projector_ = projector
        self.outcome_ = outcome
        self.n_features_in_ = n_cols
        return self

    def predict(self, X):
        """Evaluate the fitted component at new points of its covariate.

        Accepts either a 1-d array of covariate values or a 2-d design
        whose first column is used; values must lie in [0, 1].
        """
        check_is_fitted(self, "coef_")
        X = np.asarray(X, dtype=float)
        x = X[:, 0] if X.ndim == 2 else X
        check_unit_interval(x, "x")
        out = np.zeros_like(x, dtype=float)
        for coef, (level, shift) in zip(self.coef_, self.labels_):
            if coef != 0.0:
                out += coef * haar_eval(level, shift, x)
        return out
