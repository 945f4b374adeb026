import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from addcomp.bases import haar_design
from addcomp.estimator import AdditiveComponentRegressor


def _noiseless_data(rng, n=512, depth=2, n_nuisance=0, coef_scale=1.0):
    """Target built from known Haar function coefficients, no noise."""
    x = rng.random(n)
    basis = haar_design(x, depth)
    coef = coef_scale * rng.uniform(0.5, 1.5, basis.dim) * rng.choice([-1, 1], basis.dim)
    z = basis.matrix @ coef
    cols = [x] + [rng.random(n) for _ in range(n_nuisance)]
    return np.column_stack(cols), z, dict(zip(basis.labels, coef))


class TestSklearnApi:
    def test_get_set_params_roundtrip(self):
        model = AdditiveComponentRegressor(collection="complete", C=2.0, sigma2=0.5)
        params = model.get_params()
        assert params["collection"] == "complete"
        other = AdditiveComponentRegressor().set_params(**params)
        assert other.C == 2.0

    def test_clone(self):
        model = AdditiveComponentRegressor(C=3.0)
        assert clone(model).C == 3.0

    def test_not_fitted_error(self):
        with pytest.raises(NotFittedError):
            AdditiveComponentRegressor().predict(np.array([0.5]))

    def test_default_constant_per_collection(self):
        assert AdditiveComponentRegressor()._resolved_C() == 1.5
        assert AdditiveComponentRegressor(collection="complete")._resolved_C() == 4.5

    def test_fit_returns_self(self):
        rng = np.random.default_rng(0)
        X, z, _ = _noiseless_data(rng)
        model = AdditiveComponentRegressor(sigma2=1e-12)
        assert model.fit(X, z) is model


class TestValidation:
    def test_out_of_range_target_covariate(self):
        X = np.array([[0.5], [1.2], [0.3], [0.4], [0.6]])
        with pytest.raises(ValueError, match="x"):
            AdditiveComponentRegressor().fit(X, np.zeros(5))

    def test_out_of_range_nuisance_covariate_named(self):
        rng = np.random.default_rng(1)
        X = np.column_stack([rng.random(10), rng.random(10), rng.random(10) + 1.0])
        with pytest.raises(ValueError, match="y2"):
            AdditiveComponentRegressor().fit(X, np.zeros(10))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            AdditiveComponentRegressor().fit(np.zeros((5, 1)), np.zeros(6))

    def test_predict_range_checked(self):
        rng = np.random.default_rng(2)
        X, z, _ = _noiseless_data(rng)
        model = AdditiveComponentRegressor(sigma2=1e-12).fit(X, z)
        with pytest.raises(ValueError):
            model.predict(np.array([1.5]))


class TestRecovery:
    def test_noiseless_coefficient_roundtrip(self):
        # noiseless target inside the expansion space: the fitted function
        # coefficients reproduce the generating ones
        rng = np.random.default_rng(3)
        X, z, truth = _noiseless_data(rng, n=512, depth=2)
        model = AdditiveComponentRegressor(sigma2=1e-12).fit(X, z)
        fitted = dict(zip(model.labels_, model.coef_))
        for label, value in truth.items():
            assert fitted[label] == pytest.approx(value, abs=1e-6)

    def test_fitted_values_match_predict_on_training_points(self):
        rng = np.random.default_rng(4)
        X, z, _ = _noiseless_data(rng, n=512, depth=2, n_nuisance=1)
        model = AdditiveComponentRegressor(sigma2=1e-12).fit(X, z)
        np.testing.assert_allclose(model.predict(X), model.fitted_values_, atol=1e-8)

    def test_predict_accepts_1d_covariate(self):
        rng = np.random.default_rng(5)
        X, z, _ = _noiseless_data(rng)
        model = AdditiveComponentRegressor(sigma2=1e-12).fit(X, z)
        grid = np.linspace(0, 1, 9)
        assert model.predict(grid).shape == grid.shape

    def test_estimated_variance_mode(self):
        rng = np.random.default_rng(6)
        X, z, _ = _noiseless_data(rng, n=512, n_nuisance=1, coef_scale=0.5)
        z = z + rng.standard_normal(512)
        model = AdditiveComponentRegressor(sigma2=None).fit(X, z)
        assert model.sigma2_used_ > 0
        assert 0.5 < model.sigma2_used_ < 2.0

    def test_complete_collection_thresholds(self):
        rng = np.random.default_rng(7)
        X, z, _ = _noiseless_data(rng, n=512, coef_scale=3.0)
        z = z + 0.1 * rng.standard_normal(512)
        model = AdditiveComponentRegressor(collection="complete", sigma2=0.01).fit(X, z)
        assert len(model.selected_labels_) > 0
        assert model.criterion_ >= 0

    def test_diagnostics_exposed(self):
        rng = np.random.default_rng(8)
        X, z, _ = _noiseless_data(rng, n=512, n_nuisance=2)
        model = AdditiveComponentRegressor(sigma2=1.0).fit(X, z)
        assert model.rho_ >= 1.0
        assert model.rho2_ == pytest.approx(model.rho_**2)
        assert model.total_trace_ >= model.projector_.dim_target - 1e-9
        assert model.n_features_in_ == 3
