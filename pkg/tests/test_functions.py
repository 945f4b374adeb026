import numpy as np
import pytest
from scipy.integrate import quad

from addcomp import functions


class TestValues:
    def test_sine_burst_peak(self):
        # sin(4 pi / 8) = sin(pi/2); no centering needed
        assert functions.evaluate("f1", 0.125) == pytest.approx(1.0)

    def test_sigmoid_is_odd_about_half(self):
        assert functions.evaluate("f5", 0.5) == pytest.approx(0.0)
        assert functions.evaluate("f5", 0.3) == pytest.approx(-functions.evaluate("f5", 0.7))

    def test_parabola_at_zero(self):
        assert functions.evaluate("f6", 0.0) == pytest.approx(-1.0)

    def test_zero_function(self):
        np.testing.assert_array_equal(functions.evaluate("zero", np.linspace(0, 1, 5)), 0.0)

    def test_unknown_id_rejected(self):
        with pytest.raises(ValueError):
            functions.evaluate("f9", 0.5)

    def test_domain_checked(self):
        with pytest.raises(ValueError):
            functions.evaluate("f1", 1.5)

    def test_vectorized(self):
        x = np.linspace(0, 1, 11)
        out = functions.evaluate("f3", x)
        assert out.shape == x.shape


class TestCentering:
    @pytest.mark.parametrize("fid", functions.FUNCTION_IDS)
    def test_integrates_to_zero(self, fid):
        value, _ = quad(lambda u: functions.evaluate(fid, u), 0.0, 1.0, limit=200)
        assert abs(value) < 1e-6

    def test_uncentered_ids_have_zero_constant(self):
        for fid in ("f1", "f5", "f6"):
            assert functions.centering_constant(fid) == 0.0

    def test_shifted_ids_have_positive_constant(self):
        for fid in ("f2", "f3", "f4"):
            assert functions.centering_constant(fid) != 0.0


class TestRegister:
    def test_custom_function_roundtrip(self):
        functions.register("bump", lambda x: np.asarray(x) * 0.0 + np.sin(2 * np.pi * np.asarray(x)))
        try:
            assert functions.evaluate("bump", 0.25) == pytest.approx(1.0, abs=1e-9)
        finally:
            functions._RAW.pop("bump")
            functions.centering_constant.cache_clear()
