import numpy as np
import pytest

from errors import StiffnessError
from integrator import dormand_prince


class TestDormandPrince:
    def test_exponential_decay(self):
        times, states = dormand_prince(lambda t, y: -y, 0.0, np.array([1.0]), 1.0, 0.1,
                                       rel_tol=1e-10, abs_tol=1e-12, max_step=1.0)
        np.testing.assert_allclose(times, np.arange(11) * 0.1, atol=1e-15)
        assert states[-1, 0] == pytest.approx(np.exp(-1.0), rel=1e-8)

    def test_harmonic_oscillator(self):
        fun = lambda t, y: np.array([y[1], -y[0]])  # noqa: E731
        times, states = dormand_prince(fun, 0.0, np.array([1.0, 0.0]), 2 * np.pi, np.pi / 2,
                                       rel_tol=1e-10, abs_tol=1e-12, max_step=1.0)
        assert len(times) == 5
        np.testing.assert_allclose(states[-1], [1.0, 0.0], atol=1e-8)

    def test_last_sample_lands_on_end(self):
        times, _ = dormand_prince(lambda t, y: -y, 0.0, np.array([1.0]), 1.05, 0.5,
                                  rel_tol=1e-8, abs_tol=1e-10, max_step=1.0)
        assert times[-1] == 1.05
        assert np.all(np.diff(times) > 0)

    def test_small_negative_overshoot_clamped(self):
        # decaimento até zero em t=1; depois disso a derivada é nula
        fun = lambda t, y: np.where(y > 0, -np.ones_like(y), 0.0)  # noqa: E731
        times, states = dormand_prince(fun, 0.0, np.array([1.0]), 3.0, 0.5,
                                       rel_tol=1e-8, abs_tol=1e-10, max_step=0.1, nonnegative=True)
        assert times[-1] == 3.0
        assert np.all(states >= 0.0)

    def test_sign_changes_allowed_by_default(self):
        times, states = dormand_prince(lambda t, y: -np.ones_like(y), 0.0, np.array([1.0]), 2.0, 0.5,
                                       rel_tol=1e-8, abs_tol=1e-10, max_step=1.0)
        assert states[-1, 0] == pytest.approx(-1.0)

    @pytest.mark.parametrize("sample_dt, max_step", [(0.3, 0.1), (0.1, 0.03), (0.7, 0.1), (1.1, 0.2)])
    def test_rounding_residue_before_sample(self, sample_dt, max_step):
        # t acumulado em múltiplos de max_step fica a um ulp da amostra
        times, states = dormand_prince(lambda t, y: -y, 0.0, np.array([1.0]), 50.0, sample_dt,
                                       rel_tol=1e-4, abs_tol=1e-6, max_step=max_step)
        assert times[-1] == 50.0
        assert np.all(np.diff(times) > 1e-9)
        assert states[-1, 0] == pytest.approx(np.exp(-50.0), abs=1e-6)

    def test_step_underflow_keeps_partial(self):
        def fun(t, y):
            if t > 0.5:
                return np.array([np.nan])
            return -y

        with pytest.raises(StiffnessError) as info:
            dormand_prince(fun, 0.0, np.array([1.0]), 2.0, 0.1,
                           rel_tol=1e-8, abs_tol=1e-10, max_step=1.0)
        times, states = info.value.partial
        assert times[-1] == pytest.approx(0.5)
        assert states[-1, 0] == pytest.approx(np.exp(-0.5), rel=1e-6)
