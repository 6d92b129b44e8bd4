import numpy as np
import pytest

from conftest import c_species, m_species, q_species
from equilibria import (
    enumerate_equilibria, is_compliant, predict_outcome, s_y_star, subsistence_x, subsistence_y,
    subsistence_z,
)
from errors import PreconditionError
from mappings import cap_Q
from models import Scenario
from rates import rate_q_growth
from roots import bracketed_root
from simulate import rhs
from validation import random_scenario


class TestSubsistence:
    def test_x(self):
        assert subsistence_x(m_species("M", 1.0, 1.0), 0.5, 3.0).value == pytest.approx(1.0)
        assert subsistence_x(m_species("M", 1.0, 2.0), 0.5, 3.0).value == pytest.approx(2.0)
        assert subsistence_x(m_species("M", 0.4, 1.0), 0.5, 3.0).value is None

    def test_x_above_inflow(self):
        # sˣ★ = 2 > s_in = 1.5
        assert subsistence_x(m_species("M", 1.0, 2.0), 0.5, 1.5).value is None

    def test_z(self):
        k = q_species("Q", 1.0, 1.0, 1.0, 0.5)
        assert subsistence_z(k, 0.5, 3.0).value == pytest.approx(1.0)
        assert subsistence_z(q_species("Q", 1.0, 1.0, 0.4, 0.5), 0.5, 3.0).value is None

    def test_z_matches_bisection_oracle(self):
        k = q_species("Q", 1.3, 0.6, 1.1, 0.3)
        D, s_in = 0.4, 4.0
        oracle = bracketed_root(lambda s: rate_q_growth(k, cap_Q(k, s)) - D, 1e-9, s_in)
        assert subsistence_z(k, D, s_in).value == pytest.approx(oracle, abs=1e-10)

    def test_y_threshold(self):
        assert subsistence_y(c_species("C", 1.0, 1.0), 0.5, 3.0).value == 0.0
        assert subsistence_y(c_species("C", 0.4, 1.0), 0.5, 3.0).value is None

    def test_s_y_star(self):
        G = (c_species("C", 1.0, 1.0),)
        assert s_y_star(G, 0.5, 1.0) == pytest.approx(0.5)
        assert s_y_star(G, 0.5, 3.0) == pytest.approx(1.5)
        assert s_y_star((), 0.5, 3.0) == 3.0


class TestCompliance:
    def test_examples(self):
        assert is_compliant(c_species("C", 1.0, 1.0), 1.0, 0.5)
        assert not is_compliant(m_species("M", 1.0, 2.0), 1.0, 0.5)
        assert is_compliant(q_species("Q", 1.0, 1.0, 1.0, 0.5), 1.0, 0.5)

    def test_non_viable_c(self):
        assert not is_compliant(c_species("C", 0.4, 1.0), 1.0, 0.5)


class TestEnumerate:
    def test_figure_classes(self, figure_scenario):
        labels = [eq.label for eq in enumerate_equilibria(figure_scenario)]
        assert labels == ["E0", "Ex(M)", "Ez(Q)", "Ey({C})", "Exy(M,{C})", "Ezy(Q,{C})"]

    def test_coexistence_state(self, figure_scenario):
        ezy = next(eq for eq in enumerate_equilibria(figure_scenario) if eq.eq_class == "Ezy")
        np.testing.assert_allclose(ezy.state.to_vector(), [1.0, 0.0, 1.0, 1.0, 1.0], atol=1e-12)
        assert ezy.survivors == ("C", "Q")

    def test_free_m_state(self, figure_scenario):
        ex = next(eq for eq in enumerate_equilibria(figure_scenario) if eq.eq_class == "Ex")
        assert ex.state.s == pytest.approx(2.0)
        assert ex.state.x == pytest.approx((1.0,))
        assert ex.state.q == pytest.approx((0.5 + 2.0 / 3.0,))

    def test_negative_biomass_flagged(self, figure_scenario):
        exy = next(eq for eq in enumerate_equilibria(figure_scenario) if eq.eq_class == "Exy")
        assert exy.state.x[0] == pytest.approx(-1.0)
        assert not exy.in_positive_orthant

    def test_empty_roster(self):
        eqs = enumerate_equilibria(Scenario(D=0.5, s_in=3.0))
        assert [eq.label for eq in eqs] == ["E0"]
        assert eqs[0].state.s == 3.0

    def test_all_subsets(self):
        sc = Scenario(D=0.5, s_in=3.0, c_species=(c_species("C1", 1.0, 1.0), c_species("C2", 2.0, 3.0)))
        canonical = [eq.label for eq in enumerate_equilibria(sc)]
        full = [eq.label for eq in enumerate_equilibria(sc, all_subsets=True)]
        assert canonical == ["E0", "Ey({C1,C2})"]
        assert sorted(full) == sorted(["E0", "Ey({C1,C2})", "Ey({C1})", "Ey({C2})"])

    def test_subset_cap(self):
        sc = Scenario(D=0.5, s_in=3.0, c_species=tuple(c_species(f"C{n}", 1.0 + 0.1 * n, 1.0) for n in range(13)))
        with pytest.raises(PreconditionError):
            enumerate_equilibria(sc, all_subsets=True)

    @pytest.mark.parametrize("seed", range(4))
    def test_fixed_points_and_mass_balance(self, seed):
        sc = random_scenario(seed)
        for eq in enumerate_equilibria(sc):
            derivative = rhs(sc, eq.state).to_vector()
            assert np.max(np.abs(derivative)) < 1e-9
            assert eq.state.total_substrate == pytest.approx(sc.s_in, abs=1e-9)


class TestPredictOutcome:
    def test_zone_three(self, figure_scenario):
        prediction = predict_outcome(figure_scenario)
        assert prediction.s_star == pytest.approx(1.0)
        assert prediction.s_star_class == "Z"
        assert prediction.compliant == ("C", "Q")
        np.testing.assert_allclose(prediction.e_star.state.to_vector(), [1.0, 0.0, 1.0, 1.0, 1.0], atol=1e-12)

    def test_zone_two(self, figure_scenario):
        prediction = predict_outcome(figure_scenario.with_controls(0.5, 1.0))
        assert prediction.s_star == pytest.approx(0.5)
        assert prediction.s_star_class == "Y"
        assert prediction.compliant == ("C",)
        assert prediction.e_star.state.y == pytest.approx((0.5,))

    def test_washout(self, figure_scenario):
        prediction = predict_outcome(figure_scenario.with_controls(2.0, 3.0))
        assert prediction.washout
        assert prediction.e_star.label == "E0"
        assert prediction.compliant == ()

    @pytest.mark.parametrize("seed", range(6))
    def test_s_star_is_lowest_positive_equilibrium(self, seed):
        sc = random_scenario(seed, max_per_class=3)
        lowest = min(eq.s_eq for eq in enumerate_equilibria(sc) if eq.in_positive_orthant)
        assert predict_outcome(sc).s_star == pytest.approx(lowest, abs=1e-12)
