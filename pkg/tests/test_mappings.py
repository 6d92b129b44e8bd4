import numpy as np
import pytest

from conftest import c_species, q_species
from errors import DomainError
from mappings import (
    cap_Q, cap_Y, clamp_quota, f_inverse, f_of_q, gamma_inverse, quota_max, s_of_q, s_of_y,
    y_threshold,
)
from models import CaperonMeyerGrowth, MMUptake, QParams, QSpecies
from rates import rate_c, uptake_q


@pytest.fixture
def phyto():
    return q_species("Q", 1.0, 1.0, 1.0, 0.5)


@pytest.fixture
def caperon():
    return QSpecies(id="Q", params=QParams(uptake=MMUptake(rho_max=1.2, K_s=0.7),
                                           growth=CaperonMeyerGrowth(gamma_bar=1.5, Q0=0.4, K_q=0.3)))


class TestFOfQ:
    def test_values(self, phyto):
        assert f_of_q(phyto, 1.0) == pytest.approx(0.5)
        assert f_inverse(phyto, 0.5) == pytest.approx(1.0)

    @pytest.mark.parametrize("fixture", ["phyto", "caperon"])
    def test_inverse_round_trip(self, fixture, request):
        sp = request.getfixturevalue(fixture)
        rng = np.random.default_rng(3)
        Q0 = sp.growth.Q0
        for q in rng.uniform(Q0 * 1.001, 10 * Q0, 100):
            assert f_inverse(sp, f_of_q(sp, q)) == pytest.approx(q, abs=1e-10)

    def test_nonpositive_demand_rejected(self, phyto):
        with pytest.raises(DomainError):
            f_inverse(phyto, 0.0)

    def test_gamma_inverse(self, phyto):
        assert gamma_inverse(phyto, 0.5) == pytest.approx(1.0)
        assert gamma_inverse(phyto, 1.0) is None


class TestCapQ:
    def test_values(self, phyto):
        assert cap_Q(phyto, 1.0) == pytest.approx(1.0)
        assert quota_max(phyto) == pytest.approx(1.5)
        assert cap_Q(phyto, 1e9) == pytest.approx(1.5, rel=1e-8)
        assert cap_Q(phyto, 0.0) == 0.5

    def test_maps_into_open_interval(self, caperon):
        for s in np.geomspace(1e-3, 1e3, 200):
            q = cap_Q(caperon, s)
            assert caperon.growth.Q0 < q < quota_max(caperon)

    def test_s_of_q(self, phyto):
        assert s_of_q(phyto, 1.0) == pytest.approx(1.0)
        assert s_of_q(phyto, 1.1) == pytest.approx(1.5)

    def test_s_of_q_outside_interval(self, phyto):
        with pytest.raises(DomainError):
            s_of_q(phyto, 0.5)
        with pytest.raises(DomainError):
            s_of_q(phyto, 1.5)

    @pytest.mark.parametrize("fixture", ["phyto", "caperon"])
    def test_round_trip(self, fixture, request):
        sp = request.getfixturevalue(fixture)
        for s in np.random.default_rng(1).uniform(0.01, 100.0, 100):
            assert s_of_q(sp, cap_Q(sp, s)) == pytest.approx(s, rel=1e-8)

    def test_sign_property(self, phyto):
        rng = np.random.default_rng(7)
        for s, q in zip(rng.uniform(0.01, 10.0, 1000), rng.uniform(0.51, 1.49, 1000)):
            gap = uptake_q(phyto, s) - f_of_q(phyto, q)
            if abs(gap) < 1e-9:
                continue
            assert np.sign(gap) == np.sign(s - s_of_q(phyto, q))
            assert np.sign(gap) == np.sign(cap_Q(phyto, s) - q)

    def test_clamp(self, phyto):
        assert 0.5 < clamp_quota(phyto, 0.3) < 0.5 + 1e-9
        assert 1.5 - 1e-9 < clamp_quota(phyto, 2.0) < 1.5
        assert clamp_quota(phyto, 1.0) == 1.0


class TestCapY:
    def test_values(self):
        sp = c_species("C", 1.0, 1.0)
        assert cap_Y(sp, 0.5, 1.0) == pytest.approx(1.0)
        assert rate_c(sp, 1.0, cap_Y(sp, 0.5, 1.0)) == pytest.approx(0.5)
        assert cap_Y(sp, 0.5, 0.0) == 0.0
        assert cap_Y(c_species("C", 0.4, 1.0), 0.5, 2.0) == 0.0

    def test_s_of_y(self):
        sp = c_species("C", 1.0, 1.0)
        assert s_of_y(sp, 0.5, 0.9).value == pytest.approx(0.9)
        assert s_of_y(sp, 0.5, 0.0).value == 0.0
        assert s_of_y(c_species("C", 0.4, 1.0), 0.5, 1.0).is_infinite
        assert y_threshold(sp, 0.5).value == 0.0

    def test_round_trip(self):
        sp = c_species("C", 2.0, 0.6)
        for s in np.linspace(0.01, 10.0, 50):
            assert s_of_y(sp, 0.7, cap_Y(sp, 0.7, s)).value == pytest.approx(s, rel=1e-10)

    def test_sign_property(self):
        sp = c_species("C", 1.3, 0.8)
        D = 0.6
        rng = np.random.default_rng(11)
        for s, y in zip(rng.uniform(0.01, 5.0, 1000), rng.uniform(0.01, 5.0, 1000)):
            gap = rate_c(sp, s, y) - D
            if abs(gap) < 1e-9:
                continue
            assert np.sign(gap) == np.sign(cap_Y(sp, D, s) - y)
            assert np.sign(gap) == np.sign(s - s_of_y(sp, D, y).value)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            cap_Y(c_species("C", 1.0, 1.0), 0.0, 1.0)
        with pytest.raises(DomainError):
            s_of_y(c_species("C", 1.0, 1.0), 0.5, -1.0)
