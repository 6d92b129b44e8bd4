"""
Fixtures compartilhadas pelos testes
"""
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from models import (  # noqa: E402
    CParams, CSpecies, DroopGrowth, MMUptake, MParams, MSpecies, QParams, QSpecies, Scenario,
)
from scenario import preset_scenario  # noqa: E402


def m_species(id_: str, alpha_max: float, K_s: float, yield_a: float = 1.0) -> MSpecies:
    return MSpecies(id=id_, params=MParams(alpha_max=alpha_max, K_s=K_s, yield_a=yield_a))


def c_species(id_: str, beta_max: float, K_s: float, yield_b: float = 1.0) -> CSpecies:
    return CSpecies(id=id_, params=CParams(beta_max=beta_max, K_s=K_s, yield_b=yield_b))


def q_species(id_: str, rho_max: float, K_s: float, gamma_bar: float, Q0: float) -> QSpecies:
    return QSpecies(id=id_, params=QParams(uptake=MMUptake(rho_max=rho_max, K_s=K_s),
                                           growth=DroopGrowth(gamma_bar=gamma_bar, Q0=Q0)))


@pytest.fixture
def figure_scenario() -> Scenario:
    """M(1,2), C(1,1), Q(ρ 1,1; Droop 1,0.5) com D=0.5 e s_in=3"""
    return preset_scenario("discussion-figure")


@pytest.fixture
def single_m() -> Scenario:
    return Scenario(D=0.5, s_in=3.0, m_species=(m_species("M1", 1.0, 1.0),))


@pytest.fixture
def single_q() -> Scenario:
    return Scenario(D=0.5, s_in=3.0, q_species=(q_species("Q1", 1.0, 1.0, 1.0, 0.5),))


@pytest.fixture
def single_c() -> Scenario:
    return Scenario(D=0.5, s_in=3.0, c_species=(c_species("C1", 1.0, 1.0),))
