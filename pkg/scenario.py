"""
Leitura de cenários JSON, normalização (a_i = b_j = 1) e cenários pré-definidos
"""
import json
import logging
from pathlib import Path
from typing import Dict, Union

from pydantic import ValidationError

from errors import DomainError
from models import CParams, CSpecies, MParams, MSpecies, Scenario, State

logger = logging.getLogger(__name__)


class ScenarioFileError(ValueError):
    """Arquivo de cenário ilegível; carrega linha/coluna quando o JSON está truncado"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.line = line
        self.column = column


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Converte texto JSON em Scenario (chaves desconhecidas são rejeitadas)"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioFileError(f"{source}:{e.lineno}:{e.colno}: JSON inválido ({e.msg})",
                                line=e.lineno, column=e.colno) from e
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        raise ScenarioFileError(f"{source}: cenário inválido\n{e}") from e


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    logger.info(f"📄 Carregando cenário {path}")
    return parse_scenario(path.read_text(encoding="utf-8"), source=str(path))


def scenario_to_dict(scenario: Scenario) -> Dict:
    return scenario.model_dump(mode="json")


# ===== NORMALIZAÇÃO =====

def normalize(scenario: Scenario) -> Scenario:
    """
    Mudança de variáveis x̃ = x/a, ỹ = y/b com todos os rendimentos iguais a 1

    Monod e Michaelis-Menten dependem apenas de s e ficam inalteradas; a razão de
    Contois s/y = s/(b·ỹ) é absorvida em K_s → K_s·b.
    """
    if scenario.is_normalized:
        return scenario
    m_species = tuple(
        MSpecies(id=m.id, params=MParams(alpha_max=m.params.alpha_max, K_s=m.params.K_s))
        for m in scenario.m_species
    )
    c_species = tuple(
        CSpecies(id=c.id, params=CParams(beta_max=c.params.beta_max,
                                         K_s=c.params.K_s * c.params.yield_b))
        for c in scenario.c_species
    )
    logger.debug("Cenário normalizado (rendimentos → 1)")
    return scenario.model_copy(update={"m_species": m_species, "c_species": c_species})


def _check_yields(scenario: Scenario) -> None:
    for m in scenario.m_species:
        if not m.params.yield_a > 0:
            raise DomainError(f"rendimento a_{m.id} não positivo")
    for c in scenario.c_species:
        if not c.params.yield_b > 0:
            raise DomainError(f"rendimento b_{c.id} não positivo")


def normalize_state(scenario: Scenario, state: State) -> State:
    """Converte um estado em biomassa (x, y) para unidades de substrato (x/a, y/b)"""
    _check_yields(scenario)
    return state.model_copy(update={
        "x": tuple(x / m.params.yield_a for x, m in zip(state.x, scenario.m_species)),
        "y": tuple(y / c.params.yield_b for y, c in zip(state.y, scenario.c_species)),
    })


def denormalize_state(scenario: Scenario, state: State) -> State:
    """Inversa de normalize_state"""
    _check_yields(scenario)
    return state.model_copy(update={
        "x": tuple(x * m.params.yield_a for x, m in zip(state.x, scenario.m_species)),
        "y": tuple(y * c.params.yield_b for y, c in zip(state.y, scenario.c_species)),
    })


# ===== CENÁRIOS PRÉ-DEFINIDOS =====

def _m(id_: str, alpha_max: float, K_s: float) -> Dict:
    return {"id": id_, "params": {"alpha_max": alpha_max, "K_s": K_s}}


def _c(id_: str, beta_max: float, K_s: float) -> Dict:
    return {"id": id_, "params": {"beta_max": beta_max, "K_s": K_s}}


def _q(id_: str, rho_max: float, K_s: float, gamma_bar: float, Q0: float) -> Dict:
    return {"id": id_, "params": {"uptake": {"rho_max": rho_max, "K_s": K_s},
                                  "growth": {"kind": "droop", "gamma_bar": gamma_bar, "Q0": Q0}}}


PRESETS: Dict[str, Dict] = {
    # figura da discussão: M perde para Q, C coexiste com Q acima de s_in = 2
    "discussion-figure": {
        "D": 0.5, "s_in": 3.0,
        "m_species": [_m("M", 1.0, 2.0)],
        "c_species": [_c("C", 1.0, 1.0)],
        "q_species": [_q("Q", 1.0, 1.0, 1.0, 0.5)],
    },
    "m-only": {
        "D": 0.5, "s_in": 3.0,
        "m_species": [_m("M1", 1.0, 1.0), _m("M2", 1.0, 2.0), _m("M3", 2.0, 3.5)],
    },
    "q-only": {
        "D": 0.5, "s_in": 3.0,
        "q_species": [_q("Q1", 1.0, 1.0, 1.0, 0.5), _q("Q2", 1.5, 2.0, 1.2, 0.4)],
    },
    "c-only": {
        "D": 0.5, "s_in": 3.0,
        "c_species": [_c("C1", 1.0, 1.0), _c("C2", 2.0, 3.0), _c("C3", 0.4, 1.0)],
    },
}


def preset_scenario(name: str) -> Scenario:
    if name not in PRESETS:
        raise KeyError(f"preset desconhecido: {name} (disponíveis: {', '.join(sorted(PRESETS))})")
    return Scenario.model_validate(PRESETS[name])
