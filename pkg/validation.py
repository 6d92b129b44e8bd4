"""
Verificação das hipóteses 5, 6 e 7 sobre um cenário e geração de cenários aleatórios válidos
"""
import itertools
import logging
from typing import List, Tuple

import numpy as np

from config import TOL_DISTINCT
from equilibria import s_y_star, subsistence_x, subsistence_y, subsistence_z, viable_c_species
from errors import ScenarioValidationError
from mappings import cap_Q
from models import (
    CParams, CSpecies, MParams, MSpecies, MMUptake, DroopGrowth, QParams, QSpecies,
    Scenario, ValidationReport, Violation,
)
from rates import rate_c, rate_m, rate_q_growth
from scenario import normalize

logger = logging.getLogger(__name__)

WASHOUT_FLAG = "E0-globally-attractive"

# pares de famílias verificados pela hipótese 6; C-C não entra (espécies C coexistem)
_PAIR_CODES = {
    ("M", "M"): "H6-x-x",
    ("Q", "Q"): "H6-z-z",
    ("M", "C"): "H6-x-y",
    ("C", "Q"): "H6-y-z",
    ("M", "Q"): "H6-x-z",
}


def _hyp5_holds(sc: Scenario) -> bool:
    return (any(rate_m(i, sc.s_in) > sc.D for i in sc.m_species)
            or any(rate_c(j, sc.s_in, 0.0) > sc.D for j in sc.c_species)
            or any(rate_q_growth(k, cap_Q(k, sc.s_in)) > sc.D for k in sc.q_species))


def validate_scenario(scenario: Scenario, tol_distinct: float = TOL_DISTINCT,
                      strict: bool = False) -> ValidationReport:
    """
    Verifica as hipóteses 5, 6 e 7 e conta n_x, n_y, n_z

    A hipótese 5 violada não é erro: o relatório recebe a flag de lavagem.
    Com strict=True, colisões das hipóteses 6/7 levantam ScenarioValidationError.
    """
    sc = normalize(scenario)
    D, s_in = sc.D, sc.s_in
    flags: List[str] = []
    violations: List[Violation] = []

    if not _hyp5_holds(sc):
        logger.info(f"🌊 Hipótese 5 violada: nenhuma espécie cresce acima de D={D} em s_in={s_in}")
        flags.append(WASHOUT_FLAG)

    thresholds = ([subsistence_x(i, D, s_in) for i in sc.m_species]
                  + [subsistence_y(j, D, s_in) for j in sc.c_species]
                  + [subsistence_z(k, D, s_in) for k in sc.q_species])
    present = [t for t in thresholds if t.value is not None]

    for a, b in itertools.combinations(present, 2):
        pair = tuple(sorted((a.species_class, b.species_class), key="MCQ".index))
        code = _PAIR_CODES.get(pair)
        if code is None:
            continue
        if abs(a.value - b.value) <= tol_distinct:
            violations.append(Violation(
                hypothesis="H6", code=code, species=(a.species_id, b.species_id),
                detail=f"concentrações de subsistência iguais: {a.value:.12g} ≈ {b.value:.12g}",
            ))

    viable = viable_c_species(sc)
    if viable:
        s_y = s_y_star(viable, D, s_in)
        for t in thresholds:
            if t.species_class == "C" and t.value is not None and abs(t.value - s_y) <= tol_distinct:
                violations.append(Violation(
                    hypothesis="H7", code="H7", species=(t.species_id,),
                    detail=f"S^y(0)={t.value:.12g} coincide com s^y★={s_y:.12g}",
                ))

    report = ValidationReport(
        ok=not violations,
        violations=tuple(violations),
        flags=tuple(flags),
        n_x=sum(1 for t in present if t.species_class == "M"),
        n_y=sum(1 for t in present if t.species_class == "C"),
        n_z=sum(1 for t in present if t.species_class == "Q"),
    )
    for v in violations:
        logger.debug(f"{v.code} {v.species}: {v.detail}")
    if strict and violations:
        raise ScenarioValidationError(
            "; ".join(f"{v.code} {'/'.join(v.species)}" for v in violations), report=report)
    return report


# ===== CENÁRIOS ALEATÓRIOS =====

def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def _min_separation(sc: Scenario) -> float:
    values = sorted(t for t in (
        [subsistence_x(i, sc.D, sc.s_in).value for i in sc.m_species]
        + [subsistence_z(k, sc.D, sc.s_in).value for k in sc.q_species]
        + [s_y_star(viable_c_species(sc), sc.D, sc.s_in)]
    ) if t is not None)
    if len(values) < 2:
        return float("inf")
    return float(np.min(np.diff(values)))


def random_scenario(seed: int, max_per_class: int = 2, classes: str = "MCQ",
                    param_range: Tuple[float, float] = (0.2, 5.0),
                    s_in_range: Tuple[float, float] = (0.5, 5.0),
                    min_separation: float = 0.0,
                    max_attempts: int = 1000) -> Scenario:
    """
    Cenário aleatório reprodutível que passa pela validação (hipóteses 5-7)

    Parâmetros log-uniformes em `param_range`, D em [0.1, 0.9]·(menor taxa máxima)
    e s_in uniforme. `min_separation` exige distância mínima entre sˣ★, sᶻ★ e sʸ★.
    """
    rng = np.random.default_rng(seed)
    lo, hi = param_range
    for attempt in range(max_attempts):
        counts = {c: (int(rng.integers(1, max_per_class + 1)) if c in classes else 0) for c in "MCQ"}
        m_species = tuple(
            MSpecies(id=f"M{n + 1}", params=MParams(alpha_max=_log_uniform(rng, lo, hi),
                                                   K_s=_log_uniform(rng, lo, hi)))
            for n in range(counts["M"]))
        c_species = tuple(
            CSpecies(id=f"C{n + 1}", params=CParams(beta_max=_log_uniform(rng, lo, hi),
                                                   K_s=_log_uniform(rng, lo, hi)))
            for n in range(counts["C"]))
        q_species = tuple(
            QSpecies(id=f"Q{n + 1}", params=QParams(
                uptake=MMUptake(rho_max=_log_uniform(rng, lo, hi), K_s=_log_uniform(rng, lo, hi)),
                growth=DroopGrowth(gamma_bar=_log_uniform(rng, lo, hi), Q0=_log_uniform(rng, lo, hi))))
            for n in range(counts["Q"]))
        max_rates = ([m.params.alpha_max for m in m_species] + [c.params.beta_max for c in c_species]
                     + [k.growth.gamma_bar for k in q_species])
        D = float(rng.uniform(0.1, 0.9)) * min(max_rates)
        s_in = float(rng.uniform(*s_in_range))
        sc = Scenario(D=D, s_in=s_in, m_species=m_species, c_species=c_species, q_species=q_species)
        report = validate_scenario(sc)
        if report.ok and not report.washout and _min_separation(sc) >= min_separation:
            logger.debug(f"Cenário aleatório (seed={seed}) aceito na tentativa {attempt + 1}")
            return sc
    raise ScenarioValidationError(f"nenhum cenário válido em {max_attempts} tentativas (seed={seed})")
