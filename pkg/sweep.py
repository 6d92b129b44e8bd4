"""
Varredura de (D, s_in): mapas de resultado da competição e limiares das zonas
"""
import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

from config import THREADS, TOL_DISTINCT
from equilibria import free_subsistence_x, free_subsistence_z, predict_outcome
from errors import ChemostatError, PreconditionError
from mappings import cap_Y, y_threshold
from models import OutcomeCell, OutcomeMap, Scenario, ZoneThresholds
from scenario import normalize
from validation import validate_scenario

logger = logging.getLogger(__name__)

DEGENERATE_FLAG = "degenerate"


def zone_thresholds(scenario: Scenario, D: Optional[float] = None) -> ZoneThresholds:
    """
    t1 = S^y(0) da única espécie C e t2 = s_f★ + Y(s_f★), com s_f★ a menor
    concentração de subsistência entre as espécies livres (M e Q)
    """
    sc = normalize(scenario)
    if len(sc.c_species) != 1:
        raise PreconditionError(f"limiares de zona exigem exatamente uma espécie C (há {len(sc.c_species)})")
    D = sc.D if D is None else D
    c = sc.c_species[0]

    threshold = y_threshold(c, D)
    t1 = None if threshold.is_infinite else threshold.value

    free = [free_subsistence_x(m, D) for m in sc.m_species] + [free_subsistence_z(k, D) for k in sc.q_species]
    free = [v for v in free if v is not None]
    t2 = None
    if free:
        s_f = min(free)
        t2 = s_f + cap_Y(c, D, s_f)
    return ZoneThresholds(t1=t1, t2=t2)


def _zone(sc: Scenario, washout: bool, thresholds: ZoneThresholds) -> Optional[int]:
    if washout:
        return 1
    if thresholds.t1 is None:
        return None
    if sc.s_in <= thresholds.t1:
        return 1
    if thresholds.t2 is None or sc.s_in <= thresholds.t2:
        return 2
    return 3


def outcome_cell(scenario: Scenario, D: float, s_in: float) -> OutcomeCell:
    """Validação e previsão de E★ em um ponto (D, s_in); erros ficam nas flags da célula"""
    try:
        sc = normalize(scenario).with_controls(D, s_in)
        report = validate_scenario(sc)
        flags = list(report.flags)
        if not report.ok:
            flags.append(DEGENERATE_FLAG)
        prediction = predict_outcome(sc)

        zone = None
        if len(sc.c_species) == 1:
            thresholds = zone_thresholds(sc)
            zone = _zone(sc, prediction.washout, thresholds)
            if thresholds.t2 is not None and abs(s_in - thresholds.t2) <= TOL_DISTINCT:
                flags.append(DEGENERATE_FLAG)
        return OutcomeCell(D=D, s_in=s_in, survivors=prediction.e_star.survivors, s_star=prediction.s_star,
                           s_star_class=prediction.s_star_class, zone=zone,
                           flags=tuple(dict.fromkeys(flags)), equilibrium=prediction.e_star)
    except (ChemostatError, ValueError) as e:
        logger.warning(f"⚠️ Célula (D={D}, s_in={s_in}) falhou: {e}")
        return OutcomeCell(D=D, s_in=s_in, flags=(f"error: {e}",))


def _check_grid(name: str, grid: Sequence[float]) -> List[float]:
    values = [float(v) for v in grid]
    if not values:
        raise PreconditionError(f"grade {name} vazia")
    if any(not v > 0 for v in values):
        raise PreconditionError(f"grade {name} com valores não positivos")
    if any(b < a for a, b in zip(values, values[1:])):
        raise PreconditionError(f"grade {name} fora de ordem")
    return values


async def _outcome_map_async(sc: Scenario, d_grid: List[float], s_in_grid: List[float],
                             threads: int) -> List[OutcomeCell]:
    semaphore = asyncio.Semaphore(threads)
    loop = asyncio.get_running_loop()

    with ThreadPoolExecutor(max_workers=threads) as executor:
        async def run(D: float, s_in: float) -> OutcomeCell:
            async with semaphore:
                return await loop.run_in_executor(executor, outcome_cell, sc, D, s_in)

        # gather preserva a ordem das tarefas (linha a linha)
        tasks = [run(D, s_in) for D in d_grid for s_in in s_in_grid]
        return await asyncio.gather(*tasks)


def outcome_map(scenario: Scenario, d_grid: Sequence[float], s_in_grid: Sequence[float],
                threads: int = THREADS) -> OutcomeMap:
    """
    Mapa de resultados: uma linha por D, uma coluna por s_in

    As células são independentes e calculadas em paralelo (no máximo `threads` por vez).
    """
    d_values = _check_grid("D", d_grid)
    s_values = _check_grid("s_in", s_in_grid)
    sc = normalize(scenario)
    threads = max(1, threads)

    logger.info(f"🔄 Varredura de {len(d_values)}×{len(s_values)} células ({threads} em paralelo)")
    flat = asyncio.run(_outcome_map_async(sc, d_values, s_values, threads))
    n = len(s_values)
    cells = tuple(tuple(flat[r * n:(r + 1) * n]) for r in range(len(d_values)))

    degenerate = sum(1 for cell in flat if DEGENERATE_FLAG in cell.flags)
    if degenerate:
        logger.warning(f"⚠️ {degenerate} célula(s) degenerada(s) (colisão de concentrações de subsistência)")
    logger.info(f"✅ Varredura concluída: {len(flat)} células")
    return OutcomeMap(d_grid=tuple(d_values), s_in_grid=tuple(s_values), cells=cells)
