"""
Funções utilitárias: escrita de JSON/CSV, formatação de números e parsing de grades
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from models import GridSpec, OutcomeMap, Scenario, Trajectory

logger = logging.getLogger(__name__)

# IEEE double com ida e volta exata
FLOAT_FORMAT = "%.17g"


def format_float(value: float) -> str:
    """Formata um float com 17 algarismos significativos ('' para None/NaN)"""
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return ""
    return FLOAT_FORMAT % value


def to_jsonable(obj: Any) -> Any:
    """Converte modelos pydantic, arrays numpy e complexos em estruturas JSON"""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump(mode="python", by_alias=True))
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def write_json(path: Union[str, Path], data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(data), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    logger.debug(f"JSON escrito em {path}")
    return path


def write_frame(path: Union[str, Path], frame: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    logger.debug(f"CSV escrito em {path} ({len(frame)} linhas)")
    return path


# ===== TRAJETÓRIAS =====

def _biomass_scale(trajectory: Trajectory, scenario: Scenario) -> np.ndarray:
    nx, ny, _ = trajectory.dims
    scale = np.ones(trajectory.states.shape[1])
    scale[1:1 + nx] = [m.params.yield_a for m in scenario.m_species]
    scale[1 + nx:1 + nx + ny] = [c.params.yield_b for c in scenario.c_species]
    return scale


def trajectory_frame(trajectory: Trajectory, scenario: Optional[Scenario] = None) -> pd.DataFrame:
    """
    Colunas t, s, x_<id>..., y_<id>..., z_<id>..., q_<id>..., M, L, mass_residual

    Com `scenario`, x e y saem em biomassa (x·a, y·b) como os estados de
    prediction.json; M, L e mass_residual ficam em unidades de substrato.
    """
    states = trajectory.states
    if scenario is not None:
        states = states * _biomass_scale(trajectory, scenario)
    columns: Dict[str, np.ndarray] = {"t": trajectory.times}
    for n, label in enumerate(trajectory.labels):
        columns[label] = states[:, n]
    columns["M"] = trajectory.m_total
    columns["L"] = trajectory.lower_bound
    columns["mass_residual"] = trajectory.mass_residual
    return pd.DataFrame(columns)


def monitors_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Resumo por canal de monitoramento: mínimo, máximo e valor final"""
    rows: List[Dict[str, Any]] = []
    for name, values in (("M", trajectory.m_total), ("L", trajectory.lower_bound),
                         ("mass_residual", trajectory.mass_residual)):
        finite = values[np.isfinite(values)]
        rows.append({
            "monitor": name,
            "min": float(finite.min()) if finite.size else np.nan,
            "max": float(finite.max()) if finite.size else np.nan,
            "final": float(values[-1]),
            "samples": int(finite.size),
        })
    return pd.DataFrame(rows, columns=["monitor", "min", "max", "final", "samples"])


# ===== VARREDURAS =====

def sweep_frame(outcome: OutcomeMap) -> pd.DataFrame:
    """Colunas D, s_in, s_star, s_star_class, zone, survivors (ids separados por ';')"""
    rows = []
    for row in outcome.cells:
        for cell in row:
            rows.append({
                "D": cell.D,
                "s_in": cell.s_in,
                "s_star": np.nan if cell.s_star is None else cell.s_star,
                "s_star_class": cell.s_star_class or "",
                "zone": "" if cell.zone is None else str(cell.zone),
                "survivors": ";".join(cell.survivors),
            })
    return pd.DataFrame(rows, columns=["D", "s_in", "s_star", "s_star_class", "zone", "survivors"])


def parse_grid(text: str) -> GridSpec:
    """Converte 'min,max,n[,lin|log]' em GridSpec (ValueError para texto malformado)"""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (3, 4):
        raise ValueError(f"grade '{text}' deve ser 'min,max,n[,lin|log]'")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise ValueError(f"grade '{text}' com número inválido") from e
    spacing = parts[3].lower() if len(parts) == 4 else "lin"
    return GridSpec(min=lo, max=hi, count=count, spacing=spacing)


def grid_values(grid: GridSpec) -> List[float]:
    if grid.count == 1:
        return [grid.min]
    if grid.spacing == "log":
        return [float(v) for v in np.geomspace(grid.min, grid.max, grid.count)]
    return [float(v) for v in np.linspace(grid.min, grid.max, grid.count)]
