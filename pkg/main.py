"""
chemostat-compete - Competição em quimiostato entre bactérias livres (Monod),
bactérias aderidas (Contois) e fitoplâncton (Droop / Caperon-Meyer)

Subcomandos: validate, equilibria, simulate e sweep. Os relatórios são gravados
no diretório --out; o código de saída segue o contrato:
0 ok, 1 hipótese violada, 2 entrada malformada, 3 autovalor marginal, 4 rigidez.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from config import ABS_TOL, LOG_LEVEL, REL_TOL, T_MAX, TOL_EIG
from equilibria import enumerate_equilibria, predict_outcome
from errors import ChemostatError, PreconditionError, ScenarioValidationError, StiffnessError
from models import Equilibrium, IntegratorOptions, RunConfig, Scenario, State
from scenario import PRESETS, ScenarioFileError, denormalize_state, load_scenario, normalize_state, preset_scenario
from simulate import (
    BOUND_RTOL, check_bounds, detect_convergence, identify_limit, integrate, random_initial_state,
)
from stability import classify
from sweep import outcome_map, zone_thresholds
from utils import grid_values, monitors_frame, parse_grid, sweep_frame, trajectory_frame, write_frame, write_json
from validation import validate_scenario

# Configurar logging
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_INPUT = 2
EXIT_MARGINAL = 3
EXIT_STIFFNESS = 4

CONVERGENCE_TOL = 1e-3


# ===== ARGUMENTOS =====

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--scenario", type=Path, help="arquivo JSON do cenário")
    source.add_argument("--preset", choices=sorted(PRESETS), help="cenário pré-definido")
    common.add_argument("--out", type=Path, default=Path("out"), help="diretório de saída")
    common.add_argument("--t-max", type=float, help=f"horizonte de integração (padrão {T_MAX:g})")
    common.add_argument("--rel-tol", type=float, help=f"tolerância relativa (padrão {REL_TOL:g})")
    common.add_argument("--abs-tol", type=float, help=f"tolerância absoluta (padrão {ABS_TOL:g})")
    common.add_argument("--seed", type=int, default=0, help="semente das condições iniciais aleatórias")
    common.add_argument("--initial", type=Path, help="estado inicial JSON (unidades de biomassa)")
    common.add_argument("--grid-d", help="grade de D: 'min,max,n[,lin|log]'")
    common.add_argument("--grid-sin", help="grade de s_in: 'min,max,n[,lin|log]'")
    common.add_argument("--all-subsets", action="store_true", help="enumera Ey para todos os subconjuntos de C")

    parser = argparse.ArgumentParser(prog="chemostat-compete",
                                     description="Competição em quimiostato: equilíbrios, estabilidade e simulação")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="verifica as hipóteses do cenário")
    sub.add_parser("equilibria", parents=[common], help="equilíbrios, estabilidade e previsão de E★")
    sub.add_parser("simulate", parents=[common], help="integra o modelo e verifica a convergência")
    sub.add_parser("sweep", parents=[common], help="mapa de resultados em (D, s_in)")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        scenario=args.scenario,
        preset=args.preset,
        out=args.out,
        initial=args.initial,
        t_max=args.t_max,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        seed=args.seed,
        grid_d=parse_grid(args.grid_d) if args.grid_d else None,
        grid_sin=parse_grid(args.grid_sin) if args.grid_sin else None,
        all_subsets=args.all_subsets,
    )


def load_config_scenario(config: RunConfig) -> Scenario:
    if config.preset:
        logger.info(f"📦 Usando preset {config.preset}")
        return preset_scenario(config.preset)
    return load_scenario(config.scenario)


def load_initial_state(path: Path) -> State:
    """Aceita um State, um equilíbrio ({"state": ...}) ou um prediction.json ({"e_star": ...})"""
    data = json.loads(path.read_text(encoding="utf-8"))
    if "e_star" in data:
        data = data["e_star"]
    if "state" in data:
        data = data["state"]
    return State.model_validate(data)


def _equilibrium_dict(scenario: Scenario, eq: Equilibrium) -> Dict[str, Any]:
    data = eq.model_dump(mode="python", by_alias=True)
    data["label"] = eq.label
    data["state"] = denormalize_state(scenario, eq.state).model_dump(mode="python")
    return data


def _validated(scenario: Scenario, out: Path) -> bool:
    report = validate_scenario(scenario)
    if not report.ok:
        write_json(out / "validation.json", report)
        for v in report.violations:
            logger.error(f"❌ {v.code} {'/'.join(v.species)}: {v.detail}")
    return report.ok


# ===== COMANDOS =====

def cmd_validate(config: RunConfig) -> int:
    scenario = load_config_scenario(config)
    report = validate_scenario(scenario)
    write_json(config.out / "validation.json", report)
    if not report.ok:
        for v in report.violations:
            logger.error(f"❌ {v.code} {'/'.join(v.species)}: {v.detail}")
        return EXIT_HYPOTHESIS
    logger.info(f"✅ Cenário válido (n_x={report.n_x}, n_y={report.n_y}, n_z={report.n_z})")
    return EXIT_OK


def cmd_equilibria(config: RunConfig) -> int:
    scenario = load_config_scenario(config)
    if not _validated(scenario, config.out):
        return EXIT_HYPOTHESIS

    entries = []
    stable: List[str] = []
    marginal = False
    for eq in enumerate_equilibria(scenario, all_subsets=config.all_subsets):
        entry = _equilibrium_dict(scenario, eq)
        entry["stability"] = None
        if eq.in_positive_orthant:
            report = classify(scenario, eq, TOL_EIG)
            entry["stability"] = report.model_dump(mode="python")
            if report.classification == "Stable":
                stable.append(eq.label)
            marginal = marginal or report.classification == "Marginal"
        entries.append(entry)

    prediction = predict_outcome(scenario)
    prediction_data = prediction.model_dump(mode="python")
    prediction_data["e_star"] = _equilibrium_dict(scenario, prediction.e_star)
    prediction_data["stability"] = classify(scenario, prediction.e_star, TOL_EIG).model_dump(mode="python")

    write_json(config.out / "equilibria.json", {"equilibria": entries, "stable": stable})
    write_json(config.out / "prediction.json", prediction_data)

    if len(stable) != 1:
        logger.warning(f"⚠️ {len(stable)} equilíbrio(s) estável(is): {stable}")
    logger.info(f"✅ {len(entries)} equilíbrio(s); E★ = {prediction.e_star.label} "
                f"(sobreviventes: {', '.join(prediction.compliant) or 'nenhum'})")
    return EXIT_MARGINAL if marginal else EXIT_OK


def _integrator_options(config: RunConfig) -> IntegratorOptions:
    return IntegratorOptions(
        rel_tol=config.rel_tol or REL_TOL,
        abs_tol=config.abs_tol or ABS_TOL,
        t_max=config.t_max or T_MAX,
    )


def _write_trajectory(out: Path, trajectory, scenario: Scenario) -> None:
    write_frame(out / "trajectory.csv", trajectory_frame(trajectory, scenario))
    write_frame(out / "monitors.csv", monitors_frame(trajectory))


def cmd_simulate(config: RunConfig) -> int:
    scenario = load_config_scenario(config)
    if not _validated(scenario, config.out):
        return EXIT_HYPOTHESIS

    if config.initial:
        x0 = normalize_state(scenario, load_initial_state(config.initial))
        origin = str(config.initial)
    else:
        x0 = random_initial_state(scenario, config.seed)
        origin = "random"
    opts = _integrator_options(config)

    try:
        trajectory = integrate(scenario, x0, opts)
    except StiffnessError as e:
        logger.error(f"❌ {e}")
        _write_trajectory(config.out, e.partial, scenario)
        write_json(config.out / "convergence.json", {
            "seed": config.seed, "initial": origin, "complete": False, "error": str(e),
        })
        return EXIT_STIFFNESS
    _write_trajectory(config.out, trajectory, scenario)

    bounds = check_bounds(scenario, trajectory, rtol=max(BOUND_RTOL, 10.0 * opts.rel_tol))
    prediction = predict_outcome(scenario)
    expected = detect_convergence(scenario, trajectory, prediction.e_star, tol=CONVERGENCE_TOL)
    reached = identify_limit(scenario, trajectory, tol=CONVERGENCE_TOL)
    match = expected.converged

    write_json(config.out / "convergence.json", {
        "seed": config.seed,
        "initial": origin,
        "complete": trajectory.complete,
        "prediction": prediction.e_star.label,
        "reached": reached.limit if reached.converged else None,
        "match": match,
        "convergence": expected,
        "bounds": bounds,
    })
    if match:
        logger.info(f"✅ Convergiu para {prediction.e_star.label} em t={expected.t_converged:.6g}")
    else:
        logger.warning(f"⚠️ Sem convergência para {prediction.e_star.label} "
                       f"(mais próximo: {reached.limit}, distância {reached.terminal_distance:.3g})")
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    scenario = load_config_scenario(config)
    if config.grid_d is None and config.grid_sin is None:
        logger.error("❌ informe --grid-d e/ou --grid-sin")
        return EXIT_INPUT
    d_grid = grid_values(config.grid_d) if config.grid_d else [scenario.D]
    s_in_grid = grid_values(config.grid_sin) if config.grid_sin else [scenario.s_in]

    result = outcome_map(scenario, d_grid, s_in_grid)
    write_frame(config.out / "sweep.csv", sweep_frame(result))

    payload: Dict[str, Any] = {"outcome_map": result}
    if len(scenario.c_species) == 1:
        payload["zone_thresholds"] = {repr(D): zone_thresholds(scenario, D) for D in d_grid}
    write_json(config.out / "sweep.json", payload)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "equilibria": cmd_equilibria,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except (ValidationError, ValueError) as e:
        logger.error(f"❌ Configuração inválida: {e}")
        return EXIT_INPUT

    logger.info(f"🚀 chemostat-compete {config.command}")
    try:
        return COMMANDS[config.command](config)
    except (ScenarioFileError, ValidationError, PreconditionError, KeyError, FileNotFoundError) as e:
        logger.error(f"❌ Entrada inválida: {e}")
        return EXIT_INPUT
    except ScenarioValidationError as e:
        logger.error(f"❌ {e}")
        return EXIT_HYPOTHESIS
    except ChemostatError as e:
        logger.error(f"❌ Falha numérica: {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
