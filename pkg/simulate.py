"""
Simulação do modelo completo: lado direito, integração, monitores (M, L, resíduo
de massa), verificação das cotas superiores/inferiores e detecção de convergência
"""
import logging
import math
from typing import Callable, Dict, List, Optional

import numpy as np

from config import ABS_TOL, MAX_SUBSET_SPECIES
from equilibria import enumerate_equilibria, predict_outcome, viable_c_species
from errors import NumericalError, PreconditionError, StiffnessError
from integrator import dormand_prince
from mappings import (
    cap_Q, cap_Y, clamp_quota, gamma_inverse, quota_max, s_of_q, s_of_y,
)
from models import (
    BoundsReport, BoundViolation, CaperonMeyerGrowth, ConvergenceResult, Equilibrium,
    IntegratorOptions, QSpecies, Scenario, State, Trajectory,
)
from rates import rate_c, rate_m, uptake_q
from roots import bracketed_root
from scenario import normalize

logger = logging.getLogger(__name__)

BOUND_RTOL = 1e-8


def _labels(sc: Scenario) -> List[str]:
    return (["s"] + [f"x_{m.id}" for m in sc.m_species] + [f"y_{c.id}" for c in sc.c_species]
            + [f"z_{k.id}" for k in sc.q_species] + [f"q_{k.id}" for k in sc.q_species])


# ===== LADO DIREITO =====

def make_rhs(scenario: Scenario) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    Núcleo vetorizado do modelo normalizado no vetor (s, x, y, z, q)

    As taxas são avaliadas com os argumentos truncados em zero; β·y vale 0 quando y = 0.
    """
    sc = normalize(scenario)
    D, s_in = sc.D, sc.s_in
    nx, ny, nz = sc.dims

    a_max = np.array([m.params.alpha_max for m in sc.m_species])
    a_k = np.array([m.params.K_s for m in sc.m_species])
    b_max = np.array([c.params.beta_max for c in sc.c_species])
    b_k = np.array([c.params.K_s for c in sc.c_species])
    r_max = np.array([k.uptake.rho_max for k in sc.q_species])
    r_k = np.array([k.uptake.K_s for k in sc.q_species])
    g_bar = np.array([k.growth.gamma_bar for k in sc.q_species])
    q0 = np.array([k.growth.Q0 for k in sc.q_species])
    caperon = np.array([isinstance(k.growth, CaperonMeyerGrowth) for k in sc.q_species], dtype=bool)
    k_q = np.array([k.growth.K_q if isinstance(k.growth, CaperonMeyerGrowth) else 1.0
                    for k in sc.q_species])

    ix, iy = slice(1, 1 + nx), slice(1 + nx, 1 + nx + ny)
    iz, iq = slice(1 + nx + ny, 1 + nx + ny + nz), slice(1 + nx + ny + nz, 1 + nx + ny + 2 * nz)

    def fun(t: float, v: np.ndarray) -> np.ndarray:
        s = v[0]
        x, y, z, q = v[ix], v[iy], v[iz], v[iq]
        s_e = max(s, 0.0)
        y_e = np.maximum(y, 0.0)
        q_e = np.maximum(q, 0.0)

        alpha = a_max * s_e / (s_e + a_k)
        denom = b_k * y_e + s_e
        beta_y = np.divide(b_max * s_e * y_e, denom, out=np.zeros(ny), where=y_e > 0.0)
        rho = r_max * s_e / (s_e + r_k)
        excess = np.maximum(q_e - q0, 0.0)
        droop = np.divide(g_bar * excess, q_e, out=np.zeros(nz), where=excess > 0.0)
        gamma = np.where(caperon, g_bar * excess / (excess + k_q), droop)

        out = np.empty_like(v)
        out[0] = D * (s_in - s) - alpha @ x - beta_y.sum() - rho @ z
        out[ix] = (alpha - D) * x
        out[iy] = beta_y - D * y
        out[iz] = (gamma - D) * z
        out[iq] = rho - gamma * q
        return out

    return fun


def rhs(scenario: Scenario, state: State) -> State:
    """Derivada temporal do estado (coordenadas normalizadas)"""
    sc = normalize(scenario)
    if not state.matches(sc):
        raise PreconditionError("dimensões do estado não correspondem ao cenário")
    vec = state.to_vector()
    if not np.all(np.isfinite(vec)):
        raise NumericalError(f"estado com entradas não finitas: {vec}")
    nx, ny, nz = sc.dims
    return State.from_vector(make_rhs(sc)(0.0, vec), nx, ny, nz)


# ===== MONITORES =====

def _quotas_inside(sc: Scenario, q: np.ndarray) -> bool:
    return all(k.growth.Q0 < qk < quota_max(k) for k, qk in zip(sc.q_species, q))


def monitor_L(scenario: Scenario, state: State, s_star: Optional[float] = None) -> float:
    """
    L = min(min_k S^z_k(q_k), min_j S^y_j(y_j), s★, s)

    Cotas fora de (Q0, Q^m) são restringidas ao intervalo; sentinelas +∞ de S^y ficam de fora.
    """
    sc = normalize(scenario)
    if s_star is None:
        s_star = predict_outcome(sc).s_star
    terms = [s_star, state.s]
    terms.extend(s_of_q(k, clamp_quota(k, q)) for k, q in zip(sc.q_species, state.q))
    for c, y in zip(sc.c_species, state.y):
        sy = s_of_y(c, sc.D, max(y, 0.0))
        if not sy.is_infinite:
            terms.append(sy.value)
    return min(terms)


def _monitors(sc: Scenario, times: np.ndarray, states: np.ndarray) -> Dict[str, np.ndarray]:
    nx, ny, nz = sc.dims
    m_total = np.array([State.from_vector(v, nx, ny, nz).total_substrate for v in states])
    m0 = m_total[0]
    expected = sc.s_in + (m0 - sc.s_in) * np.exp(-sc.D * (times - times[0]))

    s_star = predict_outcome(sc).s_star
    lower = np.full(len(times), np.nan)
    gate_open = False
    for n, v in enumerate(states):
        state = State.from_vector(v, nx, ny, nz)
        # L só é monitorado depois que todas as cotas entram em (Q0, Q^m)
        gate_open = gate_open or _quotas_inside(sc, np.asarray(state.q))
        if gate_open:
            lower[n] = monitor_L(sc, state, s_star)
    return {"m_total": m_total, "lower_bound": lower, "mass_residual": m_total - expected}


def _trajectory(sc: Scenario, times: np.ndarray, states: np.ndarray, complete: bool) -> Trajectory:
    channels = _monitors(sc, times, states)
    return Trajectory(times=times, states=states, labels=tuple(_labels(sc)), dims=sc.dims,
                      complete=complete, **channels)


# ===== INTEGRAÇÃO =====

def integrate(scenario: Scenario, x0: State, opts: Optional[IntegratorOptions] = None) -> Trajectory:
    """
    Integra o modelo a partir de x0 (unidades de substrato) até opts.t_max

    Raises:
        PreconditionError: x0 negativo, não finito ou com dimensões erradas
        StiffnessError: passo abaixo do mínimo; `partial` é a Trajectory parcial
    """
    opts = opts or IntegratorOptions()
    sc = normalize(scenario)
    if not x0.matches(sc):
        raise PreconditionError("dimensões do estado inicial não correspondem ao cenário")
    y0 = x0.to_vector()
    if not np.all(np.isfinite(y0)):
        raise PreconditionError("estado inicial com entradas não finitas")
    if not x0.is_nonnegative():
        raise PreconditionError("estado inicial com coordenadas negativas")

    logger.info(f"🚀 Integrando até t={opts.t_max:g} (rel_tol={opts.rel_tol:g}, abs_tol={opts.abs_tol:g})")
    try:
        times, states = dormand_prince(make_rhs(sc), 0.0, y0, opts.t_max, opts.dt,
                                       opts.rel_tol, opts.abs_tol, opts.max_step, nonnegative=True)
    except StiffnessError as e:
        times, states = e.partial
        partial = _trajectory(sc, times, states, complete=False)
        logger.error(f"❌ Integração interrompida em t={times[-1]:.6g}")
        raise StiffnessError(str(e), partial=partial) from e

    trajectory = _trajectory(sc, times, states, complete=True)
    logger.info(f"✅ Integração concluída: {len(trajectory)} amostras")
    return trajectory


def random_initial_state(scenario: Scenario, seed: int) -> State:
    """Biomassas log-uniformes em [1e-3, 1], q uniforme em (Q0, Q^m) e s = s_in"""
    sc = normalize(scenario)
    rng = np.random.default_rng(seed)
    nx, ny, nz = sc.dims
    biomass = np.exp(rng.uniform(math.log(1e-3), 0.0, size=nx + ny + nz))
    q = tuple(float(rng.uniform(k.growth.Q0, quota_max(k))) for k in sc.q_species)
    return State(s=sc.s_in, x=tuple(biomass[:nx]), y=tuple(biomass[nx:nx + ny]),
                 z=tuple(biomass[nx + ny:]), q=q)


# ===== COTAS =====

def _z_max(sc: Scenario, m_max: float, z0: float, k: QSpecies) -> float:
    """z^m_k = max(M^m/γ_k⁻¹(D), z_k(0)); sem γ_k⁻¹(D) z_k só decresce"""
    q_star = gamma_inverse(k, sc.D)
    if q_star is None:
        return z0
    return max(m_max / q_star, z0)


def s_floor(scenario: Scenario, m_max: float, z_max: Dict[str, float]) -> float:
    """
    ŝ com φ(ŝ) = D·s_in/2, onde φ(s) = D(s_in - s) - Σα(s)M^m - Σβ(s,M^m)M^m - Σρ(s)z^m

    Abaixo de ŝ a derivada de s é pelo menos D·s_in/2.
    """
    sc = normalize(scenario)

    def phi(s: float) -> float:
        value = sc.D * (sc.s_in - s)
        value -= sum(rate_m(m, s) * m_max for m in sc.m_species)
        value -= sum(rate_c(c, s, m_max) * m_max for c in sc.c_species)
        value -= sum(uptake_q(k, s) * z_max[k.id] for k in sc.q_species)
        return value - 0.5 * sc.D * sc.s_in

    return bracketed_root(phi, 0.0, sc.s_in)


def check_bounds(scenario: Scenario, trajectory: Trajectory, rtol: float = BOUND_RTOL,
                 atol: float = ABS_TOL) -> BoundsReport:
    """
    Verifica amostra a amostra as cotas do modelo:
    M ≤ M^m, z_k ≤ z^m_k, biomassa ≥ biomassa(0)·e^{-Dt}, entrada de q_k em (Q0, Q^m)
    sem saída posterior e s ≥ ŝ depois da primeira passagem por ŝ
    """
    if len(trajectory) == 0:
        raise PreconditionError("trajetória vazia")
    sc = normalize(scenario)
    nx, ny, nz = sc.dims
    times, states = trajectory.times, trajectory.states
    violations: List[BoundViolation] = []

    def flag(bound: str, coordinate: str, mask: np.ndarray, values: np.ndarray, limits) -> None:
        hits = np.flatnonzero(mask)
        if hits.size:
            n = int(hits[0])
            limit = float(np.broadcast_to(limits, values.shape)[n])
            violations.append(BoundViolation(bound=bound, coordinate=coordinate, sample=n,
                                             time=float(times[n]), value=float(values[n]), limit=limit))

    m_total = trajectory.m_total
    m_max = max(float(m_total[0]), sc.s_in)
    flag("M-upper", "M", m_total > m_max * (1.0 + rtol) + atol, m_total, m_max)

    z_max: Dict[str, float] = {}
    for n, k in enumerate(sc.q_species):
        col = states[:, 1 + nx + ny + n]
        z_max[k.id] = _z_max(sc, m_max, float(col[0]), k)
        flag("z-upper", f"z_{k.id}", col > z_max[k.id] * (1.0 + rtol) + atol, col, z_max[k.id])

    decay = np.exp(-sc.D * (times - times[0]))
    for col_index, label in enumerate(trajectory.labels[1:1 + nx + ny + nz], start=1):
        col = states[:, col_index]
        floor = col[0] * decay
        flag("biomass-floor", label, col < floor * (1.0 - rtol) - atol, col, floor)

    entry_times: Dict[str, Optional[float]] = {}
    for n, k in enumerate(sc.q_species):
        col = states[:, 1 + nx + ny + nz + n]
        lo, hi = k.growth.Q0, quota_max(k)
        inside = (col > lo) & (col < hi)
        if not inside.any():
            entry_times[k.id] = None
            flag("quota-entry", f"q_{k.id}", np.arange(len(col)) == len(col) - 1, col, lo)
            continue
        entry = int(np.argmax(inside))
        entry_times[k.id] = float(times[entry])
        after = np.zeros(len(col), dtype=bool)
        after[entry:] = True
        flag("quota-interval", f"q_{k.id}", after & (col < lo * (1.0 - rtol) - atol), col, lo)
        flag("quota-interval", f"q_{k.id}", after & (col > hi * (1.0 + rtol) + atol), col, hi)

    s_hat = s_floor(sc, m_max, z_max)
    s_col = states[:, 0]
    reached = np.flatnonzero(s_col >= s_hat)
    if reached.size:
        after = np.zeros(len(s_col), dtype=bool)
        after[int(reached[0]):] = True
        flag("s-floor", "s", after & (s_col < s_hat * (1.0 - rtol) - atol), s_col, s_hat)

    for v in violations:
        logger.warning(f"⚠️ Cota {v.bound} violada em {v.coordinate}: amostra {v.sample} "
                       f"(t={v.time:.6g}, valor={v.value:.6g}, limite={v.limit:.6g})")
    return BoundsReport(ok=not violations, violations=tuple(violations), m_max=m_max, z_max=z_max,
                        quota_entry_times=entry_times, s_floor=s_hat)


# ===== CONVERGÊNCIA =====

def _limit_consistent(sc: Scenario, state: State, s0: float, tol: float) -> bool:
    """Com s a tol de s0, cada q_k deve estar a tol de Q_k(s0) e cada y_j a tol de Y_j(s0)"""
    if abs(state.s - s0) > tol:
        return True
    quotas = all(abs(q - cap_Q(k, s0)) <= tol for k, q in zip(sc.q_species, state.q))
    attached = all(abs(y - cap_Y(c, sc.D, s0)) <= tol for c, y in zip(sc.c_species, state.y))
    return quotas and attached


def detect_convergence(scenario: Scenario, trajectory: Trajectory, target: Equilibrium,
                       tol: float = 1e-3, window: Optional[float] = None) -> ConvergenceResult:
    """
    Convergência em norma do máximo sobre toda a janela final

    `window` padrão: 5% da duração da trajetória. t_converged é o início do trecho
    final dentro de tol somado à janela.
    """
    sc = normalize(scenario)
    times = trajectory.times
    span = float(times[-1] - times[0])
    window = 0.05 * span if window is None else window
    if window <= 0 or span < window:
        raise PreconditionError(f"trajetória de duração {span:g} não cobre a janela {window:g}")

    distance = np.max(np.abs(trajectory.states - target.state.to_vector()), axis=1)
    outside = np.flatnonzero(distance > tol)
    entry = 0 if outside.size == 0 else int(outside[-1]) + 1

    converged = False
    t_converged = None
    if entry < len(times):
        t_entry = float(times[entry])
        if float(times[-1]) - t_entry >= window - 1e-12 * max(1.0, span):
            converged = True
            t_converged = t_entry + window

    terminal = trajectory.state_at(len(trajectory) - 1)
    consistent = _limit_consistent(sc, terminal, target.s_eq, tol)
    if not consistent:
        logger.warning(f"⚠️ s convergiu para {target.s_eq:.6g} mas q/y não acompanharam")
    result = ConvergenceResult(converged=converged, t_converged=t_converged,
                               terminal_distance=float(distance[-1]), limit=target.label,
                               limit_consistent=consistent)
    logger.debug(f"Convergência para {target.label}: {converged} (distância final {distance[-1]:.3g})")
    return result


def identify_limit(scenario: Scenario, trajectory: Trajectory, tol: float = 1e-3,
                   window: Optional[float] = None) -> ConvergenceResult:
    """Equilíbrio enumerado mais próximo do estado final e a convergência para ele"""
    sc = normalize(scenario)
    all_subsets = len(viable_c_species(sc)) <= MAX_SUBSET_SPECIES
    candidates = [eq for eq in enumerate_equilibria(sc, all_subsets=all_subsets) if eq.in_positive_orthant]
    final = trajectory.states[-1]
    nearest = min(candidates, key=lambda eq: float(np.max(np.abs(final - eq.state.to_vector()))))
    return detect_convergence(sc, trajectory, nearest, tol=tol, window=window)
