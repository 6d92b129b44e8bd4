"""
Concentrações de subsistência, s★, complacência, enumeração dos equilíbrios
e previsão do equilíbrio globalmente atrativo E★
"""
import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

from config import MAX_SUBSET_SPECIES, TOL_DISTINCT
from errors import PreconditionError
from mappings import cap_Q, cap_Y, gamma_inverse, quota_max, s_of_q, y_threshold
from models import (
    CSpecies, Equilibrium, MSpecies, Prediction, QSpecies,
    Scenario, State, Subsistence,
)
from rates import rate_m, rate_q_growth
from scenario import normalize

logger = logging.getLogger(__name__)

_CLASS_ORDER = {"E0": 0, "Ex": 1, "Ez": 2, "Ey": 3, "Exy": 4, "Ezy": 5}

Species = Union[MSpecies, CSpecies, QSpecies]


# ===== SUBSISTÊNCIA =====

def free_subsistence_x(i: MSpecies, D: float) -> Optional[float]:
    """sˣ★ = D·K_s/(alpha_max - D) sem a restrição s★ < s_in"""
    p = i.params
    if p.alpha_max <= D:
        return None
    return D * p.K_s / (p.alpha_max - D)


def free_subsistence_z(k: QSpecies, D: float) -> Optional[float]:
    q_star = gamma_inverse(k, D)
    if q_star is None or q_star >= quota_max(k):
        return None
    return s_of_q(k, q_star)


def subsistence_x(i: MSpecies, D: float, s_in: float) -> Subsistence:
    """Raiz de α_i(s) = D em (0, s_in), ou None quando α_i(s_in) ≤ D"""
    value = None
    if rate_m(i, s_in) > D:
        value = free_subsistence_x(i, D)
    return Subsistence(species_id=i.id, species_class="M", value=value)


def subsistence_z(k: QSpecies, D: float, s_in: float) -> Subsistence:
    """Raiz de γ_k(Q_k(s)) = D em (0, s_in): q★ = γ⁻¹(D), s★ = S^z_k(q★)"""
    value = None
    if rate_q_growth(k, cap_Q(k, s_in)) > D:
        value = free_subsistence_z(k, D)
    return Subsistence(species_id=k.id, species_class="Q", value=value)


def subsistence_y(j: CSpecies, D: float, s_in: float) -> Subsistence:
    """Para espécies C guarda S^y_j(0), o limiar de complacência"""
    threshold = y_threshold(j, D)
    value = None
    if not threshold.is_infinite and threshold.value < s_in:
        value = threshold.value
    return Subsistence(species_id=j.id, species_class="C", value=value)


def subsistence_table(scenario: Scenario) -> List[Subsistence]:
    sc = normalize(scenario)
    return ([subsistence_x(i, sc.D, sc.s_in) for i in sc.m_species]
            + [subsistence_y(j, sc.D, sc.s_in) for j in sc.c_species]
            + [subsistence_z(k, sc.D, sc.s_in) for k in sc.q_species])


def viable_c_species(scenario: Scenario) -> Tuple[CSpecies, ...]:
    """G canônico {1..n_y}: espécies C com S^y_j(0) < s_in"""
    return tuple(j for j in scenario.c_species
                 if subsistence_y(j, scenario.D, scenario.s_in).value is not None)


def s_y_star(G: Sequence[CSpecies], D: float, s_in: float) -> float:
    """
    Raiz de s + Σ_{j∈G} Y_j(s) = s_in

    Para Contois clássico Y_j é linear em s, então a raiz é s_in/(1 + Σ inclinações).
    """
    if not G:
        return s_in
    slope = sum(cap_Y(j, D, 1.0) for j in G)
    return s_in / (1.0 + slope)


def is_compliant(species: Species, s0: float, D: float, tol: float = TOL_DISTINCT) -> bool:
    """Complacência em s0 (leitura com igualdade para espécies M e Q)"""
    if isinstance(species, CSpecies):
        threshold = y_threshold(species, D)
        return not threshold.is_infinite and threshold.value < s0
    if isinstance(species, MSpecies):
        value = free_subsistence_x(species, D)
    else:
        value = free_subsistence_z(species, D)
    return value is not None and abs(value - s0) <= tol


# ===== MONTAGEM DOS EQUILÍBRIOS =====

def _state_at(sc: Scenario, s_eq: float, x: Dict[str, float], y: Dict[str, float],
              z: Dict[str, float]) -> State:
    return State(
        s=s_eq,
        x=tuple(x.get(m.id, 0.0) for m in sc.m_species),
        y=tuple(y.get(c.id, 0.0) for c in sc.c_species),
        z=tuple(z.get(k.id, 0.0) for k in sc.q_species),
        q=tuple(cap_Q(k, s_eq) for k in sc.q_species),
    )


def _equilibrium(sc: Scenario, eq_class: str, s_eq: float, free: Optional[str],
                 group: Sequence[CSpecies], x: Dict[str, float], z: Dict[str, float]) -> Equilibrium:
    y = {j.id: cap_Y(j, sc.D, s_eq) for j in group}
    state = _state_at(sc, s_eq, x, y, z)
    biomass = {**x, **y, **z}
    survivors = tuple(i for i in sc.species_ids if biomass.get(i, 0.0) > 0.0)
    flags = ()
    if any(value < 0.0 for value in biomass.values()):
        flags = ("outside_positive_orthant",)
    return Equilibrium(eq_class=eq_class, free_species=free, group=tuple(j.id for j in group),
                       state=state, survivors=survivors, s_eq=s_eq, flags=flags)


def washout_equilibrium(sc: Scenario) -> Equilibrium:
    return _equilibrium(sc, "E0", sc.s_in, None, (), {}, {})


def _eq_x(sc: Scenario, i: MSpecies, s_eq: float, group: Sequence[CSpecies]) -> Equilibrium:
    x_bar = sc.s_in - s_eq - sum(cap_Y(j, sc.D, s_eq) for j in group)
    return _equilibrium(sc, "Exy" if group else "Ex", s_eq, i.id, group, {i.id: x_bar}, {})


def _eq_z(sc: Scenario, k: QSpecies, s_eq: float, group: Sequence[CSpecies]) -> Equilibrium:
    z_bar = (sc.s_in - s_eq - sum(cap_Y(j, sc.D, s_eq) for j in group)) / cap_Q(k, s_eq)
    return _equilibrium(sc, "Ezy" if group else "Ez", s_eq, k.id, group, {}, {k.id: z_bar})


def _eq_y(sc: Scenario, group: Sequence[CSpecies]) -> Equilibrium:
    s_eq = s_y_star(group, sc.D, sc.s_in)
    return _equilibrium(sc, "Ey", s_eq, None, group, {}, {})


def _compliant_group(sc: Scenario, s0: float) -> Tuple[CSpecies, ...]:
    return tuple(j for j in viable_c_species(sc) if is_compliant(j, s0, sc.D))


def _same_state(a: Equilibrium, b: Equilibrium) -> bool:
    va, vb = a.state.to_vector(), b.state.to_vector()
    return bool(abs(va - vb).max() <= 1e-12 * max(1.0, abs(va).max()))


def enumerate_equilibria(scenario: Scenario, all_subsets: bool = False) -> List[Equilibrium]:
    """
    Todas as classes de equilíbrio: E0, Ex_i, Ez_k, Ey_G (G canônico ou todos os
    subconjuntos), Exy_{i,G} e Ezy_{k,G} com o G complacente maximal

    Equilíbrios com biomassa livre negativa são mantidos com a flag
    `outside_positive_orthant`.
    """
    sc = normalize(scenario)
    D, s_in = sc.D, sc.s_in
    viable = viable_c_species(sc)

    found: List[Equilibrium] = [washout_equilibrium(sc)]

    for i in sc.m_species:
        value = subsistence_x(i, D, s_in).value
        if value is not None:
            found.append(_eq_x(sc, i, value, ()))
            group = _compliant_group(sc, value)
            if group:
                found.append(_eq_x(sc, i, value, group))

    for k in sc.q_species:
        value = subsistence_z(k, D, s_in).value
        if value is not None:
            found.append(_eq_z(sc, k, value, ()))
            group = _compliant_group(sc, value)
            if group:
                found.append(_eq_z(sc, k, value, group))

    if all_subsets:
        if len(viable) > MAX_SUBSET_SPECIES:
            raise PreconditionError(
                f"enumeração de subconjuntos limitada a {MAX_SUBSET_SPECIES} espécies C (n_y={len(viable)})")
        for size in range(len(viable), 0, -1):
            for group in itertools.combinations(viable, size):
                found.append(_eq_y(sc, group))
    elif viable:
        found.append(_eq_y(sc, viable))

    unique: List[Equilibrium] = []
    for eq in found:
        if not any(_same_state(eq, kept) for kept in unique):
            unique.append(eq)
    unique.sort(key=lambda e: (_CLASS_ORDER[e.eq_class], e.s_eq))
    logger.debug(f"{len(unique)} equilíbrio(s) enumerado(s) para D={D}, s_in={s_in}")
    return unique


# ===== PREVISÃO =====

def _best(values: Dict[str, Optional[float]]) -> Optional[Tuple[str, float]]:
    present = [(sid, v) for sid, v in values.items() if v is not None]
    if not present:
        return None
    return min(present, key=lambda item: item[1])


def predict_outcome(scenario: Scenario) -> Prediction:
    """
    s★ = min(sˣ★, sʸ★, sᶻ★) e o equilíbrio E★ com todas as espécies s★-complacentes

    Sem nenhuma espécie viável (hipótese 5 violada) devolve E0 com washout=True.
    """
    sc = normalize(scenario)
    D, s_in = sc.D, sc.s_in
    best_x = _best({i.id: subsistence_x(i, D, s_in).value for i in sc.m_species})
    best_z = _best({k.id: subsistence_z(k, D, s_in).value for k in sc.q_species})
    viable = viable_c_species(sc)

    if best_x is None and best_z is None and not viable:
        logger.info(f"🌊 Nenhuma espécie viável (D={D}, s_in={s_in}): lavagem E0")
        return Prediction(s_star=s_in, e_star=washout_equilibrium(sc), washout=True)

    s_x = best_x[1] if best_x else s_in
    s_z = best_z[1] if best_z else s_in
    s_y = s_y_star(viable, D, s_in)
    s_star, s_class = min([(s_x, "X"), (s_y, "Y"), (s_z, "Z")], key=lambda item: item[0])

    if s_class == "X":
        i = next(m for m in sc.m_species if m.id == best_x[0])
        e_star = _eq_x(sc, i, s_star, _compliant_group(sc, s_star))
    elif s_class == "Z":
        k = next(q for q in sc.q_species if q.id == best_z[0])
        e_star = _eq_z(sc, k, s_star, _compliant_group(sc, s_star))
    else:
        e_star = _eq_y(sc, viable)

    logger.debug(f"s★={s_star:.6g} (classe {s_class}), E★={e_star.label}")
    return Prediction(s_star=s_star, s_star_class=s_class, e_star=e_star,
                      compliant=e_star.survivors)
