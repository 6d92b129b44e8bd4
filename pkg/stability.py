"""
Jacobianas do sistema reduzido Σ e do sistema completo, autovalores e
classificação de estabilidade dos equilíbrios com atribuição por espécie
"""
import cmath
import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from config import TOL_EIG
from errors import NumericalError, PreconditionError
from mappings import f_of_q_dq, quota_max
from models import (
    Attribution, EigenEntry, Equilibrium, JacobianMatrix, Scenario, StabilityReport, State,
)
from rates import (
    rate_c, rate_c_ds, rate_c_dy, rate_m, rate_m_ds, rate_q_growth, rate_q_growth_dq,
    uptake_q, uptake_q_ds,
)
from scenario import normalize

logger = logging.getLogger(__name__)

SURFACE_TOL = 1e-8


def _labels(sc: Scenario) -> Tuple[str, ...]:
    return (tuple(f"x_{m.id}" for m in sc.m_species) + tuple(f"y_{c.id}" for c in sc.c_species)
            + tuple(f"z_{k.id}" for k in sc.q_species) + tuple(f"q_{k.id}" for k in sc.q_species))


def _blocks(sc: Scenario, state: State, s: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Parte direta da jacobiana de (x, y, z, q), a derivada de cada equação em s
    e a derivada de s = s_in - Σx - Σy - Σ q·z em cada coordenada
    """
    nx, ny, nz = sc.dims
    n = nx + ny + 2 * nz
    direct = np.zeros((n, n))
    d_ds = np.zeros(n)
    s_grad = np.zeros(n)
    for a, (m, x) in enumerate(zip(sc.m_species, state.x)):
        direct[a, a] = rate_m(m, s) - sc.D
        d_ds[a] = rate_m_ds(m, s) * x
        s_grad[a] = -1.0
    for j, (c, y) in enumerate(zip(sc.c_species, state.y)):
        a = nx + j
        direct[a, a] = rate_c(c, s, y) - sc.D + rate_c_dy(c, s, y) * y
        d_ds[a] = rate_c_ds(c, s, y) * y
        s_grad[a] = -1.0
    for k, (sp, z, q) in enumerate(zip(sc.q_species, state.z, state.q)):
        zi, qi = nx + ny + k, nx + ny + nz + k
        direct[zi, zi] = rate_q_growth(sp, q) - sc.D
        direct[zi, qi] = rate_q_growth_dq(sp, q) * z
        direct[qi, qi] = -f_of_q_dq(sp, q)
        d_ds[qi] = uptake_q_ds(sp, s)
        s_grad[zi] = -q
        s_grad[qi] = -z
    return direct, d_ds, s_grad


def jacobian_sigma(scenario: Scenario, state: State) -> JacobianMatrix:
    """
    Jacobiana do sistema Σ (superfície M = s_in) nas coordenadas (x, y, z, q),
    com s substituído por s_in - Σx - Σy - Σ q·z
    """
    sc = normalize(scenario)
    if not state.matches(sc):
        raise PreconditionError("dimensões do estado não correspondem ao cenário")
    if abs(state.total_substrate - sc.s_in) >= SURFACE_TOL:
        raise PreconditionError(
            f"estado fora da superfície de balanço: |M - s_in| = {abs(state.total_substrate - sc.s_in):.3g}")
    for sp, q in zip(sc.q_species, state.q):
        if not sp.growth.Q0 < q < quota_max(sp):
            raise PreconditionError(f"q_{sp.id}={q} fora de (Q0, Q^m)")
    s = sc.s_in - sum(state.x) - sum(state.y) - sum(q * z for q, z in zip(state.q, state.z))
    direct, d_ds, s_grad = _blocks(sc, state, s)
    return JacobianMatrix(matrix=direct + np.outer(d_ds, s_grad), labels=_labels(sc))


def jacobian_full(scenario: Scenario, state: State) -> JacobianMatrix:
    """Jacobiana do modelo completo nas coordenadas (s, x, y, z, q)"""
    sc = normalize(scenario)
    if not state.matches(sc):
        raise PreconditionError("dimensões do estado não correspondem ao cenário")
    s = state.s
    direct, d_ds, _ = _blocks(sc, state, s)
    nx, ny, nz = sc.dims
    n = direct.shape[0] + 1
    jac = np.zeros((n, n))
    jac[1:, 1:] = direct
    jac[1:, 0] = d_ds

    row = np.zeros(n)
    row[0] = (-sc.D
              - sum(rate_m_ds(m, s) * x for m, x in zip(sc.m_species, state.x))
              - sum(rate_c_ds(c, s, y) * y for c, y in zip(sc.c_species, state.y))
              - sum(uptake_q_ds(k, s) * z for k, z in zip(sc.q_species, state.z)))
    for a, m in enumerate(sc.m_species):
        row[1 + a] = -rate_m(m, s)
    for j, (c, y) in enumerate(zip(sc.c_species, state.y)):
        row[1 + nx + j] = -(rate_c(c, s, y) + rate_c_dy(c, s, y) * y)
    for k, sp in enumerate(sc.q_species):
        row[1 + nx + ny + k] = -uptake_q(sp, s)
    jac[0] = row
    return JacobianMatrix(matrix=jac, labels=("s",) + _labels(sc))


def eigenvalues(m: Union[JacobianMatrix, np.ndarray]) -> List[complex]:
    """
    Autovalores de uma matriz real; dimensões ≤ 2 em forma fechada, acima disso
    LAPACK (balanceamento, Hessenberg, QR com deslocamentos)
    """
    a = np.asarray(m.matrix if isinstance(m, JacobianMatrix) else m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NumericalError(f"matriz não quadrada: {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericalError("matriz com entradas não finitas")
    n = a.shape[0]
    if n == 0:
        return []
    if n == 1:
        return [complex(a[0, 0])]
    if n == 2:
        half_trace = 0.5 * (a[0, 0] + a[1, 1])
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        root = cmath.sqrt(half_trace * half_trace - det)
        if root.imag == 0.0:
            return [complex(half_trace + root.real), complex(half_trace - root.real)]
        return [half_trace + root, half_trace - root]
    try:
        values = scipy.linalg.eigvals(a, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"QR não convergiu: {e}") from e
    return [complex(v) for v in values]


# ===== CLASSIFICAÇÃO =====

def _peel(sc: Scenario, state: State) -> Tuple[List[int], List[Tuple[str, str, str, float]]]:
    """
    Coordenadas de biomassa nula fornecem autovalores analíticos e saem da matriz;
    devolve os índices que sobram e a lista (espécie, coordenada, rótulo, valor)
    """
    nx, ny, nz = sc.dims
    s = state.s
    keep: List[int] = []
    peeled: List[Tuple[str, str, str, float]] = []
    for a, (m, x) in enumerate(zip(sc.m_species, state.x)):
        if x == 0.0:
            peeled.append((m.id, "x", f"analytic:x_{m.id}", rate_m(m, s) - sc.D))
        else:
            keep.append(a)
    for j, (c, y) in enumerate(zip(sc.c_species, state.y)):
        if y == 0.0:
            peeled.append((c.id, "y", f"analytic:y_{c.id}", rate_c(c, s, 0.0) - sc.D))
        else:
            keep.append(nx + j)
    for k, (sp, z, q) in enumerate(zip(sc.q_species, state.z, state.q)):
        if z == 0.0:
            peeled.append((sp.id, "z", f"analytic:z_{sp.id}", rate_q_growth(sp, q) - sc.D))
            peeled.append((sp.id, "q", f"analytic:q_{sp.id}", -f_of_q_dq(sp, q)))
        else:
            keep.extend([nx + ny + k, nx + ny + nz + k])
    return sorted(keep), peeled


def residual_block(scenario: Scenario, eq: Equilibrium) -> JacobianMatrix:
    """Bloco da jacobiana de Σ restrito às espécies presentes no equilíbrio"""
    sc = normalize(scenario)
    jac = jacobian_sigma(sc, eq.state)
    keep, _ = _peel(sc, eq.state)
    return JacobianMatrix(matrix=jac.matrix[np.ix_(keep, keep)],
                          labels=tuple(jac.labels[i] for i in keep))


_NOTES = {
    "x": "espécie M com sˣ★ abaixo de s_eq",
    "y": "espécie C complacente em s_eq",
    "z": "espécie Q com sᶻ★ abaixo de s_eq",
}


def _classification(values: Sequence[complex], tol_eig: float) -> str:
    if any(abs(v.real) <= tol_eig for v in values):
        return "Marginal"
    if all(v.real < -tol_eig for v in values):
        return "Stable"
    return "Unstable"


def classify(scenario: Scenario, eq: Equilibrium, tol_eig: float = TOL_EIG) -> StabilityReport:
    """
    Classifica um equilíbrio do ortante positivo: autovalores analíticos das
    biomassas nulas mais o espectro numérico do bloco restante
    """
    if not eq.in_positive_orthant:
        raise PreconditionError(f"{eq.label} fora do ortante positivo")
    sc = normalize(scenario)
    keep, peeled = _peel(sc, eq.state)
    block = jacobian_sigma(sc, eq.state).matrix[np.ix_(keep, keep)]

    entries: List[EigenEntry] = []
    attributions: List[Attribution] = []
    values: List[complex] = []
    for species_id, coordinate, source, value in peeled:
        entries.append(EigenEntry(re=value, im=0.0, source=source))
        values.append(complex(value))
        sign = int(np.sign(value))
        attributions.append(Attribution(species_id=species_id, coordinate=coordinate, value=value,
                                        sign=sign, note=_NOTES.get(coordinate, "") if sign > 0 else ""))
    for v in eigenvalues(block):
        entries.append(EigenEntry(re=v.real, im=v.imag, source="numeric"))
        values.append(v)

    classification = _classification(values, tol_eig)
    if classification == "Marginal":
        logger.warning(f"⚠️ {eq.label}: autovalor com parte real em ±{tol_eig} (quase degenerado)")
    logger.debug(f"{eq.label}: {classification} ({len(values)} autovalores)")
    return StabilityReport(equilibrium_class=eq.label, eigenvalues=tuple(entries),
                           classification=classification, attributions=tuple(attributions))
