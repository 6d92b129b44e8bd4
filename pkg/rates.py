"""
Funções de taxa do modelo (Monod, Contois, Michaelis-Menten, Droop, Caperon-Meyer)
e suas derivadas parciais analíticas
"""
import logging
import math

from errors import DomainError, UndefinedPointError
from models import CaperonMeyerGrowth, CSpecies, MSpecies, QSpecies, QuotaGrowth

logger = logging.getLogger(__name__)


def _check_finite_nonnegative(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise DomainError(f"{name}={value} não é finito")
    if value < 0:
        raise DomainError(f"{name}={value} negativo")


# ===== M: Monod =====

def rate_m(species: MSpecies, s: float) -> float:
    """α(s) = alpha_max·s/(s+K_s)"""
    _check_finite_nonnegative("s", s)
    p = species.params
    return p.alpha_max * s / (s + p.K_s)


def rate_m_ds(species: MSpecies, s: float) -> float:
    p = species.params
    return p.alpha_max * p.K_s / (s + p.K_s) ** 2


# ===== C: Contois =====

def rate_c(species: CSpecies, s: float, y: float) -> float:
    """
    β(s,y) = beta_max·(s/y)/(K_s + s/y) = beta_max·s/(K_s·y + s)

    Em y=0 (s>0) devolve o limite beta_max; (0,0) não é definido.
    """
    _check_finite_nonnegative("s", s)
    _check_finite_nonnegative("y", y)
    if s == 0.0 and y == 0.0:
        raise UndefinedPointError(f"β({species.id}) indefinida em (s, y) = (0, 0)")
    p = species.params
    return p.beta_max * s / (p.K_s * y + s)


def rate_c_ds(species: CSpecies, s: float, y: float) -> float:
    p = species.params
    denom = p.K_s * y + s
    if denom == 0.0:
        raise UndefinedPointError(f"∂β/∂s({species.id}) indefinida em (0, 0)")
    return p.beta_max * p.K_s * y / denom ** 2


def rate_c_dy(species: CSpecies, s: float, y: float) -> float:
    p = species.params
    denom = p.K_s * y + s
    if denom == 0.0:
        raise UndefinedPointError(f"∂β/∂y({species.id}) indefinida em (0, 0)")
    return -p.beta_max * p.K_s * s / denom ** 2


# ===== Q: absorção e crescimento por cota =====

def uptake_q(species: QSpecies, s: float) -> float:
    """ρ(s) = rho_max·s/(s+K_s)"""
    _check_finite_nonnegative("s", s)
    u = species.uptake
    return u.rho_max * s / (s + u.K_s)


def uptake_q_ds(species: QSpecies, s: float) -> float:
    u = species.uptake
    return u.rho_max * u.K_s / (s + u.K_s) ** 2


def growth_of_quota(growth: QuotaGrowth, q: float) -> float:
    """γ(q); zero para q ≤ Q0 (definição por partes mantida exatamente)"""
    _check_finite_nonnegative("q", q)
    if q <= growth.Q0:
        return 0.0
    if isinstance(growth, CaperonMeyerGrowth):
        excess = q - growth.Q0
        return growth.gamma_bar * excess / (excess + growth.K_q)
    return growth.gamma_bar * (1.0 - growth.Q0 / q)


def growth_of_quota_dq(growth: QuotaGrowth, q: float) -> float:
    # derivada à direita em Q0
    if q < growth.Q0:
        return 0.0
    if isinstance(growth, CaperonMeyerGrowth):
        return growth.gamma_bar * growth.K_q / (q - growth.Q0 + growth.K_q) ** 2
    return growth.gamma_bar * growth.Q0 / q ** 2


def rate_q_growth(species: QSpecies, q: float) -> float:
    """γ_k(q) da espécie"""
    return growth_of_quota(species.growth, q)


def rate_q_growth_dq(species: QSpecies, q: float) -> float:
    return growth_of_quota_dq(species.growth, q)
