"""
Mapeamentos no eixo do substrato: f_k, f_k⁻¹, Q_k, S^z_k, Y_j e S^y_j
"""
import logging
from typing import Optional

from config import QUOTA_CLAMP_EPS
from errors import DomainError
from models import CaperonMeyerGrowth, CSpecies, ExtendedSubstrate, QSpecies, QuotaGrowth
from rates import growth_of_quota, growth_of_quota_dq, uptake_q
from roots import root_increasing

logger = logging.getLogger(__name__)


# ===== f_k(q) = γ_k(q)·q =====

def f_growth(growth: QuotaGrowth, q: float) -> float:
    return growth_of_quota(growth, q) * q


def f_growth_dq(growth: QuotaGrowth, q: float) -> float:
    if q < growth.Q0:
        return 0.0
    return growth_of_quota_dq(growth, q) * q + growth_of_quota(growth, q)


def f_growth_inverse(growth: QuotaGrowth, v: float) -> float:
    """Único q > Q0 com f(q) = v (Droop e Caperon-Meyer são ilimitadas)"""
    if not v > 0:
        raise DomainError(f"f⁻¹ definida apenas para v > 0 (v={v})")
    if isinstance(growth, CaperonMeyerGrowth):
        return root_increasing(lambda q: f_growth(growth, q) - v, growth.Q0,
                               growth.Q0 + growth.K_q + v / growth.gamma_bar)
    # Droop: f(q) = gamma_bar·(q - Q0)
    return growth.Q0 + v / growth.gamma_bar


def f_of_q(k: QSpecies, q: float) -> float:
    return f_growth(k.growth, q)


def f_of_q_dq(k: QSpecies, q: float) -> float:
    return f_growth_dq(k.growth, q)


def f_inverse(k: QSpecies, v: float) -> float:
    return f_growth_inverse(k.growth, v)


def gamma_inverse(k: QSpecies, D: float) -> Optional[float]:
    """q★ com γ_k(q★) = D, ou None quando gamma_bar ≤ D"""
    g = k.growth
    if g.gamma_bar <= D:
        return None
    if isinstance(g, CaperonMeyerGrowth):
        return g.Q0 + D * g.K_q / (g.gamma_bar - D)
    return g.Q0 * g.gamma_bar / (g.gamma_bar - D)


# ===== Q_k(s) e S^z_k(q) =====

def quota_max(k: QSpecies) -> float:
    """Q^m = f⁻¹(rho_max)"""
    return f_inverse(k, k.uptake.rho_max)


def cap_Q(k: QSpecies, s: float) -> float:
    """
    Cota de equilíbrio Q_k(s) = f_k⁻¹(ρ_k(s)) para s fixo

    Para s ≤ 0 devolve o valor limite Q0.
    """
    if s <= 0:
        logger.debug(f"Q_{k.id}({s}) no limite: devolvendo Q0")
        return k.growth.Q0
    return f_inverse(k, uptake_q(k, s))


def s_of_q(k: QSpecies, q: float) -> float:
    """S^z_k(q) = Q_k⁻¹(q), definida para Q0 < q < Q^m"""
    q0 = k.growth.Q0
    q_max = quota_max(k)
    if not q0 < q < q_max:
        raise DomainError(f"S^z_{k.id}: q={q} fora de ({q0}, {q_max})")
    v = f_of_q(k, q)
    u = k.uptake
    return u.K_s * v / (u.rho_max - v)


def clamp_quota(k: QSpecies, q: float) -> float:
    """Restringe q a [Q0(1+ε), Q^m(1-ε)] nos transientes"""
    lo = k.growth.Q0 * (1.0 + QUOTA_CLAMP_EPS)
    hi = quota_max(k) * (1.0 - QUOTA_CLAMP_EPS)
    return min(max(q, lo), hi)


# ===== Y_j(s) e S^y_j(y) =====

def cap_Y(j: CSpecies, D: float, s: float) -> float:
    """Biomassa Y_j(s) > 0 com β_j(s, Y) = D, ou 0 quando β_j(s, 0) ≤ D"""
    if not D > 0:
        raise DomainError(f"D={D} deve ser positivo")
    if s < 0:
        raise DomainError(f"s={s} negativo")
    p = j.params
    if s == 0.0 or p.beta_max <= D:
        return 0.0
    return s * (p.beta_max - D) / (p.K_s * D)


def s_of_y(j: CSpecies, D: float, y: float) -> ExtendedSubstrate:
    """S^y_j(y): o s com β_j(s, y) = D, ou +∞ quando não existe; em y=0, o ínfimo"""
    if y < 0:
        raise DomainError(f"y={y} negativo")
    p = j.params
    if p.beta_max <= D:
        return ExtendedSubstrate.infinite()
    return ExtendedSubstrate.finite(y * p.K_s * D / (p.beta_max - D))


def y_threshold(j: CSpecies, D: float) -> ExtendedSubstrate:
    """S^y_j(0), o limiar de complacência da espécie C"""
    return s_of_y(j, D, 0.0)
