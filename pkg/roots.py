"""
Busca de raízes de funções monótonas com intervalo verificado
"""
import logging
from typing import Callable

from scipy.optimize import brentq

from errors import NumericalError

logger = logging.getLogger(__name__)

XTOL = 1e-14
RTOL = 4.0 * 2.220446049250313e-16
MAX_DOUBLINGS = 200


def bracketed_root(func: Callable[[float], float], lo: float, hi: float) -> float:
    """
    Raiz de `func` em [lo, hi] com verificação da troca de sinal antes de iterar

    Raises:
        NumericalError: sem troca de sinal no intervalo
    """
    f_lo = func(lo)
    f_hi = func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NumericalError(f"sem troca de sinal em [{lo}, {hi}]: f={f_lo}, {f_hi}")
    root, info = brentq(func, lo, hi, xtol=XTOL, rtol=RTOL, maxiter=500, full_output=True, disp=False)
    if not info.converged:
        raise NumericalError(f"brentq não convergiu em [{lo}, {hi}]", partial=root)
    return float(root)


def root_increasing(func: Callable[[float], float], lo: float, hi_start: float) -> float:
    """
    Raiz de uma função crescente com f(lo) ≤ 0, dobrando o limite superior até f(hi) > 0
    """
    hi = max(hi_start, lo + 1e-12)
    for _ in range(MAX_DOUBLINGS):
        if func(hi) > 0:
            return bracketed_root(func, lo, hi)
        lo, hi = hi, 2.0 * hi
    raise NumericalError(f"intervalo não encontrado até {hi}")
