"""
Integrador explícito adaptativo: par embutido Dormand-Prince 5(4) com controle PI
"""
import logging
from typing import Callable, Tuple

import numpy as np

from errors import StiffnessError

logger = logging.getLogger(__name__)

# tabela de Butcher estendida (FSAL: a última linha é a solução de ordem 5)
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
# diferença entre as soluções de ordem 5 e 4
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
BETA_1 = 0.7 / 5
BETA_2 = 0.4 / 5
# restos menores que isso (relativo a max(1, |t|)) são absorvidos pelo passo atual
H_MIN_REL = 1e-12

RHS = Callable[[float, np.ndarray], np.ndarray]


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, rel_tol: float, abs_tol: float) -> float:
    scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(fun: RHS, t0: float, y0: np.ndarray, f0: np.ndarray, rel_tol: float, abs_tol: float) -> float:
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    if d0 < 1e-5 or d1 < 1e-5:
        return 1e-6
    return 0.01 * d0 / d1


def _attempt(fun: RHS, t: float, y: np.ndarray, f: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = np.empty((7, y.size))
    k[0] = f
    for i in range(1, 7):
        k[i] = fun(t + C[i] * h, y + h * (A[i] @ k[:i]))
    y_new = y + h * (A[6] @ k[:6])
    # k[6] já é f(t+h, y_new)
    return y_new, k[6], h * (E @ k)


def dormand_prince(fun: RHS, t0: float, y0: np.ndarray, t_end: float, sample_dt: float,
                   rel_tol: float, abs_tol: float, max_step: float,
                   nonnegative: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integra y' = fun(t, y) de t0 a t_end, amostrando exatamente em t0 + n·sample_dt

    Passos encurtados para cair numa amostra não alteram o h proposto pelo controle.
    Com nonnegative=True, coordenadas negativas após um passo aceito são zeradas
    quando |v| < abs_tol; caso contrário o passo é rejeitado e h reduzido à metade.

    Raises:
        StiffnessError: h abaixo do mínimo; `partial` = (tempos, estados) até ali
    """
    y = np.asarray(y0, dtype=float).copy()
    t = float(t0)
    f = fun(t, y)
    h = min(max_step, sample_dt, _initial_step(fun, t, y, f, rel_tol, abs_tol))
    err_prev = 1e-4

    times = [t]
    states = [y.copy()]
    n_sample = 1
    accepted = rejected = 0

    while t < t_end:
        target = min(t0 + n_sample * sample_dt, t_end)
        h_min = H_MIN_REL * max(1.0, abs(t))
        if h < h_min:
            logger.error(f"❌ Passo abaixo do mínimo em t={t:.6g} (h={h:.3g})")
            raise StiffnessError(f"passo do integrador abaixo de {h_min:.3g} em t={t:.6g}",
                                 partial=(np.array(times), np.array(states)))
        landing = target - t <= h + h_min
        step = target - t if landing else h

        y_new, f_new, err = _attempt(fun, t, y, f, step)
        err_norm = _error_norm(err, y, y_new, rel_tol, abs_tol)

        if not np.all(np.isfinite(y_new)) or err_norm > 1.0:
            rejected += 1
            factor = MIN_FACTOR if not np.isfinite(err_norm) else max(MIN_FACTOR, SAFETY * err_norm ** -0.2)
            h = step * factor
            continue

        if nonnegative:
            negative = y_new < 0.0
            if negative.any():
                if np.all(np.abs(y_new[negative]) < abs_tol):
                    y_new[negative] = 0.0
                    f_new = fun(target if landing else t + step, y_new)
                else:
                    rejected += 1
                    h = 0.5 * step
                    continue

        accepted += 1
        t = target if landing else t + step
        y, f = y_new, f_new
        if landing:
            times.append(t)
            states.append(y.copy())
            n_sample += 1

        err_norm = max(err_norm, 1e-10)
        factor = SAFETY * err_norm ** -BETA_1 * err_prev ** BETA_2
        proposed = min(max_step, step * min(MAX_FACTOR, max(MIN_FACTOR, factor)))
        if landing and step < h:
            # passo encurtado pela amostra mantém o h anterior
            proposed = max(proposed, h)
        h = proposed
        err_prev = max(err_norm, 1e-4)

    logger.debug(f"Integração concluída: {accepted} passos aceitos, {rejected} rejeitados")
    return np.array(times), np.array(states)
