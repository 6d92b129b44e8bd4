"""
Exceções do analisador de quimiostato
"""
from typing import Any, Optional


class ChemostatError(Exception):
    """Erro base do pacote"""


class DomainError(ChemostatError, ValueError):
    """Argumento fora do domínio de uma função de taxa ou mapeamento"""


class UndefinedPointError(DomainError):
    """Taxa de Contois avaliada em (s, y) = (0, 0)"""


class PreconditionError(ChemostatError):
    """Pré-condição de uma operação violada (ex: estado fora da superfície de balanço)"""


class ScenarioValidationError(ChemostatError):
    """Cenário viola as hipóteses 6/7; carrega o relatório completo"""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class NumericalError(ChemostatError):
    """Falha numérica (raiz sem troca de sinal, autovalores sem convergência)"""

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class StiffnessError(NumericalError):
    """Passo do integrador abaixo do mínimo; `partial` é a trajetória parcial"""
