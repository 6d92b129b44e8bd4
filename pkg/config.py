"""
Configurações do analisador de competição em quimiostato
"""
import logging
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Configuração via variáveis de ambiente (prefixo CHEMOSTAT_) ou arquivo .env"""
    model_config = SettingsConfigDict(env_prefix="CHEMOSTAT_", env_file=".env", extra="ignore")

    threads: int = 4
    tol_distinct: float = 1e-9
    tol_eig: float = 1e-7
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_max: float = 2000.0
    log_level: str = "INFO"


settings = Settings()

# Paralelismo da varredura
THREADS = settings.threads
if THREADS < 1:
    logger.warning(f"⚠️ CHEMOSTAT_THREADS={THREADS} inválido, usando 1")
    THREADS = 1

# Tolerâncias numéricas
TOL_DISTINCT = settings.tol_distinct
TOL_EIG = settings.tol_eig

# Integrador
REL_TOL = settings.rel_tol
ABS_TOL = settings.abs_tol
T_MAX = settings.t_max

LOG_LEVEL = settings.log_level.upper()

# Clamp de cotas em transientes (fora de (Q0, Q^m))
QUOTA_CLAMP_EPS = 1e-12

# Limite da enumeração de subconjuntos de espécies C
MAX_SUBSET_SPECIES = 12
