"""
Modelos Pydantic do quimiostato: formas de taxa, espécies, cenário, estado e relatórios
"""
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


# ===== FORMAS DE TAXA =====

class MonodGrowth(_Frozen):
    """Crescimento de Monod α(s) = alpha_max·s/(s+K_s)"""
    kind: Literal["monod"] = "monod"
    alpha_max: PositiveFloat = Field(..., description="Taxa máxima (1/tempo)")
    K_s: PositiveFloat = Field(..., description="Constante de meia-saturação (substrato)")


class ContoisGrowth(_Frozen):
    """Crescimento de Contois β(s,y) = beta_max·(s/y)/(K_s + s/y)"""
    kind: Literal["contois"] = "contois"
    beta_max: PositiveFloat = Field(..., description="Taxa máxima (1/tempo)")
    K_s: PositiveFloat = Field(..., description="Constante da razão s/y (adimensional)")


class MMUptake(_Frozen):
    """Absorção de Michaelis-Menten ρ(s) = rho_max·s/(s+K_s)"""
    kind: Literal["michaelis_menten"] = "michaelis_menten"
    rho_max: PositiveFloat = Field(..., description="Absorção máxima (cota/tempo)")
    K_s: PositiveFloat = Field(..., description="Constante de meia-saturação (substrato)")


class DroopGrowth(_Frozen):
    """Crescimento de Droop γ(q) = gamma_bar·(1 - Q0/q) para q ≥ Q0"""
    kind: Literal["droop"] = "droop"
    gamma_bar: PositiveFloat
    Q0: PositiveFloat = Field(..., description="Cota mínima de subsistência")


class CaperonMeyerGrowth(_Frozen):
    """Crescimento de Caperon-Meyer γ(q) = gamma_bar·(q-Q0)/(q-Q0+K_q) para q ≥ Q0"""
    kind: Literal["caperon_meyer"] = "caperon_meyer"
    gamma_bar: PositiveFloat
    Q0: PositiveFloat
    K_q: PositiveFloat


QuotaGrowth = Union[DroopGrowth, CaperonMeyerGrowth]
RateForm = Union[MonodGrowth, ContoisGrowth, MMUptake, DroopGrowth, CaperonMeyerGrowth]


# ===== ESPÉCIES =====

class MParams(_Frozen):
    alpha_max: PositiveFloat
    K_s: PositiveFloat
    yield_a: PositiveFloat = Field(1.0, description="Rendimento (biomassa por substrato)")


class CParams(_Frozen):
    beta_max: PositiveFloat
    K_s: PositiveFloat
    yield_b: PositiveFloat = Field(1.0, description="Rendimento (biomassa por substrato)")


class QParams(_Frozen):
    uptake: MMUptake
    growth: QuotaGrowth


class MSpecies(_Frozen):
    """Bactéria livre (modelo M, Monod)"""
    id: str
    params: MParams

    @property
    def growth(self) -> MonodGrowth:
        return MonodGrowth(alpha_max=self.params.alpha_max, K_s=self.params.K_s)


class CSpecies(_Frozen):
    """Bactéria aderida (modelo C, Contois)"""
    id: str
    params: CParams

    @property
    def growth(self) -> ContoisGrowth:
        return ContoisGrowth(beta_max=self.params.beta_max, K_s=self.params.K_s)


class QSpecies(_Frozen):
    """Fitoplâncton (modelo Q, cota celular)"""
    id: str
    params: QParams

    @property
    def uptake(self) -> MMUptake:
        return self.params.uptake

    @property
    def growth(self) -> QuotaGrowth:
        return self.params.growth


class Scenario(_Frozen):
    """Controles do quimiostato (D, s_in) e as três listas de espécies"""
    D: PositiveFloat = Field(..., description="Taxa de diluição (1/tempo)")
    s_in: PositiveFloat = Field(..., description="Concentração de substrato de entrada")
    m_species: Tuple[MSpecies, ...] = ()
    c_species: Tuple[CSpecies, ...] = ()
    q_species: Tuple[QSpecies, ...] = ()

    @model_validator(mode="after")
    def _unique_ids(self) -> "Scenario":
        ids = self.species_ids
        duplicated = {i for i in ids if ids.count(i) > 1}
        if duplicated:
            raise ValueError(f"ids de espécie repetidos: {sorted(duplicated)}")
        return self

    @property
    def species_ids(self) -> List[str]:
        return ([m.id for m in self.m_species] + [c.id for c in self.c_species]
                + [q.id for q in self.q_species])

    @property
    def dims(self) -> Tuple[int, int, int]:
        return len(self.m_species), len(self.c_species), len(self.q_species)

    @property
    def is_normalized(self) -> bool:
        return (all(m.params.yield_a == 1.0 for m in self.m_species)
                and all(c.params.yield_b == 1.0 for c in self.c_species))

    def with_controls(self, D: float, s_in: float) -> "Scenario":
        return self.model_copy(update={"D": float(D), "s_in": float(s_in)})


# ===== ESTADO =====

class State(_Frozen):
    """Vetor de estado (s, x, y, z, q); biomassas x, y em unidades de substrato"""
    s: float
    x: Tuple[float, ...] = ()
    y: Tuple[float, ...] = ()
    z: Tuple[float, ...] = ()
    q: Tuple[float, ...] = ()

    @model_validator(mode="after")
    def _quota_per_phyto(self) -> "State":
        if len(self.z) != len(self.q):
            raise ValueError("z e q devem ter o mesmo tamanho")
        return self

    @property
    def total_substrate(self) -> float:
        """M = s + Σx + Σy + Σ q·z"""
        return self.s + sum(self.x) + sum(self.y) + sum(qk * zk for qk, zk in zip(self.q, self.z))

    def to_vector(self) -> np.ndarray:
        return np.array([self.s, *self.x, *self.y, *self.z, *self.q], dtype=float)

    @classmethod
    def from_vector(cls, vec, nx: int, ny: int, nz: int) -> "State":
        v = [float(value) for value in vec]
        return cls(
            s=v[0],
            x=tuple(v[1:1 + nx]),
            y=tuple(v[1 + nx:1 + nx + ny]),
            z=tuple(v[1 + nx + ny:1 + nx + ny + nz]),
            q=tuple(v[1 + nx + ny + nz:1 + nx + ny + 2 * nz]),
        )

    def is_nonnegative(self) -> bool:
        return min(self.to_vector()) >= 0.0

    def matches(self, scenario: Scenario) -> bool:
        nx, ny, nz = scenario.dims
        return (len(self.x), len(self.y), len(self.z)) == (nx, ny, nz)


class ExtendedSubstrate(_Frozen):
    """Concentração de substrato ou a sentinela +∞ (biomassa C insustentável)"""
    value: Optional[float] = None

    @classmethod
    def finite(cls, value: float) -> "ExtendedSubstrate":
        return cls(value=float(value))

    @classmethod
    def infinite(cls) -> "ExtendedSubstrate":
        return cls(value=None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None


# ===== VALIDAÇÃO =====

class Violation(_Frozen):
    hypothesis: str = Field(..., description="Hipótese violada", examples=["H6"])
    code: str = Field(..., description="Código da colisão", examples=["H6-x-z"])
    species: Tuple[str, ...]
    detail: str


class ValidationReport(_Frozen):
    ok: bool
    violations: Tuple[Violation, ...] = ()
    flags: Tuple[str, ...] = ()
    n_x: int = 0
    n_y: int = 0
    n_z: int = 0

    @property
    def washout(self) -> bool:
        return "E0-globally-attractive" in self.flags


# ===== EQUILÍBRIOS =====

SpeciesClass = Literal["M", "C", "Q"]
EquilibriumClass = Literal["E0", "Ex", "Ez", "Ey", "Exy", "Ezy"]


class Subsistence(_Frozen):
    """Concentração de subsistência; para espécies C guarda S^y(0)"""
    species_id: str
    species_class: SpeciesClass
    value: Optional[float] = None


class Equilibrium(_Frozen):
    """Nos relatórios JSON, eq_class sai como "class" e s_eq como "s"."""
    eq_class: EquilibriumClass = Field(..., serialization_alias="class")
    free_species: Optional[str] = None
    group: Tuple[str, ...] = ()
    state: State
    survivors: Tuple[str, ...] = ()
    s_eq: float = Field(..., serialization_alias="s")
    flags: Tuple[str, ...] = ()

    @property
    def label(self) -> str:
        if self.eq_class == "E0":
            return "E0"
        if self.eq_class in ("Ex", "Ez"):
            return f"{self.eq_class}({self.free_species})"
        group = "{" + ",".join(self.group) + "}"
        if self.eq_class == "Ey":
            return f"Ey({group})"
        return f"{self.eq_class}({self.free_species},{group})"

    @property
    def in_positive_orthant(self) -> bool:
        return "outside_positive_orthant" not in self.flags


class Prediction(_Frozen):
    s_star: float
    s_star_class: Optional[Literal["X", "Y", "Z"]] = None
    e_star: Equilibrium
    compliant: Tuple[str, ...] = ()
    washout: bool = False


# ===== ESTABILIDADE =====

class EigenEntry(_Frozen):
    re: float
    im: float
    source: str = Field(..., examples=["analytic:x_M1", "numeric"])


class Attribution(_Frozen):
    species_id: str
    coordinate: Literal["x", "y", "z", "q"]
    value: float
    sign: int
    note: str = ""


class StabilityReport(_Frozen):
    equilibrium_class: str
    eigenvalues: Tuple[EigenEntry, ...]
    classification: Literal["Stable", "Unstable", "Marginal"]
    attributions: Tuple[Attribution, ...] = ()


class JacobianMatrix(BaseModel):
    """Matriz jacobiana densa com rótulos das coordenadas"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    labels: Tuple[str, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


# ===== SIMULAÇÃO =====

class IntegratorOptions(_Frozen):
    rel_tol: float = Field(1e-8, gt=0, le=1e-2)
    abs_tol: float = Field(1e-10, gt=0, le=1e-2)
    t_max: PositiveFloat = 2000.0
    max_step: PositiveFloat = 10.0
    sample_dt: Optional[PositiveFloat] = None

    @property
    def dt(self) -> float:
        return self.sample_dt if self.sample_dt is not None else min(1.0, self.t_max / 2000.0)


class Trajectory(BaseModel):
    """Amostras no tempo com os canais de monitoramento (M, L, resíduo de massa)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    states: np.ndarray
    m_total: np.ndarray
    lower_bound: np.ndarray
    mass_residual: np.ndarray
    labels: Tuple[str, ...]
    dims: Tuple[int, int, int]
    complete: bool = True

    def __len__(self) -> int:
        return len(self.times)

    def state_at(self, index: int) -> State:
        nx, ny, nz = self.dims
        return State.from_vector(self.states[index], nx, ny, nz)


class BoundViolation(_Frozen):
    bound: str
    coordinate: str
    sample: int
    time: float
    value: float
    limit: float


class BoundsReport(_Frozen):
    ok: bool
    violations: Tuple[BoundViolation, ...] = ()
    m_max: float
    z_max: Dict[str, float] = {}
    quota_entry_times: Dict[str, Optional[float]] = {}
    s_floor: Optional[float] = None


class ConvergenceResult(_Frozen):
    converged: bool
    t_converged: Optional[float] = None
    terminal_distance: float
    limit: str
    limit_consistent: bool = True


# ===== VARREDURA =====

class ZoneThresholds(_Frozen):
    t1: Optional[float] = Field(None, description="S^y(0); None quando a espécie C nunca é complacente")
    t2: Optional[float] = Field(None, description="s_f★ + Y(s_f★); None sem espécie livre viável")


class OutcomeCell(_Frozen):
    D: float
    s_in: float
    survivors: Tuple[str, ...] = ()
    s_star: Optional[float] = None
    s_star_class: Optional[str] = None
    zone: Optional[int] = None
    flags: Tuple[str, ...] = ()
    equilibrium: Optional[Equilibrium] = None


class OutcomeMap(_Frozen):
    d_grid: Tuple[float, ...]
    s_in_grid: Tuple[float, ...]
    cells: Tuple[Tuple[OutcomeCell, ...], ...]


# ===== CLI =====

class GridSpec(_Frozen):
    min: PositiveFloat
    max: PositiveFloat
    count: int = Field(..., ge=1)
    spacing: Literal["lin", "log"] = "lin"

    @model_validator(mode="after")
    def _ordered(self) -> "GridSpec":
        if self.max < self.min:
            raise ValueError("grade com max < min")
        return self


class RunConfig(_Frozen):
    command: Literal["validate", "equilibria", "simulate", "sweep"]
    scenario: Optional[Path] = None
    preset: Optional[str] = None
    out: Path = Path("out")
    initial: Optional[Path] = None
    t_max: Optional[PositiveFloat] = None
    rel_tol: Optional[float] = Field(None, gt=0, le=1e-2)
    abs_tol: Optional[float] = Field(None, gt=0, le=1e-2)
    seed: int = 0
    grid_d: Optional[GridSpec] = None
    grid_sin: Optional[GridSpec] = None
    all_subsets: bool = False

    @model_validator(mode="after")
    def _has_source(self) -> "RunConfig":
        if self.scenario is None and self.preset is None:
            raise ValueError("informe --scenario ou --preset")
        return self
