from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from develop.core.knowledge import DYNAMIC_SLOPE_TOLERANCE, PROPOSAL_ROUNDS
from develop.core.models import (
    Centering, GainKind, Md2Sampling, Method, RefSet, ThetaProcess, TruthCase,
)


class Cell(BaseModel):
    """Una celda del estudio: caso x ganancia x varianzas x referencias."""
    model_config = ConfigDict(frozen=True)

    case: TruthCase
    gain: GainKind
    refs: RefSet
    obs_var: float = Field(gt=0.0)
    sys_var: float = Field(gt=0.0)

    @property
    def snr(self) -> float:
        return round(self.obs_var / self.sys_var, 6)

    @property
    def key(self) -> str:
        return f"{self.case.value}|{self.gain.value}|{self.snr:g}|{self.refs.value}"


class ExperimentGrid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cases: List[TruthCase] = Field(default_factory=lambda: [TruthCase.INTERPOLATION])
    gains: List[GainKind] = Field(default_factory=lambda: list(GainKind))
    refs: List[RefSet] = Field(default_factory=lambda: list(RefSet))
    obs_vars: List[float] = Field(default_factory=lambda: [0.0001, 0.001, 0.01])
    sys_vars: List[float] = Field(default_factory=lambda: [0.00001, 0.00005])
    methods: List[Method] = Field(default_factory=lambda: list(Method))
    replicates: int = Field(default=20, ge=1)
    T: int = Field(default=500, ge=2)
    n_proposals: int = Field(default=2000, ge=1)
    n_samples: int = Field(default=500, ge=2)
    burn_in: int = Field(default=0, ge=0)
    level: float = Field(default=0.95, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)
    md2_sampling: Md2Sampling = Md2Sampling.PER_SAMPLE
    proposal_rounds: int = Field(default=PROPOSAL_ROUNDS, ge=0)
    slope_tolerance: float = Field(default=DYNAMIC_SLOPE_TOLERANCE, ge=0.0)
    centering: Centering = Centering.REFERENCE
    theta_process: ThetaProcess = ThetaProcess.IID
    interpolation_walk: bool = False
    metric_scale: Literal["original", "standardized"] = "original"
    include_timing: bool = False
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check(self) -> "ExperimentGrid":
        if self.burn_in >= self.T:
            raise ValueError(f"burn_in ({self.burn_in}) must be below T ({self.T})")
        if any(v <= 0 for v in self.obs_vars + self.sys_vars):
            raise ValueError("variances must be positive")
        return self

    def cells(self) -> List[Cell]:
        """Producto cartesiano de los escenarios (36 por caso en la rejilla completa)."""
        return [
            Cell(case=case, gain=gain, refs=refs, obs_var=obs_var, sys_var=sys_var)
            for case in self.cases
            for gain in self.gains
            for obs_var in self.obs_vars
            for sys_var in self.sys_vars
            for refs in self.refs
        ]
