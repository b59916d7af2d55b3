from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from .shape import TreeShape


class ChainKind(str, Enum):
    SYMMETRIC = "symmetric"
    RANDOM_WALK = "random-walk"
    METROPOLIS = "metropolis"


class ChainSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ChainKind
    lazy: bool = False
    n_tips: int


class ChainState(BaseModel):
    current: TreeShape
    step: int = 0
    stream: int = 0
    proposed: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> Optional[float]:
        if self.proposed == 0:
            return None
        return self.accepted / self.proposed


class ChainSample(BaseModel):
    chain: int
    step: int
    shape: TreeShape


class ChainRun(BaseModel):
    spec: ChainSpec
    n_chains: int
    n_steps: int
    thinning: int
    seed: int
    samples: List[ChainSample]
    acceptance: List[Optional[float]]


class ExactKernel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: ChainSpec
    vertices: List[TreeShape]
    degrees: List[int]
    matrix: np.ndarray


class BottleneckReport(BaseModel):
    phi_star: float
    minimizers: List[List[TreeShape]]


class GapReport(BaseModel):
    gamma: float
    gamma_star: float
    t_rel: float
    eigenvalues: List[float]


class ExactDiagnostics(BaseModel):
    spec: ChainSpec
    stationarity_residual: float
    gap: GapReport
    bottleneck: Optional[BottleneckReport] = None
    bottleneck_lower: Optional[float] = None
    relaxation_upper: Optional[float] = None


class BoundReport(BaseModel):
    n_tips: int
    m_n: int
    g_n: int
    symmetric_lower: float
    symmetric_upper: float
    random_walk_lower: float
    random_walk_upper: float
    diameter: Optional[int] = None
    diameter_lower: Optional[float] = None
    exact: Dict[str, ExactDiagnostics] = {}
