"""
Cost schemas
"""
from typing import Dict, List, Optional

from pydantic import Field

from opq_profiler.shared.constants.enums import ValidityFlag
from .base import ValueObject

FIT_SPACE = "log-log"


class PowerLaw(ValueObject):
    """C(s) = coefficient · s^exponent，用作注入成本函数"""
    coefficient: float = Field(ge=0)
    exponent: float = 0.0

    def __call__(self, packet_size: float) -> float:
        return self.coefficient * float(packet_size) ** self.exponent


class CostSample(ValueObject):
    """单个包长下的算子净成本（cycles/packet）"""
    operator: str
    packet_size: int = Field(ge=1)
    cost_cycles: float = Field(ge=0)


class CostCurve(ValueObject):
    """幂律拟合结果"""
    operator: str
    coefficient_a: float
    exponent_k: float
    r_squared: float = Field(le=1.0)
    base_cost: float
    n_points: int = Field(ge=2)
    fit_space: str = FIT_SPACE
    min_size: Optional[int] = None
    max_size: Optional[int] = None


class ValidityWarning(ValueObject):
    """单个包长的有效性标记"""
    operator: str
    packet_size: int
    flag: ValidityFlag
    detail: str = ""


class DerivationResult(ValueObject):
    """一次扫描（多个包长）的成本推导结果"""
    operator: str
    platform: str
    cpu_hz: float
    samples: List[CostSample] = Field(default_factory=list)
    base_costs: Dict[int, float] = Field(default_factory=dict)
    warnings: List[ValidityWarning] = Field(default_factory=list)
    excluded_sizes: List[int] = Field(default_factory=list)
