"""
Simulation schemas
"""
from typing import Callable, List, Literal, Optional, Union

from pydantic import ConfigDict, Field, field_validator

from opq_profiler.shared.constants.enums import BoundFlag
from .base import ValueObject
from .cost import CostCurve, CostSample, PowerLaw


class SimConfig(ValueObject):
    """CPU饱和数据面的确定性模型"""
    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    cpu_hz: float = Field(gt=0)
    base_cost_fn: Callable[[int], float]  # packet_size -> C_base cycles
    line_rate_pps_fn: Optional[Callable[[int], float]] = None
    noise_sigma: float = Field(default=0.0, ge=0)
    seed: int = 0


class SimulatedPoint(ValueObject):
    """单次仿真吞吐"""
    pps: float
    bound: BoundFlag


class SimulationFile(ValueObject):
    """simulate 子命令的 JSON 配置段"""
    cpu_hz: float = Field(gt=0)
    base_cost: PowerLaw
    op_cost: PowerLaw
    operator: str = "sim_op"
    platform: str = "sim"
    line_rate: Union[Literal["100gbe"], float, None] = None
    noise_sigma: float = Field(default=0.0, ge=0)
    seed: int = 0
    runs: int = Field(default=1, ge=1)
    sizes: List[int] = Field(default_factory=lambda: [64, 128, 256])

    @field_validator("sizes")
    @classmethod
    def check_sizes(cls, v: List[int]) -> List[int]:
        if not v or any(s < 1 for s in v):
            raise ValueError("sizes must be non-empty positive integers")
        return v


class RoundtripReport(ValueObject):
    """注入曲线与恢复曲线的对比"""
    injected: List[CostSample]
    recovered: List[CostSample]
    max_relative_error: Optional[float] = None
    curve: Optional[CostCurve] = None
    degenerate: bool = False
    degenerate_reason: Optional[str] = None
    excluded_sizes: List[int] = Field(default_factory=list)
    delta_a: Optional[float] = None
    delta_k: Optional[float] = None
