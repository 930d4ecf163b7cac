"""
Profile and plot document schemas
"""
from typing import Any, Dict, List, Optional

from pydantic import Field, model_validator

from opq_profiler.shared.constants.enums import Provenance, QuadrantLabel
from .base import ValueObject
from .cost import FIT_SPACE, CostCurve, CostSample, ValidityWarning
from .measurement import PlatformSpec
from .opq import OpqPoint


class ProfileDocument(ValueObject):
    """单个平台的算子性能 profile"""
    schema_version: str = "1"
    platform: PlatformSpec
    curves: List[CostCurve] = Field(default_factory=list)
    samples: List[CostSample] = Field(default_factory=list)
    opq_points: List[OpqPoint] = Field(default_factory=list)
    provenance: Provenance
    fit_space: str = FIT_SPACE
    warnings: List[ValidityWarning] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_points_have_curves(self) -> "ProfileDocument":
        curve_ops = {c.operator for c in self.curves}
        orphans = sorted({p.operator for p in self.opq_points} - curve_ops)
        if orphans:
            raise ValueError(f"OPQ points without a matching curve: {orphans}")
        return self

    def curve_for(self, operator: str) -> Optional[CostCurve]:
        return next((c for c in self.curves if c.operator == operator), None)


class PlotPoint(ValueObject):
    operator: str
    platform: str
    x: float  # exponent_k
    y: float  # base_cost
    quadrant: QuadrantLabel


class PlotBoundary(ValueObject):
    platform: str
    axis: str  # "x" 或 "y"
    value: float


class PlotArrow(ValueObject):
    operator: str
    from_xy: List[float]
    to_xy: List[float]
    from_quadrant: QuadrantLabel
    to_quadrant: QuadrantLabel
    shifted: bool


class CostSeries(ValueObject):
    """成本-包长曲线，用于缩放图"""
    operator: str
    platform: str
    sizes: List[int]
    measured: List[Optional[float]]
    fitted: List[float]


class BarPair(ValueObject):
    """printf 与轻量日志在最小包长下的成本对比"""
    platform: str
    heavy_operator: str
    light_operator: str
    heavy_cost: float
    light_cost: float
    fold_change: float


class OpqPlotDocument(ValueObject):
    """绘图数据，不做图像渲染"""
    schema_version: str = "1"
    y_log_scale: bool = True
    points: List[PlotPoint] = Field(default_factory=list)
    boundaries: List[PlotBoundary] = Field(default_factory=list)
    arrows: List[PlotArrow] = Field(default_factory=list)
    series: List[CostSeries] = Field(default_factory=list)
    bar_pairs: List[BarPair] = Field(default_factory=list)
