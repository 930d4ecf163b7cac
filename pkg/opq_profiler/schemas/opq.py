"""
OPQ schemas
"""
from typing import List

from pydantic import model_validator

from opq_profiler.shared.constants.enums import BaseCostSource, QuadrantLabel
from .base import ValueObject


class OpqPoint(ValueObject):
    """单个算子在某平台上的象限归类"""
    operator: str
    platform: str
    base_cost: float
    exponent_k: float
    quadrant: QuadrantLabel
    threshold_used: float
    base_cost_source: BaseCostSource = BaseCostSource.CURVE

    @model_validator(mode="after")
    def check_quadrant(self) -> "OpqPoint":
        expected = QuadrantLabel.classify(self.base_cost, self.exponent_k, self.threshold_used)
        if self.quadrant != expected:
            raise ValueError(
                f"quadrant {self.quadrant.value} does not match base_cost={self.base_cost}, "
                f"exponent_k={self.exponent_k}, threshold={self.threshold_used} (expected {expected.value})"
            )
        return self


class ShiftRecord(ValueObject):
    """算子跨平台的象限迁移"""
    operator: str
    from_platform: str
    to_platform: str
    from_quadrant: QuadrantLabel
    to_quadrant: QuadrantLabel
    delta_base: float  # to - from
    delta_k: float  # to - from
    from_base: float
    to_base: float
    from_k: float
    to_k: float
    from_threshold: float
    to_threshold: float

    @property
    def shifted(self) -> bool:
        return self.from_quadrant != self.to_quadrant


class ShiftResult(ValueObject):
    """compute_shift 的输出"""
    records: List[ShiftRecord]
    skipped: List[str]
