"""
Scaling fit service

幂律成本模型 C_op(s) = a · s^k，在 (ln s, ln cost) 上做普通最小二乘。
R² 在对数空间计算，结果中以 fit_space="log-log" 标明。
"""
import math
from typing import List, Sequence

import numpy as np
import structlog

from opq_profiler.core.exceptions import (
    InsufficientPoints,
    NonFiniteExponent,
    NonPositiveCost,
    NonPositiveSize,
)
from opq_profiler.schemas.cost import CostCurve, CostSample
from opq_profiler.shared.constants.enums import ScalingClass

logger = structlog.get_logger(__name__)


def fit_power_law(samples: Sequence[CostSample]) -> CostCurve:
    """拟合 C(s) = a · s^k

    Raises:
        InsufficientPoints: 少于2个不同包长
        NonPositiveCost: 存在 cost <= 0（对数无定义）
    """
    sizes = {s.packet_size for s in samples}
    if len(samples) < 2 or len(sizes) != len(samples):
        raise InsufficientPoints(len(sizes))
    for sample in samples:
        if sample.packet_size <= 0:
            raise NonPositiveSize(sample.packet_size)
        if not sample.cost_cycles > 0:
            raise NonPositiveCost(sample.packet_size, sample.cost_cycles)

    ordered = sorted(samples, key=lambda s: s.packet_size)
    x = np.log(np.array([s.packet_size for s in ordered], dtype=np.float64))
    y = np.log(np.array([s.cost_cycles for s in ordered], dtype=np.float64))

    if np.all(y == y[0]):
        # 成本全部相等：响应方差为0，斜率取0并定义 R² = 1
        slope, intercept, r_squared = 0.0, float(y[0]), 1.0
    else:
        x_centered = x - x.mean()
        y_centered = y - y.mean()
        slope = float(np.dot(x_centered, y_centered) / np.dot(x_centered, x_centered))
        intercept = float(y.mean() - slope * x.mean())
        ss_tot = float(np.dot(y_centered, y_centered))
        residuals = y - (intercept + slope * x)
        ss_res = float(np.dot(residuals, residuals))
        r_squared = min(1.0, 1.0 - ss_res / ss_tot)

    coefficient_a = math.exp(intercept)
    s_min = ordered[0].packet_size
    operators = sorted({s.operator for s in ordered})
    curve = CostCurve(
        operator=operators[0] if len(operators) == 1 else "+".join(operators),
        coefficient_a=coefficient_a,
        exponent_k=slope,
        r_squared=r_squared,
        base_cost=coefficient_a * float(s_min) ** slope,
        n_points=len(ordered),
        min_size=s_min,
        max_size=ordered[-1].packet_size,
    )
    logger.debug(
        "power_law_fitted",
        operator=curve.operator,
        a=curve.coefficient_a,
        k=curve.exponent_k,
        r_squared=curve.r_squared,
    )
    return curve


def eval_curve(curve: CostCurve, packet_size: float) -> float:
    """a · s^k"""
    if not packet_size > 0:
        raise NonPositiveSize(packet_size)
    return curve.coefficient_a * float(packet_size) ** curve.exponent_k


def predict_costs(curve: CostCurve, sizes: Sequence[int]) -> List[float]:
    return [eval_curve(curve, s) for s in sizes]


def classify_scaling(exponent_k: float) -> ScalingClass:
    """k > 1 超线性，k < 1 亚线性，k == 1 线性"""
    if not math.isfinite(exponent_k):
        raise NonFiniteExponent(exponent_k)
    if exponent_k > 1:
        return ScalingClass.SUPER_LINEAR
    if exponent_k < 1:
        return ScalingClass.SUB_LINEAR
    return ScalingClass.LINEAR
