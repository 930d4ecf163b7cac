"""
OPQ classification service

两个维度：
- 纵轴：基础成本（最小包长下的净成本），按数据集中位数切分，等于阈值归入高侧
- 横轴：幂律指数 k，按 k = 1 切分，k == 1 归入亚线性侧
"""
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from opq_profiler.core.exceptions import (
    DivisionByZero,
    EmptyDataset,
    MissingSmallestSize,
    NoCommonOperators,
    NonPositiveFrequency,
)
from opq_profiler.schemas.cost import CostCurve, CostSample
from opq_profiler.schemas.opq import OpqPoint, ShiftRecord, ShiftResult
from opq_profiler.services.scaling_fit_service import eval_curve
from opq_profiler.shared.constants.enums import BaseCostSource, QuadrantLabel

logger = structlog.get_logger(__name__)

# 每个象限对应的优化建议（仅作提示）
QUADRANT_STRATEGIES: Dict[QuadrantLabel, str] = {
    QuadrantLabel.LATENT_TRAP: "algorithm replacement or hardware offload",
    QuadrantLabel.HIGH_STARTUP_COST: "batch processing or vectorization to amortize the fixed cost",
    QuadrantLabel.IDEAL: "none",
    QuadrantLabel.EMERGENT_BOTTLENECK: "hybrid algorithm",
}

# 基础成本达到阈值的该倍数时建议直接避免使用（printf 一类）
AVOIDANCE_FACTOR = 100.0


class OpqService:
    """OPQ 分类服务"""

    @staticmethod
    def resolve_base_cost(
        smallest_size: int,
        samples: Optional[Sequence[CostSample]] = None,
        curve: Optional[CostCurve] = None,
    ) -> Tuple[float, BaseCostSource]:
        """优先使用最小包长的实测样本，否则在拟合曲线上取值"""
        for sample in samples or []:
            if sample.packet_size == smallest_size:
                return sample.cost_cycles, BaseCostSource.SAMPLE
        if curve is not None and smallest_size > 0:
            return eval_curve(curve, smallest_size), BaseCostSource.CURVE
        raise MissingSmallestSize(smallest_size)

    def base_cost_of(
        self,
        smallest_size: int,
        samples: Optional[Sequence[CostSample]] = None,
        curve: Optional[CostCurve] = None,
    ) -> float:
        value, _ = self.resolve_base_cost(smallest_size, samples=samples, curve=curve)
        return value

    @staticmethod
    def median_threshold(base_costs: Iterable[float]) -> float:
        """基础成本中位数，偶数个时取中间两个的平均"""
        values = sorted(float(v) for v in base_costs)
        if not values:
            raise EmptyDataset()
        return float(np.median(values))

    @staticmethod
    def classify_quadrant(base_cost: float, exponent_k: float, threshold: float) -> QuadrantLabel:
        return QuadrantLabel.classify(base_cost, exponent_k, threshold)

    def classify_profile(
        self,
        curves: Sequence[CostCurve],
        platform: str,
        threshold: Optional[float] = None,
        samples: Optional[Sequence[CostSample]] = None,
    ) -> List[OpqPoint]:
        """为一个平台的全部曲线生成 OPQ 点

        Args:
            curves: 各算子的拟合曲线
            platform: 平台名
            threshold: 固定阈值；为 None 时取本次传入数据的中位数
            samples: 实测样本，用于最小包长下的基础成本
        """
        if not curves:
            return []
        by_operator: Dict[str, List[CostSample]] = {}
        for sample in samples or []:
            by_operator.setdefault(sample.operator, []).append(sample)

        resolved = []
        for curve in curves:
            op_samples = by_operator.get(curve.operator, [])
            if op_samples:
                smallest = min(s.packet_size for s in op_samples)
                base, source = self.resolve_base_cost(smallest, samples=op_samples, curve=curve)
            else:
                base, source = curve.base_cost, BaseCostSource.CURVE
            resolved.append((curve, base, source))

        used = threshold if threshold is not None else self.median_threshold(b for _, b, _ in resolved)
        points = [
            OpqPoint(
                operator=curve.operator,
                platform=platform,
                base_cost=base,
                exponent_k=curve.exponent_k,
                quadrant=self.classify_quadrant(base, curve.exponent_k, used),
                threshold_used=used,
                base_cost_source=source,
            )
            for curve, base, source in resolved
        ]
        logger.info(
            "profile_classified",
            platform=platform,
            threshold=used,
            threshold_override=threshold is not None,
            quadrants={p.operator: p.quadrant.value for p in points},
        )
        return points

    def compute_shift(self, from_points: Sequence[OpqPoint], to_points: Sequence[OpqPoint]) -> ShiftResult:
        """两个平台间的象限迁移，各自使用自己的阈值"""
        from_map = {p.operator: p for p in from_points}
        to_map = {p.operator: p for p in to_points}
        common = [op for op in from_map if op in to_map]
        if not common:
            raise NoCommonOperators(from_map.keys(), to_map.keys())

        records = []
        for op in common:
            src, dst = from_map[op], to_map[op]
            records.append(ShiftRecord(
                operator=op,
                from_platform=src.platform,
                to_platform=dst.platform,
                from_quadrant=src.quadrant,
                to_quadrant=dst.quadrant,
                delta_base=dst.base_cost - src.base_cost,
                delta_k=dst.exponent_k - src.exponent_k,
                from_base=src.base_cost,
                to_base=dst.base_cost,
                from_k=src.exponent_k,
                to_k=dst.exponent_k,
                from_threshold=src.threshold_used,
                to_threshold=dst.threshold_used,
            ))
        skipped = sorted(set(from_map) ^ set(to_map))
        logger.info(
            "quadrant_shift_computed",
            common=len(records),
            shifted=[r.operator for r in records if r.shifted],
            skipped=skipped,
        )
        return ShiftResult(records=records, skipped=skipped)

    @staticmethod
    def normalize_to_time(cost_cycles: float, cpu_hz: float) -> float:
        """cycles -> 纳秒"""
        if not cpu_hz > 0:
            raise NonPositiveFrequency(cpu_hz)
        return cost_cycles / cpu_hz * 1e9

    @staticmethod
    def fold_change(cost_a: float, cost_b: float) -> float:
        if not cost_b > 0:
            raise DivisionByZero()
        return cost_a / cost_b

    @staticmethod
    def cycles_per_byte(curve: CostCurve, packet_size: int) -> float:
        return eval_curve(curve, packet_size) / packet_size

    def compare_platforms(
        self,
        from_points: Sequence[OpqPoint],
        from_hz: float,
        to_points: Sequence[OpqPoint],
        to_hz: float,
    ) -> Dict[str, Dict[str, float]]:
        """按时钟归一化后的基础成本（ns）对比"""
        to_map = {p.operator: p for p in to_points}
        comparison: Dict[str, Dict[str, float]] = {}
        for src in from_points:
            dst = to_map.get(src.operator)
            if dst is None:
                continue
            from_ns = self.normalize_to_time(src.base_cost, from_hz)
            to_ns = self.normalize_to_time(dst.base_cost, to_hz)
            comparison[src.operator] = {
                "from_ns": from_ns,
                "to_ns": to_ns,
                "speedup": from_ns / to_ns if to_ns > 0 else math.inf,
            }
        return comparison

    @staticmethod
    def strategy_for(point: OpqPoint) -> str:
        """象限对应的优化建议"""
        strategy = QUADRANT_STRATEGIES[point.quadrant]
        if point.threshold_used > 0 and point.base_cost >= AVOIDANCE_FACTOR * point.threshold_used:
            strategy = f"avoid in the data path; {strategy}"
        return strategy
