"""
Cost derivation service

饱和吞吐差分协议：
    R_base × C_base = F_cpu
    R_op × (C_base + C_op) = F_cpu
    C_op = F_cpu × (1/R_op − 1/R_base)
"""
from collections import defaultdict
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from opq_profiler.core.config import ToolkitDefaults, defaults as default_config
from opq_profiler.core.exceptions import (
    DuplicateSize,
    LineRateBoundError,
    MismatchedSizeSets,
    MixedSeries,
    NegativeCost,
    NonPositiveInput,
)
from opq_profiler.schemas.cost import CostSample, DerivationResult, ValidityWarning
from opq_profiler.schemas.measurement import MeasurementRecord
from opq_profiler.shared.constants.enums import ValidityFlag
from opq_profiler.shared.utils.validators import validate_records

logger = structlog.get_logger(__name__)

LineRateFn = Callable[[int], float]


def ethernet_line_rate_pps(
    packet_size: int,
    link_bps: float = default_config.LINK_SPEED_BPS,
    overhead_bytes: int = default_config.FRAME_OVERHEAD_BYTES,
) -> float:
    """以太网线速（pps），每帧额外计入前导码和帧间隔"""
    return link_bps / ((packet_size + overhead_bytes) * 8)


class CostDerivationService:
    """算子成本推导服务"""

    def __init__(self, config: Optional[ToolkitDefaults] = None):
        self.config = config or default_config

    @staticmethod
    def derive_base_cost(cpu_hz: float, r_base: float) -> float:
        """C_base = F_cpu / R_base"""
        if not cpu_hz > 0:
            raise NonPositiveInput("cpu_hz", cpu_hz)
        if not r_base > 0:
            raise NonPositiveInput("r_base", r_base)
        return float(cpu_hz) / float(r_base)

    @staticmethod
    def derive_operator_cost(cpu_hz: float, r_base: float, r_op: float) -> float:
        """C_op = F_cpu × (1/R_op − 1/R_base)，R_op > R_base 时报错而不是截断为0"""
        if not cpu_hz > 0:
            raise NonPositiveInput("cpu_hz", cpu_hz)
        if not r_base > 0:
            raise NonPositiveInput("r_base", r_base)
        if not r_op > 0:
            raise NonPositiveInput("r_op", r_op)
        r_base, r_op = float(r_base), float(r_op)
        if r_op > r_base:
            raise NegativeCost(r_base=r_base, r_op=r_op)
        # 与 1/r_op − 1/r_base 等价，相减发生在量级相近的吞吐上，舍入误差更小
        return float(cpu_hz) * (r_base - r_op) / (r_op * r_base)

    def check_saturation_validity(
        self,
        record: MeasurementRecord,
        line_rate_pps: float,
        margin: Optional[float] = None,
    ) -> ValidityFlag:
        """吞吐接近线速时测量受网卡限制，公式不再适用"""
        margin = self.config.LINE_RATE_MARGIN if margin is None else margin
        if record.throughput_pps >= (1.0 - margin) * line_rate_pps:
            return ValidityFlag.LINE_RATE_BOUND
        return ValidityFlag.VALID

    def aggregate_runs(
        self, records: Sequence[MeasurementRecord]
    ) -> Tuple[Dict[int, float], List[int]]:
        """按包长取重复测量的中位数吞吐

        Returns:
            (包长 -> 中位数pps, 重复间波动超过阈值的包长)
        """
        seen = set()
        by_size: Dict[int, List[float]] = defaultdict(list)
        for record in records:
            key = (record.packet_size, record.run_id)
            if key in seen:
                raise DuplicateSize(record.packet_size, record.run_id)
            seen.add(key)
            by_size[record.packet_size].append(float(record.throughput_pps))

        medians: Dict[int, float] = {}
        noisy: List[int] = []
        for size in sorted(by_size):
            values = by_size[size]
            medians[size] = float(np.median(values))
            if len(values) > 1 and max(values) / min(values) > self.config.NOISY_RATIO:
                noisy.append(size)
        return medians, noisy

    def derive_sweep(
        self,
        cpu_hz: float,
        baseline: Sequence[MeasurementRecord],
        sut: Sequence[MeasurementRecord],
        line_rate_fn: Optional[LineRateFn] = None,
        margin: Optional[float] = None,
        strict: bool = False,
    ) -> DerivationResult:
        """对一组包长推导算子成本

        Args:
            cpu_hz: CPU 频率
            baseline: 基线（L2转发）测量记录
            sut: 插入单个算子后的测量记录
            line_rate_fn: 包长 -> 线速pps；为 None 时不做线速检查
            margin: 线速判定余量
            strict: 出现线速受限的包长时直接报错

        Raises:
            MismatchedSizeSets: 两组记录的包长集合不同
            DuplicateSize: 同一包长同一 run_id 出现多次
            NegativeCost: 某个包长下 SUT 快于基线
            LineRateBoundError: strict 模式下存在线速受限的包长
        """
        if not cpu_hz > 0:
            raise NonPositiveInput("cpu_hz", cpu_hz)
        baseline = validate_records(baseline)
        sut = validate_records(sut)
        operator, platform = self._series_identity(baseline, sut)

        base_pps, base_noisy = self.aggregate_runs(baseline)
        sut_pps, sut_noisy = self.aggregate_runs(sut)
        if set(base_pps) != set(sut_pps):
            raise MismatchedSizeSets(base_pps.keys(), sut_pps.keys())

        warnings: List[ValidityWarning] = []
        for size in sorted(set(base_noisy) | set(sut_noisy)):
            warnings.append(ValidityWarning(
                operator=operator,
                packet_size=size,
                flag=ValidityFlag.NOISY,
                detail=f"max/min pps across repetitions > {self.config.NOISY_RATIO}",
            ))

        excluded: List[int] = []
        if line_rate_fn is not None:
            for size in sorted(base_pps):
                cap = line_rate_fn(size)
                bound_sides = [
                    side
                    for side, pps in (("baseline", base_pps[size]), ("sut", sut_pps[size]))
                    if self.check_saturation_validity(
                        MeasurementRecord(platform=platform, operator=operator,
                                          packet_size=size, throughput_pps=pps),
                        cap,
                        margin,
                    ) == ValidityFlag.LINE_RATE_BOUND
                ]
                if bound_sides:
                    excluded.append(size)
                    warnings.append(ValidityWarning(
                        operator=operator,
                        packet_size=size,
                        flag=ValidityFlag.LINE_RATE_BOUND,
                        detail=f"{'+'.join(bound_sides)} within margin of line rate {cap:.6g} pps",
                    ))
            if excluded and strict:
                raise LineRateBoundError(excluded)

        samples: List[CostSample] = []
        base_costs: Dict[int, float] = {}
        for size in sorted(base_pps):
            base_costs[size] = self.derive_base_cost(cpu_hz, base_pps[size])
            if size in excluded:
                continue
            try:
                cost = self.derive_operator_cost(cpu_hz, base_pps[size], sut_pps[size])
            except NegativeCost:
                raise NegativeCost(
                    r_base=base_pps[size], r_op=sut_pps[size], packet_size=size, operator=operator
                ) from None
            samples.append(CostSample(operator=operator, packet_size=size, cost_cycles=cost))

        logger.info(
            "sweep_derived",
            operator=operator,
            platform=platform,
            sizes=[s.packet_size for s in samples],
            excluded_sizes=excluded,
            warnings=len(warnings),
        )
        return DerivationResult(
            operator=operator,
            platform=platform,
            cpu_hz=float(cpu_hz),
            samples=samples,
            base_costs=base_costs,
            warnings=warnings,
            excluded_sizes=excluded,
        )

    @staticmethod
    def _series_identity(
        baseline: Sequence[MeasurementRecord], sut: Sequence[MeasurementRecord]
    ) -> Tuple[str, str]:
        """两组记录必须来自同一平台，SUT 只含一个算子"""
        platforms = {r.platform for r in baseline} | {r.platform for r in sut}
        if len(platforms) > 1:
            raise MixedSeries("platform", platforms)
        operators = {r.operator for r in sut}
        if len(operators) > 1:
            raise MixedSeries("operator", operators)
        operator = next(iter(operators), "")
        platform = next(iter(platforms), "")
        return operator, platform
