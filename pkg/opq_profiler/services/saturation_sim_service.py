"""
Saturation simulation service

正向求解 R × (C_base + C_op) = F_cpu，作为推导协议的验证基准。
噪声为吞吐上的乘性对数正态噪声，随机数使用 numpy PCG64，相同 seed 在任何平台上产生相同序列。
"""
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from opq_profiler.core.config import ToolkitDefaults, defaults as default_config
from opq_profiler.core.exceptions import DataValidationError, NonPositiveInput
from opq_profiler.schemas.cost import CostSample, PowerLaw
from opq_profiler.schemas.measurement import MeasurementRecord
from opq_profiler.schemas.simulation import RoundtripReport, SimConfig, SimulatedPoint, SimulationFile
from opq_profiler.services import scaling_fit_service
from opq_profiler.services.cost_derivation_service import (
    CostDerivationService,
    ethernet_line_rate_pps,
)
from opq_profiler.shared.constants.enums import BASELINE_OPERATOR, BoundFlag

logger = structlog.get_logger(__name__)

OpCostFn = Callable[[int], float]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class SaturationSimService:
    """CPU饱和数据面仿真"""

    def __init__(self, config: Optional[ToolkitDefaults] = None):
        self.config = config or default_config
        self.derivation = CostDerivationService(self.config)

    def simulate_throughput(
        self,
        sim: SimConfig,
        packet_size: int,
        op_cost: float,
        rng: Optional[np.random.Generator] = None,
    ) -> SimulatedPoint:
        """单个包长下的饱和吞吐

        Args:
            sim: 仿真配置
            packet_size: 包长
            op_cost: 注入的算子成本（cycles）
            rng: 噪声随机源；为 None 时由 sim.seed 新建
        """
        if op_cost < 0:
            raise DataValidationError(
                f"op_cost must be >= 0, got {op_cost}", code="NEGATIVE_OP_COST", details={"op_cost": op_cost}
            )
        base_cost = sim.base_cost_fn(packet_size)
        if not base_cost > 0:
            raise NonPositiveInput("base_cost", base_cost)

        pps = sim.cpu_hz / (base_cost + op_cost)
        if sim.noise_sigma > 0:
            rng = rng if rng is not None else make_rng(sim.seed)
            pps *= math.exp(rng.normal(0.0, sim.noise_sigma))

        if sim.line_rate_pps_fn is not None:
            cap = sim.line_rate_pps_fn(packet_size)
            if pps >= cap:
                return SimulatedPoint(pps=cap, bound=BoundFlag.LINE_RATE_BOUND)
        return SimulatedPoint(pps=pps, bound=BoundFlag.CPU_BOUND)

    def run_protocol(
        self,
        sim: SimConfig,
        op_cost_fn: OpCostFn,
        sizes: Sequence[int],
        runs: int = 1,
        operator: str = "sim_op",
        platform: str = "sim",
    ) -> Tuple[List[MeasurementRecord], List[MeasurementRecord]]:
        """按基线/SUT两步协议生成测量记录

        随机数按 (包长, 重复次序, 基线→SUT) 的顺序抽取，固定 seed 下输出可复现。
        """
        if not sizes:
            raise DataValidationError("sizes must be non-empty", code="EMPTY_SIZES")
        if runs < 1:
            raise NonPositiveInput("runs", runs)

        rng = make_rng(sim.seed)
        baseline: List[MeasurementRecord] = []
        sut: List[MeasurementRecord] = []
        for size in sizes:
            op_cost = op_cost_fn(size)
            for run_id in range(runs):
                base_point = self.simulate_throughput(sim, size, 0.0, rng)
                op_point = self.simulate_throughput(sim, size, op_cost, rng)
                baseline.append(MeasurementRecord(
                    platform=platform,
                    operator=BASELINE_OPERATOR,
                    packet_size=size,
                    throughput_pps=base_point.pps,
                    run_id=run_id,
                ))
                sut.append(MeasurementRecord(
                    platform=platform,
                    operator=operator,
                    packet_size=size,
                    throughput_pps=op_point.pps,
                    run_id=run_id,
                ))
        logger.debug("protocol_simulated", operator=operator, sizes=list(sizes), runs=runs)
        return baseline, sut

    def end_to_end_roundtrip(
        self,
        sim: SimConfig,
        op_cost_fn: OpCostFn,
        sizes: Sequence[int],
        runs: int = 1,
    ) -> RoundtripReport:
        """仿真 → 推导 → 拟合，对比注入曲线与恢复结果"""
        baseline, sut = self.run_protocol(sim, op_cost_fn, sizes, runs)
        derivation = self.derivation.derive_sweep(
            sim.cpu_hz, baseline, sut, line_rate_fn=sim.line_rate_pps_fn
        )
        injected = [
            CostSample(operator="sim_op", packet_size=s, cost_cycles=op_cost_fn(s))
            for s in sizes
            if s not in derivation.excluded_sizes
        ]
        injected_by_size = {s.packet_size: s.cost_cycles for s in injected}
        max_error = max(
            (
                abs(r.cost_cycles - injected_by_size[r.packet_size]) / max(injected_by_size[r.packet_size], 1.0)
                for r in derivation.samples
            ),
            default=None,
        )

        report = dict(
            injected=injected,
            recovered=derivation.samples,
            max_relative_error=max_error,
            excluded_sizes=derivation.excluded_sizes,
        )
        try:
            curve = scaling_fit_service.fit_power_law(derivation.samples)
        except DataValidationError as e:
            # 零成本算子等情况：协议本身正确，只是无法在对数空间拟合
            logger.info("roundtrip_fit_degenerate", code=e.code, reason=e.message)
            return RoundtripReport(**report, degenerate=True, degenerate_reason=e.code)

        deltas = {}
        if isinstance(op_cost_fn, PowerLaw):
            deltas = dict(
                delta_a=curve.coefficient_a - op_cost_fn.coefficient,
                delta_k=curve.exponent_k - op_cost_fn.exponent,
            )
        return RoundtripReport(**report, curve=curve, **deltas)

    @staticmethod
    def config_from_file(sim_file: SimulationFile, config: Optional[ToolkitDefaults] = None) -> SimConfig:
        """JSON 配置 -> SimConfig"""
        config = config or default_config
        if sim_file.line_rate == "100gbe":
            def line_rate_fn(size: int) -> float:
                return ethernet_line_rate_pps(size, config.LINK_SPEED_BPS, config.FRAME_OVERHEAD_BYTES)
        elif sim_file.line_rate is not None:
            cap = float(sim_file.line_rate)

            def line_rate_fn(size: int) -> float:
                return cap
        else:
            line_rate_fn = None
        return SimConfig(
            cpu_hz=sim_file.cpu_hz,
            base_cost_fn=sim_file.base_cost,
            line_rate_pps_fn=line_rate_fn,
            noise_sigma=sim_file.noise_sigma,
            seed=sim_file.seed,
        )
