"""
Bench harness service

在本机上用进程内循环复现测量协议：
取包 → 基线处理（读首个 cache line、计数器加一）→ 算子体 → 丢弃。
按固定时长窗口统计 pps，然后交给成本推导与幂律拟合。
"""
import platform as platform_module
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import psutil
import structlog
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from opq_profiler.core.config import ToolkitDefaults, defaults as default_config
from opq_profiler.core.exceptions import (
    CalibrationUnavailable,
    ClockResolutionTooCoarse,
    FlowTablePoolTooLarge,
    NegativeCost,
    UnknownOperator,
)
from opq_profiler.schemas.bench import BenchConfig
from opq_profiler.schemas.cost import CostCurve, CostSample, ValidityWarning
from opq_profiler.schemas.measurement import MeasurementRecord, PlatformSpec
from opq_profiler.schemas.profile import ProfileDocument
from opq_profiler.services import scaling_fit_service
from opq_profiler.services.bench.operators import OPERATOR_DESCRIPTIONS, OperatorBody, make_operator
from opq_profiler.services.bench.packets import build_pool
from opq_profiler.services.cost_derivation_service import CostDerivationService
from opq_profiler.services.opq_service import OpqService
from opq_profiler.shared.constants.enums import BASELINE_OPERATOR, OperatorId, Provenance
from opq_profiler.shared.utils.validators import validate_user_operator

logger = structlog.get_logger(__name__)

CACHE_LINE = 64
BATCH = 256  # 每批包数，批间读一次时钟
SPIN_ITERATIONS = 2_000_000
GOVERNOR_PATH = Path("/sys/devices/system/cpu/cpu0/cpufreq/scaling_governor")


class BenchHarnessService:
    """进程内微基准"""

    def __init__(self, config: Optional[ToolkitDefaults] = None):
        self.config = config or default_config
        self.derivation = CostDerivationService(self.config)
        self.opq = OpqService()
        self.sink = 0

    # ------------------------------------------------------------------
    # 环境
    # ------------------------------------------------------------------

    def calibrate_cpu_hz(self, bench: BenchConfig) -> float:
        """获取 F_cpu

        有 cpu_hz_override 时直接返回；否则在自旋负载下读取内核报告的当前频率，
        取多次读数的中位数。解释器的调度开销远大于一条算术指令，循环计时本身
        无法换算出时钟频率，需要读系统频率。
        """
        if bench.cpu_hz_override is not None:
            return float(bench.cpu_hz_override)

        resolution = time.get_clock_info("perf_counter").resolution
        if resolution > self.config.CLOCK_RESOLUTION_LIMIT:
            raise ClockResolutionTooCoarse(resolution, self.config.CLOCK_RESOLUTION_LIMIT)

        readings = []
        for _ in range(self.config.CALIBRATION_TRIALS):
            self._spin(SPIN_ITERATIONS)
            try:
                freq = psutil.cpu_freq()
            except (NotImplementedError, OSError, AttributeError) as e:
                raise CalibrationUnavailable(str(e)) from e
            if freq is None or not freq.current > 0:
                raise CalibrationUnavailable("psutil reported no CPU frequency")
            readings.append(freq.current * 1e6)
        cpu_hz = float(np.median(readings))
        logger.info("cpu_calibrated", cpu_hz=cpu_hz, readings=readings)
        return cpu_hz

    @staticmethod
    def _spin(iterations: int) -> int:
        acc = 1
        for i in range(iterations):
            acc = (acc * 3 + i) & 0xFFFF
        return acc

    @staticmethod
    def preflight() -> List[str]:
        """检查环境控制（绑核、关闭调频），只告警不强制"""
        issues = []
        try:
            affinity = psutil.Process().cpu_affinity()
            if len(affinity) > 1:
                issues.append(f"process may run on {len(affinity)} CPUs; pin it to one core (taskset -c N)")
        except (AttributeError, NotImplementedError, psutil.Error):
            pass
        try:
            governor = GOVERNOR_PATH.read_text().strip()
            if governor != "performance":
                issues.append(f"CPU frequency governor is '{governor}', not 'performance'")
        except OSError:
            pass
        for issue in issues:
            logger.warning("bench_preflight", issue=issue)
        return issues

    # ------------------------------------------------------------------
    # 测量
    # ------------------------------------------------------------------

    def _measure(self, body: OperatorBody, pool: List[bytearray], duration: float) -> float:
        """在 duration 秒内跑满循环，返回 pps"""
        n = len(pool)
        touch = min(CACHE_LINE, len(pool[0])) - 1
        idx = 0
        packets = 0
        sink = self.sink
        duration_ns = int(duration * 1e9)
        clock = time.perf_counter_ns
        start = clock()
        while True:
            for _ in range(BATCH):
                packet = pool[idx]
                idx += 1
                if idx == n:
                    idx = 0
                sink += packet[0] ^ packet[touch]
                sink ^= body(packet)
            packets += BATCH
            elapsed = clock() - start
            if elapsed >= duration_ns:
                break
        self.sink = sink & 0xFFFFFFFFFFFFFFFF
        return packets / (elapsed / 1e9)

    def run_pipeline(
        self,
        bench: BenchConfig,
        operator_id: str,
        platform: Optional[str] = None,
    ) -> List[MeasurementRecord]:
        """对一个算子在全部包长上测量，每个 (包长, 重复) 一条记录

        Raises:
            UnknownOperator: 不支持的算子
        """
        if operator_id not in {op.value for op in OperatorId}:
            raise UnknownOperator(operator_id)
        platform = platform or host_platform_name()

        records = []
        for size in bench.packet_sizes:
            rng = np.random.Generator(np.random.PCG64([bench.seed, size]))
            pool = build_pool(size, bench.pool_size, rng)
            body = make_operator(
                operator_id,
                pool,
                rng,
                hash_slots=self.config.HASH_TABLE_SLOTS,
                hash_load_factor=self.config.HASH_LOAD_FACTOR,
                ring_capacity=self.config.RING_LOG_CAPACITY,
            )
            for run_id in range(bench.repetitions):
                self._measure(body, pool, bench.warmup_duration)
                pps = self._measure(body, pool, bench.measure_duration)
                records.append(MeasurementRecord(
                    platform=platform,
                    operator=operator_id,
                    packet_size=size,
                    throughput_pps=pps,
                    run_id=run_id,
                ))
                logger.debug("bench_window", operator=operator_id, size=size, run_id=run_id, pps=pps)
        return records

    def bench_to_profile(
        self,
        bench: BenchConfig,
        operators: Sequence[str],
        platform: Optional[str] = None,
        threshold: Optional[float] = None,
        strict: bool = False,
    ) -> Tuple[ProfileDocument, List[MeasurementRecord]]:
        """基线 + 各算子 → 推导 → 拟合 → OPQ 分类

        出现 NegativeCost 时重测该算子一次；仍失败时 strict 模式抛出，否则跳过该算子。
        """
        platform = platform or host_platform_name()
        for op in operators:
            validate_user_operator(op)
            if op not in {o.value for o in OperatorId}:
                raise UnknownOperator(op)
        hash_capacity = int(self.config.HASH_TABLE_SLOTS * self.config.HASH_LOAD_FACTOR)
        if OperatorId.HASH.value in operators and bench.pool_size > hash_capacity:
            raise FlowTablePoolTooLarge(bench.pool_size, self.config.HASH_TABLE_SLOTS, self.config.HASH_LOAD_FACTOR)
        self.preflight()
        cpu_hz = self.calibrate_cpu_hz(bench)

        baseline = self.run_pipeline(bench, BASELINE_OPERATOR, platform)
        measurements = list(baseline)
        curves: List[CostCurve] = []
        samples: List[CostSample] = []
        warnings: List[ValidityWarning] = []
        skipped: List[str] = []

        for op in operators:
            retrying = Retrying(
                retry=retry_if_exception_type(NegativeCost),
                stop=stop_after_attempt(2),
                reraise=True,
                before_sleep=lambda state, op=op: logger.warning(
                    "operator_retry", operator=op, error=str(state.outcome.exception())
                ),
            )
            try:
                for attempt in retrying:
                    with attempt:
                        sut = self.run_pipeline(bench, op, platform)
                        result = self.derivation.derive_sweep(cpu_hz, baseline, sut)
            except NegativeCost as e:
                if strict:
                    raise
                logger.warning("operator_skipped", operator=op, code=e.code, details=e.details)
                skipped.append(op)
                continue
            measurements.extend(sut)
            samples.extend(result.samples)
            warnings.extend(result.warnings)
            curves.append(scaling_fit_service.fit_power_law(result.samples))

        points = self.opq.classify_profile(curves, platform, threshold=threshold, samples=samples)
        logger.info(
            "bench_summary",
            platform=platform,
            cpu_hz=cpu_hz,
            operators=list(operators),
            sink=self.sink,
        )
        document = ProfileDocument(
            schema_version=self.config.SCHEMA_VERSION,
            platform=PlatformSpec(name=platform, cpu_hz=cpu_hz, description=platform_module.processor() or ""),
            curves=curves,
            samples=samples,
            opq_points=points,
            provenance=Provenance.BENCH,
            warnings=warnings,
            metadata={
                "operators": {op: OPERATOR_DESCRIPTIONS[op] for op in operators},
                "baseline": OPERATOR_DESCRIPTIONS[BASELINE_OPERATOR],
                "repetitions": bench.repetitions,
                "measure_duration": bench.measure_duration,
                "sink": self.sink,
                "skipped_operators": skipped,
            },
        )
        return document, measurements


def host_platform_name() -> str:
    return platform_module.machine() or "host"
