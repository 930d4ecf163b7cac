"""
Pytest configuration and fixtures
"""
import logging
from typing import Callable, Dict, List

import pytest
import structlog

from opq_profiler.core.config import ToolkitDefaults
from opq_profiler.schemas.cost import CostSample, PowerLaw
from opq_profiler.schemas.measurement import MeasurementRecord
from opq_profiler.schemas.profile import ProfileDocument
from opq_profiler.schemas.simulation import SimConfig
from opq_profiler.services.cost_derivation_service import CostDerivationService, ethernet_line_rate_pps
from opq_profiler.services.opq_service import OpqService
from opq_profiler.services.report_service import ReportService
from opq_profiler.services.saturation_sim_service import SaturationSimService

SIZES = [64, 128, 256]
ARM_HZ = 1.8e9
X86_HZ = 2.2e9

# 100GbE 上限只在 64 字节处生效的基线成本曲线：10.24 / 28.96 / 81.92 cycles
CAP_AT_64_BASE = PowerLaw(coefficient=0.02, exponent=1.5)


@pytest.fixture(autouse=True)
def reset_logging():
    """CLI 测试会重新配置日志，每个用例结束后恢复"""
    yield
    logging.getLogger().handlers.clear()
    structlog.reset_defaults()


@pytest.fixture
def config() -> ToolkitDefaults:
    return ToolkitDefaults()


@pytest.fixture
def derivation(config) -> CostDerivationService:
    return CostDerivationService(config)


@pytest.fixture
def simulator(config) -> SaturationSimService:
    return SaturationSimService(config)


@pytest.fixture
def opq() -> OpqService:
    return OpqService()


@pytest.fixture
def report(config) -> ReportService:
    return ReportService(config)


@pytest.fixture
def reference_profiles(report) -> Dict[str, ProfileDocument]:
    """内置参考数据，按各平台中位数分类"""
    return report.load_reference_profiles()


@pytest.fixture
def make_sim() -> Callable[..., SimConfig]:
    """构造仿真配置；base_cost 为常数时按包长不变"""
    def _make(cpu_hz: float = ARM_HZ, base_cost=400.0, line_rate=None, noise_sigma=0.0, seed=0) -> SimConfig:
        base_fn = base_cost if callable(base_cost) else PowerLaw(coefficient=base_cost)
        if line_rate == "100gbe":
            line_rate = ethernet_line_rate_pps
        elif isinstance(line_rate, (int, float)):
            cap = float(line_rate)
            line_rate = lambda size: cap  # noqa: E731
        return SimConfig(
            cpu_hz=cpu_hz,
            base_cost_fn=base_fn,
            line_rate_pps_fn=line_rate,
            noise_sigma=noise_sigma,
            seed=seed,
        )

    return _make


@pytest.fixture
def make_record() -> Callable[..., MeasurementRecord]:
    def _make(size: int, pps: float, operator: str = "crc", platform: str = "arm", run_id=None) -> MeasurementRecord:
        return MeasurementRecord(
            platform=platform, operator=operator, packet_size=size, throughput_pps=pps, run_id=run_id
        )

    return _make


def power_law_samples(a: float, k: float, sizes: List[int] = SIZES, operator: str = "op") -> List[CostSample]:
    return [CostSample(operator=operator, packet_size=s, cost_cycles=a * s ** k) for s in sizes]
