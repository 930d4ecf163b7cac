"""
Bench schemas
"""
from typing import List, Optional

from pydantic import Field, field_validator

from .base import ValueObject

# 最小 L2 帧头 + 负载
MIN_BENCH_PACKET_SIZE = 18


class BenchConfig(ValueObject):
    """进程内微基准配置"""
    packet_sizes: List[int] = Field(default_factory=lambda: [64, 128, 256])
    warmup_duration: float = Field(default=0.2, gt=0)
    measure_duration: float = Field(default=1.0, gt=0)
    repetitions: int = Field(default=3, ge=1)
    cpu_hz_override: Optional[float] = Field(default=None, gt=0)
    pool_size: int = Field(default=1024, ge=1)
    seed: int = 0

    @field_validator("packet_sizes")
    @classmethod
    def check_sizes(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("packet_sizes must be non-empty")
        too_small = [s for s in v if s < MIN_BENCH_PACKET_SIZE]
        if too_small:
            raise ValueError(f"packet sizes below {MIN_BENCH_PACKET_SIZE} bytes: {too_small}")
        return v
