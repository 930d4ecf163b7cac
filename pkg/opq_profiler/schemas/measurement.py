"""
Measurement schemas
"""
from typing import Optional, Union

from pydantic import Field

from .base import ValueObject


class PlatformSpec(ValueObject):
    """被测平台"""
    name: str = Field(min_length=1)
    cpu_hz: float = Field(gt=0)  # F_cpu, cycles/second
    description: str = ""


class MeasurementRecord(ValueObject):
    """一次饱和吞吐观测

    构造时只做类型检查，领域不变量由 validate_record 校验。
    """
    platform: str
    operator: str
    packet_size: int
    # 整数输入保持整数，仅在运算时转为 float
    throughput_pps: Union[int, float]
    run_id: Optional[int] = None
