"""
Validation utilities
"""
from typing import Iterable, List

from opq_profiler.core.exceptions import (
    EmptyOperatorName,
    NonPositiveThroughput,
    ReservedOperatorName,
    ZeroPacketSize,
)
from opq_profiler.schemas.measurement import MeasurementRecord
from opq_profiler.shared.constants.enums import BASELINE_OPERATOR


def validate_record(record: MeasurementRecord) -> MeasurementRecord:
    """校验测量记录的领域不变量，通过则原样返回"""
    if not record.operator or not record.operator.strip():
        raise EmptyOperatorName()
    if record.packet_size < 1:
        raise ZeroPacketSize(record.packet_size)
    if not record.throughput_pps > 0:
        raise NonPositiveThroughput(record.throughput_pps)
    return record


def validate_user_operator(operator: str) -> str:
    """用户算子不能占用基线名称"""
    if operator == BASELINE_OPERATOR:
        raise ReservedOperatorName(operator)
    return operator


def validate_records(records: Iterable[MeasurementRecord]) -> List[MeasurementRecord]:
    return [validate_record(r) for r in records]
