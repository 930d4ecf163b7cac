"""
Custom exceptions
"""
from typing import Any, Dict, Iterable, Optional


class ProfilerException(Exception):
    """工具包基础异常"""

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        exit_code: int = 2,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.code = code or "INTERNAL_ERROR"
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class DataValidationError(ProfilerException):
    """输入数据校验异常"""

    def __init__(self, message: str = "Validation failed", code: str = "VALIDATION_ERROR",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, code=code, exit_code=2, details=details)


class MeasurementValidityError(ProfilerException):
    """测量有效性异常（违反CPU唯一瓶颈假设等）"""

    def __init__(self, message: str = "Measurement is not valid", code: str = "MEASUREMENT_INVALID",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, code=code, exit_code=3, details=details)


# ---------------------------------------------------------------------------
# core-model
# ---------------------------------------------------------------------------

class NonPositiveThroughput(DataValidationError):
    def __init__(self, throughput_pps: float):
        super().__init__(
            message=f"throughput_pps must be > 0, got {throughput_pps}",
            code="NON_POSITIVE_THROUGHPUT",
            details={"throughput_pps": throughput_pps},
        )


class EmptyOperatorName(DataValidationError):
    def __init__(self):
        super().__init__(message="operator name must be non-empty", code="EMPTY_OPERATOR_NAME")


class ZeroPacketSize(DataValidationError):
    def __init__(self, packet_size: int):
        super().__init__(
            message=f"packet_size must be >= 1, got {packet_size}",
            code="ZERO_PACKET_SIZE",
            details={"packet_size": packet_size},
        )


class ReservedOperatorName(DataValidationError):
    def __init__(self, operator: str):
        super().__init__(
            message=f"operator name '{operator}' is reserved for the base system",
            code="RESERVED_OPERATOR_NAME",
            details={"operator": operator},
        )


class NonPositiveInput(DataValidationError):
    def __init__(self, name: str, value: float):
        super().__init__(
            message=f"{name} must be > 0, got {value}",
            code="NON_POSITIVE_INPUT",
            details={"name": name, "value": value},
        )


# ---------------------------------------------------------------------------
# cost-derivation
# ---------------------------------------------------------------------------

class NegativeCost(MeasurementValidityError):
    """SUT吞吐高于基线，测量不一致"""

    def __init__(self, r_base: float, r_op: float, packet_size: Optional[int] = None,
                 operator: Optional[str] = None):
        where = f" at {packet_size}B" if packet_size is not None else ""
        super().__init__(
            message=f"SUT throughput {r_op} exceeds baseline {r_base}{where}",
            code="NEGATIVE_COST",
            details={"r_base": r_base, "r_op": r_op, "packet_size": packet_size, "operator": operator},
        )


class LineRateBoundError(MeasurementValidityError):
    def __init__(self, packet_sizes: Iterable[int]):
        sizes = sorted(packet_sizes)
        super().__init__(
            message=f"measurements are line-rate bound at sizes {sizes}",
            code="LINE_RATE_BOUND",
            details={"packet_sizes": sizes},
        )


class MismatchedSizeSets(DataValidationError):
    def __init__(self, baseline_sizes: Iterable[int], sut_sizes: Iterable[int]):
        super().__init__(
            message="baseline and SUT packet-size sets differ",
            code="MISMATCHED_SIZE_SETS",
            details={"baseline": sorted(baseline_sizes), "sut": sorted(sut_sizes)},
        )


class DuplicateSize(DataValidationError):
    def __init__(self, packet_size: int, run_id: Optional[int]):
        super().__init__(
            message=f"duplicate record for {packet_size}B (run_id={run_id})",
            code="DUPLICATE_SIZE",
            details={"packet_size": packet_size, "run_id": run_id},
        )


class MixedSeries(DataValidationError):
    def __init__(self, field: str, values: Iterable[str]):
        super().__init__(
            message=f"records mix more than one {field}: {sorted(set(values))}",
            code="MIXED_SERIES",
            details={"field": field, "values": sorted(set(values))},
        )


# ---------------------------------------------------------------------------
# scaling-fit
# ---------------------------------------------------------------------------

class InsufficientPoints(DataValidationError):
    def __init__(self, n_points: int):
        super().__init__(
            message=f"power-law fit needs >= 2 distinct sizes, got {n_points}",
            code="INSUFFICIENT_POINTS",
            details={"n_points": n_points},
        )


class NonPositiveCost(DataValidationError):
    def __init__(self, packet_size: int, cost_cycles: float):
        super().__init__(
            message=f"cost at {packet_size}B is {cost_cycles}; log-space fit needs cost > 0",
            code="NON_POSITIVE_COST",
            details={"packet_size": packet_size, "cost_cycles": cost_cycles},
        )


class NonPositiveSize(DataValidationError):
    def __init__(self, packet_size: float):
        super().__init__(
            message=f"packet size must be > 0, got {packet_size}",
            code="NON_POSITIVE_SIZE",
            details={"packet_size": packet_size},
        )


class NonFiniteExponent(DataValidationError):
    def __init__(self, exponent_k: float):
        super().__init__(
            message=f"exponent must be finite, got {exponent_k}",
            code="NON_FINITE_EXPONENT",
            details={"exponent_k": exponent_k},
        )


# ---------------------------------------------------------------------------
# opq-classify
# ---------------------------------------------------------------------------

class MissingSmallestSize(DataValidationError):
    def __init__(self, smallest_size: int):
        super().__init__(
            message=f"no sample or curve available for {smallest_size}B",
            code="MISSING_SMALLEST_SIZE",
            details={"smallest_size": smallest_size},
        )


class EmptyDataset(DataValidationError):
    def __init__(self):
        super().__init__(message="median threshold needs at least one point", code="EMPTY_DATASET")


class NoCommonOperators(DataValidationError):
    def __init__(self, from_ops: Iterable[str], to_ops: Iterable[str]):
        super().__init__(
            message="the two platforms share no operator",
            code="NO_COMMON_OPERATORS",
            details={"from": sorted(from_ops), "to": sorted(to_ops)},
        )


class NonPositiveFrequency(DataValidationError):
    def __init__(self, cpu_hz: float):
        super().__init__(
            message=f"cpu_hz must be > 0, got {cpu_hz}",
            code="NON_POSITIVE_FREQUENCY",
            details={"cpu_hz": cpu_hz},
        )


class DivisionByZero(DataValidationError):
    def __init__(self):
        super().__init__(message="fold change denominator must be > 0", code="DIVISION_BY_ZERO")


# ---------------------------------------------------------------------------
# bench-harness
# ---------------------------------------------------------------------------

class UnknownOperator(DataValidationError):
    def __init__(self, operator_id: str):
        super().__init__(
            message=f"unknown operator '{operator_id}'",
            code="UNKNOWN_OPERATOR",
            details={"operator": operator_id},
        )


class FlowTablePoolTooLarge(DataValidationError):
    def __init__(self, pool_size: int, slots: int, load_factor: float):
        super().__init__(
            message=f"pool_size {pool_size} exceeds the flow table target of {int(slots * load_factor)} entries",
            code="FLOW_TABLE_POOL_TOO_LARGE",
            details={"pool_size": pool_size, "slots": slots, "load_factor": load_factor},
        )


class ClockResolutionTooCoarse(MeasurementValidityError):
    def __init__(self, resolution: float, limit: float):
        super().__init__(
            message=f"monotonic clock resolution {resolution}s exceeds {limit}s",
            code="CLOCK_RESOLUTION_TOO_COARSE",
            details={"resolution": resolution, "limit": limit},
        )


class CalibrationUnavailable(MeasurementValidityError):
    def __init__(self, reason: str):
        super().__init__(
            message=f"cannot determine CPU frequency ({reason}); pass --cpu-hz",
            code="CALIBRATION_UNAVAILABLE",
            details={"reason": reason},
        )


# ---------------------------------------------------------------------------
# io-report
# ---------------------------------------------------------------------------

class MissingHeader(DataValidationError):
    def __init__(self, expected: str, found: Optional[str]):
        super().__init__(
            message=f"CSV header must be '{expected}'",
            code="MISSING_HEADER",
            details={"expected": expected, "found": found},
        )


class BadRow(DataValidationError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(
            message=f"line {line}: {reason}",
            code="BAD_ROW",
            details={"line": line, "reason": reason},
        )


class EmptyFile(DataValidationError):
    def __init__(self, path: str):
        super().__init__(message=f"{path} is empty", code="EMPTY_FILE", details={"path": path})


class UnclassifiedPoints(DataValidationError):
    def __init__(self, platform: str):
        super().__init__(
            message=f"profile '{platform}' has no OPQ points; run classify first",
            code="UNCLASSIFIED_POINTS",
            details={"platform": platform},
        )
