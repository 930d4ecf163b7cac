"""
Enumerations
"""
from enum import Enum


class QuadrantLabel(str, Enum):
    """OPQ象限"""
    LATENT_TRAP = "LatentTrap"  # 高基础成本 + 超线性
    HIGH_STARTUP_COST = "HighStartupCost"  # 高基础成本 + 亚线性
    IDEAL = "Ideal"  # 低基础成本 + 亚线性
    EMERGENT_BOTTLENECK = "EmergentBottleneck"  # 低基础成本 + 超线性

    @classmethod
    def classify(cls, base_cost: float, exponent_k: float, threshold: float) -> "QuadrantLabel":
        """基础成本 >= 阈值为高侧；k > 1 为超线性，k == 1 归入亚线性侧"""
        high_base = base_cost >= threshold
        super_linear = exponent_k > 1
        if high_base:
            return cls.LATENT_TRAP if super_linear else cls.HIGH_STARTUP_COST
        return cls.EMERGENT_BOTTLENECK if super_linear else cls.IDEAL


class ScalingClass(str, Enum):
    """成本随包长的增长趋势"""
    SUPER_LINEAR = "SuperLinear"
    LINEAR = "Linear"
    SUB_LINEAR = "SubLinear"


class ValidityFlag(str, Enum):
    """测量有效性标记"""
    VALID = "Valid"
    LINE_RATE_BOUND = "LineRateBound"
    NOISY = "Noisy"


class BoundFlag(str, Enum):
    """仿真吞吐的约束来源"""
    CPU_BOUND = "CpuBound"
    LINE_RATE_BOUND = "LineRateBound"


class Provenance(str, Enum):
    """Profile数据来源"""
    BENCH = "bench"
    SIMULATED = "simulated"
    INGESTED = "ingested"
    REFERENCE = "reference"


class BaseCostSource(str, Enum):
    """基础成本取值来源"""
    SAMPLE = "sample"
    CURVE = "curve"


class OperatorId(str, Enum):
    """基准测试内置算子"""
    BASELINE = "baseline"
    CRC = "crc"
    CHECKSUM = "checksum"
    HTONS = "htons"
    HASH = "hash"
    PRINTF = "printf"
    RINGLOG = "ringlog"


BASELINE_OPERATOR = OperatorId.BASELINE.value

# 报表中的算子排序，未列出的按名称排在后面
OPERATOR_REPORT_ORDER = ["crc", "checksum", "hash", "htons", "printf", "rte_log", "ringlog"]
