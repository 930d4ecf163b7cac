"""
内置参考数据集：Arm 与 x86 两个平台上六个算子的已发布 profile

基础成本为 64 字节包下的 cycles；R² 按发布值保留，拟合空间未知。
"""
from typing import Dict, List, Tuple

REFERENCE_MIN_SIZE = 64
REFERENCE_SIZES = [64, 128, 256]

REFERENCE_PLATFORMS: Dict[str, Tuple[float, str]] = {
    "arm": (1.8e9, "Marvell CN96XX"),
    "x86": (2.2e9, "Intel Xeon Silver 4210"),
}

# (operator, platform, base_cost, exponent_k, r_squared)
REFERENCE_ROWS: List[Tuple[str, str, float, float, float]] = [
    ("crc", "arm", 823.0, 1.3700, 0.9976),
    ("crc", "x86", 747.0, 1.2699, 0.9997),
    ("checksum", "arm", 65.0, 0.1632, 0.9981),
    ("checksum", "x86", 27.0, 0.1551, 0.9995),
    ("hash", "arm", 34.0, 0.2606, 0.9762),
    ("hash", "x86", 9.0, 0.1547, 0.9988),
    ("htons", "arm", 49.0, 0.2067, 0.9993),
    ("htons", "x86", 1.5, 0.0644, 0.9634),
    ("printf", "arm", 12006.0, 0.1130, 0.9358),
    ("printf", "x86", 29129.0, 0.2222, 0.9561),
    ("rte_log", "arm", 108.0, 0.2429, 0.9327),
    ("rte_log", "x86", 49.0, 0.1509, 0.9653),
]

# 生成参考测量数据时使用的基线成本（cycles，与包长无关）
REFERENCE_BASELINE_COST = 400.0
