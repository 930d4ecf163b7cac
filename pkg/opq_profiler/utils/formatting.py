"""
数字格式化工具

成本保留4位有效数字（整数部分不截断），指数和 R² 保留4位小数。
"""
import math


def round_sig(value: float, digits: int = 4) -> float:
    """按有效数字四舍五入，整数部分不截断"""
    if value == 0 or not math.isfinite(value):
        return value
    magnitude = math.floor(math.log10(abs(value)))
    decimals = max(0, digits - 1 - magnitude)
    return round(value, decimals)


def format_cost(value: float) -> str:
    if abs(value) >= 1000:
        return f"{value:.0f}"
    return f"{value:.4g}"


def format_exponent(value: float) -> str:
    return f"{value:.4f}"
