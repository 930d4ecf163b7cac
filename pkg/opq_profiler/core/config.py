"""
Toolkit Configuration
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class EnvSettings(BaseSettings):
    """环境变量配置（仅支持 OPQ_NO_COLOR）"""

    model_config = SettingsConfigDict(
        env_prefix="OPQ_",
        case_sensitive=True,
        extra="ignore",
    )

    NO_COLOR: bool = False


class ToolkitDefaults(BaseModel):
    """各服务使用的默认参数，可被配置文件和命令行覆盖"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # 测量协议
    PACKET_SIZES: List[int] = Field(default_factory=lambda: [64, 128, 256])
    LINE_RATE_MARGIN: float = 0.02
    LINK_SPEED_BPS: float = 1e11  # 100GbE
    FRAME_OVERHEAD_BYTES: int = 20  # preamble + IFG
    NOISY_RATIO: float = 1.10

    # 基准测试
    WARMUP_DURATION: float = 0.2
    MEASURE_DURATION: float = 1.0
    REPETITIONS: int = 3
    POOL_SIZE: int = 1024
    HASH_TABLE_SLOTS: int = 65536
    HASH_LOAD_FACTOR: float = 0.6
    RING_LOG_CAPACITY: int = 4096
    CALIBRATION_TRIALS: int = 5
    CLOCK_RESOLUTION_LIMIT: float = 1e-6  # 秒

    # 输出
    SCHEMA_VERSION: str = "1"
    SEED: int = 0

    @field_validator("LINE_RATE_MARGIN")
    @classmethod
    def check_margin(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("LINE_RATE_MARGIN must be in (0, 1)")
        return v

    @field_validator("PACKET_SIZES")
    @classmethod
    def check_sizes(cls, v: List[int]) -> List[int]:
        if not v or any(s < 1 for s in v):
            raise ValueError("PACKET_SIZES must be non-empty positive integers")
        return v


def load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    """读取 JSON 配置文件；未指定路径时返回空配置，文件不存在时抛出 FileNotFoundError"""
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def build_defaults(overrides: Optional[Dict[str, Any]] = None) -> ToolkitDefaults:
    """合并配置文件中的 defaults 段"""
    return ToolkitDefaults(**(overrides or {}))


defaults = ToolkitDefaults()
