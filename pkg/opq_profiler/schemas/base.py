"""
Base schemas
"""
from pydantic import BaseModel, ConfigDict


class ValueObject(BaseModel):
    """不可变值对象基类，构造后可在并发上下文间自由共享"""
    model_config = ConfigDict(frozen=True, extra="forbid")
