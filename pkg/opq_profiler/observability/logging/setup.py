"""
Logging setup and configuration

使用 structlog 实现结构化日志：
- 控制台：默认彩色输出，OPQ_NO_COLOR / --no-color 时关闭颜色
- --log-json：JSON 输出
日志统一写到 stderr，报表内容走 stdout 或 --out 文件。
"""
import logging
import sys

import structlog

from opq_profiler.core.config import EnvSettings


def setup_logging(level: str = "INFO", json_output: bool = False, colors: bool = True) -> None:
    """配置结构化日志

    structlog 负责结构化数据处理和渲染，ProcessorFormatter 将 structlog 的
    processors 桥接到标准库 logging。
    """
    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.setLevel(getattr(logging, level.upper()))

    shared_processors = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.ExtraAdder(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
    ]

    if json_output:
        renderer = structlog.processors.JSONRenderer(ensure_ascii=False)
    else:
        use_colors = colors and not EnvSettings().NO_COLOR and sys.stderr.isatty()
        renderer = structlog.dev.ConsoleRenderer(colors=use_colors)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(
        structlog.stdlib.ProcessorFormatter(
            foreign_pre_chain=shared_processors,
            processors=[
                structlog.stdlib.ProcessorFormatter.remove_processors_meta,
                renderer,
            ],
        )
    )
    root_logger.addHandler(console_handler)

    structlog.configure(
        processors=shared_processors + [
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def get_logger(name: str = None):
    """获取logger实例"""
    return structlog.get_logger(name)
