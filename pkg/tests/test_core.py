"""
测试配置、异常、校验与格式化工具
"""
import logging

import numpy as np
import pytest
from pydantic import ValidationError

from opq_profiler.core.config import EnvSettings, ToolkitDefaults, build_defaults, load_config_file
from opq_profiler.core.exceptions import (
    DataValidationError,
    EmptyOperatorName,
    LineRateBoundError,
    MeasurementValidityError,
    NegativeCost,
    NonPositiveThroughput,
    ReservedOperatorName,
    ZeroPacketSize,
)
from opq_profiler.observability.logging import get_logger, setup_logging
from opq_profiler.schemas.cost import CostCurve, CostSample, PowerLaw
from opq_profiler.schemas.measurement import MeasurementRecord, PlatformSpec
from opq_profiler.schemas.opq import OpqPoint, ShiftRecord
from opq_profiler.shared.constants.enums import BaseCostSource, QuadrantLabel
from opq_profiler.shared.utils.validators import validate_record, validate_user_operator
from opq_profiler.utils.formatting import format_cost, format_exponent, round_sig


class TestConfig:
    """默认参数与配置文件"""

    def test_defaults(self):
        defaults = ToolkitDefaults()
        assert defaults.PACKET_SIZES == [64, 128, 256]
        assert defaults.LINE_RATE_MARGIN == 0.02
        assert defaults.SCHEMA_VERSION == "1"

    def test_overrides(self):
        assert build_defaults({"SEED": 5, "NOISY_RATIO": 1.2}).SEED == 5
        assert build_defaults(None) == ToolkitDefaults()

    @pytest.mark.parametrize("overrides", [{"LINE_RATE_MARGIN": 0}, {"PACKET_SIZES": []}, {"UNKNOWN": 1}])
    def test_invalid_overrides(self, overrides):
        with pytest.raises(ValidationError):
            build_defaults(overrides)

    def test_config_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"defaults": {"SEED": 3}}')
        assert load_config_file(path) == {"defaults": {"SEED": 3}}
        assert load_config_file(None) == {}

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config_file(tmp_path / "missing.json")

    def test_no_color_env(self, monkeypatch):
        monkeypatch.delenv("OPQ_NO_COLOR", raising=False)
        assert EnvSettings().NO_COLOR is False
        monkeypatch.setenv("OPQ_NO_COLOR", "1")
        assert EnvSettings().NO_COLOR is True


class TestExceptions:
    """异常族与退出码"""

    def test_exit_codes(self):
        assert isinstance(NonPositiveThroughput(0), DataValidationError)
        assert NonPositiveThroughput(0).exit_code == 2
        assert isinstance(LineRateBoundError([64]), MeasurementValidityError)
        assert LineRateBoundError([64]).exit_code == 3

    def test_negative_cost_details(self):
        error = NegativeCost(r_base=1e6, r_op=2e6, packet_size=64, operator="crc")
        assert error.code == "NEGATIVE_COST"
        assert error.details["packet_size"] == 64


class TestValidators:
    """测量记录不变量"""

    def test_valid_record(self, make_record):
        record = make_record(64, 1e6)
        assert validate_record(record) is record

    def test_zero_throughput(self, make_record):
        with pytest.raises(NonPositiveThroughput):
            validate_record(make_record(64, 0.0))

    def test_nan_throughput(self, make_record):
        with pytest.raises(NonPositiveThroughput):
            validate_record(make_record(64, float("nan")))

    def test_zero_size(self, make_record):
        with pytest.raises(ZeroPacketSize):
            validate_record(make_record(0, 1e6))

    def test_empty_operator(self, make_record):
        with pytest.raises(EmptyOperatorName):
            validate_record(make_record(64, 1e6, operator=""))

    def test_reserved_name(self):
        with pytest.raises(ReservedOperatorName):
            validate_user_operator("baseline")
        assert validate_user_operator("crc") == "crc"


class TestFormatting:
    """4 位有效数字与 4 位小数"""

    @pytest.mark.parametrize(
        "value, expected",
        [(111.16666, 111.2), (594.4693877, 594.5), (12006.4, 12006.0), (0.0123456, 0.01235), (0.0, 0.0)],
    )
    def test_round_sig(self, value, expected):
        assert round_sig(value) == pytest.approx(expected)

    @pytest.mark.parametrize(
        "value, expected",
        [(12006.0, "12006"), (29129.0, "29129"), (823.0, "823"), (1.5, "1.5"), (457.2222, "457.2"), (65.0, "65")],
    )
    def test_format_cost(self, value, expected):
        assert format_cost(value) == expected

    def test_format_exponent(self):
        assert format_exponent(1.37) == "1.3700"
        assert format_exponent(0.0644) == "0.0644"


class TestPowerLaw:
    def test_callable(self):
        assert PowerLaw(coefficient=2.0, exponent=1.5)(64) == pytest.approx(1024.0)
        assert PowerLaw(coefficient=400.0)(1500) == 400.0


class TestLogging:
    """日志写到 stderr"""

    def test_json_logs_on_stderr(self, capsys):
        setup_logging(level="INFO", json_output=True)
        get_logger("test").info("sweep_derived", operator="crc")
        captured = capsys.readouterr()
        assert captured.out == ""
        assert '"event": "sweep_derived"' in captured.err
        assert '"operator": "crc"' in captured.err

    def test_level(self):
        setup_logging(level="WARNING")
        assert logging.getLogger().level == logging.WARNING


def random_values(seed: int):
    """每种值对象各构造一个随机实例"""
    rng = np.random.Generator(np.random.PCG64(seed))
    size = int(rng.choice([64, 128, 256, 512, 1500]))
    base, k = float(rng.uniform(1.0, 3e4)), float(rng.uniform(0.0, 2.0))
    to_base, to_k = float(rng.uniform(1.0, 3e4)), float(rng.uniform(0.0, 2.0))
    threshold, to_threshold = float(rng.uniform(1.0, 3e4)), float(rng.uniform(1.0, 3e4))
    return [
        MeasurementRecord(
            platform="arm", operator="crc", packet_size=size,
            throughput_pps=float(rng.uniform(1e5, 1e8)), run_id=int(rng.integers(0, 10)),
        ),
        MeasurementRecord(platform="x86", operator="baseline", packet_size=size, throughput_pps=int(rng.integers(1, 10**8))),
        CostSample(operator="hash", packet_size=size, cost_cycles=float(rng.uniform(0.0, 1e4))),
        CostCurve(
            operator="crc", coefficient_a=base / 64 ** k, exponent_k=k, r_squared=float(rng.uniform(0.5, 1.0)),
            base_cost=base, n_points=3, min_size=64, max_size=256,
        ),
        OpqPoint(
            operator="crc", platform="arm", base_cost=base, exponent_k=k,
            quadrant=QuadrantLabel.classify(base, k, threshold), threshold_used=threshold,
            base_cost_source=BaseCostSource.SAMPLE,
        ),
        ShiftRecord(
            operator="crc", from_platform="arm", to_platform="x86",
            from_quadrant=QuadrantLabel.classify(base, k, threshold),
            to_quadrant=QuadrantLabel.classify(to_base, to_k, to_threshold),
            delta_base=to_base - base, delta_k=to_k - k, from_base=base, to_base=to_base, from_k=k, to_k=to_k,
            from_threshold=threshold, to_threshold=to_threshold,
        ),
        PlatformSpec(name="x86", cpu_hz=float(rng.uniform(1e9, 4e9)), description="host"),
    ]


class TestValueRoundTrip:
    """值对象经 JSON 序列化再解析保持相等"""

    @pytest.mark.parametrize("seed", range(4))
    def test_json_round_trip(self, seed):
        for value in random_values(seed):
            restored = type(value).model_validate_json(value.model_dump_json())
            assert restored == value

    def test_integer_throughput_stays_integer(self):
        record = MeasurementRecord(platform="arm", operator="crc", packet_size=64, throughput_pps=4500000)
        restored = MeasurementRecord.model_validate_json(record.model_dump_json())
        assert isinstance(restored.throughput_pps, int)
        assert restored == record
