"""
测试命令行入口
"""
import json

import pytest

from opq_profiler.main import main
from opq_profiler.services.ingest_service import load_profile, parse_measurements_csv
from opq_profiler.shared.constants.enums import ValidityFlag


@pytest.fixture
def sim_config(tmp_path):
    """100GbE 上限只在 64 字节处生效的仿真配置"""
    path = tmp_path / "sim.json"
    path.write_text(json.dumps({
        "simulate": {
            "cpu_hz": 1.8e9,
            "base_cost": {"coefficient": 0.02, "exponent": 1.5},
            "op_cost": {"coefficient": 2.0, "exponent": 1.3},
            "operator": "crc",
            "platform": "arm",
            "line_rate": "100gbe",
            "runs": 3,
        }
    }))
    return path


@pytest.fixture
def measurements(tmp_path, sim_config):
    out = tmp_path / "m.csv"
    assert main(["simulate", "--config", str(sim_config), "--out", str(out)]) == 0
    return out


@pytest.fixture
def reference_dir(tmp_path):
    out = tmp_path / "reference"
    assert main(["reference", "--out", str(out)]) == 0
    return out


class TestUsage:
    """用法错误退出码为 1"""

    @pytest.mark.parametrize(
        "argv",
        [[], ["bogus"], ["derive"], ["simulate", "--sizes", "abc"], ["derive", "--input", "x", "--line-rate-pps", "fast"]],
    )
    def test_usage_errors(self, argv):
        with pytest.raises(SystemExit) as exc_info:
            main(argv)
        assert exc_info.value.code == 1

    def test_global_flags_before_subcommand(self, capsys):
        assert main(["--threshold", "40", "reference", "--plot"]) == 0
        plot = json.loads(capsys.readouterr().out)
        thresholds = {b["platform"]: b["value"] for b in plot["boundaries"] if b["axis"] == "y"}
        assert thresholds == {"arm": 40.0, "x86": 40.0}

    def test_subcommand_flag_wins(self, capsys):
        assert main(["--threshold", "40", "reference", "--plot", "--threshold", "100"]) == 0
        plot = json.loads(capsys.readouterr().out)
        assert {b["value"] for b in plot["boundaries"] if b["axis"] == "y"} == {100.0}

    def test_bad_global_flag_before_subcommand(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["--sizes", "abc", "simulate"])
        assert exc_info.value.code == 1


class TestReference:
    """reference 子命令"""

    def test_table(self, capsys):
        assert main(["reference"]) == 0
        out = capsys.readouterr().out
        rows = out.split("\n\n")[0].splitlines()[2:]
        assert len(rows) == 12
        assert "29129" in out

    def test_plot(self, capsys):
        assert main(["reference", "--plot"]) == 0
        plot = json.loads(capsys.readouterr().out)
        assert len(plot["points"]) == 12
        assert len(plot["arrows"]) == 6

    def test_arm_threshold_override(self, capsys):
        assert main(["reference", "--plot", "--threshold-arm", "40"]) == 0
        plot = json.loads(capsys.readouterr().out)
        arm = {p["operator"]: p["quadrant"] for p in plot["points"] if p["platform"] == "arm"}
        assert arm["htons"] == arm["checksum"] == "HighStartupCost"

    def test_measurements(self, capsys):
        assert main(["reference", "--measurements"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "platform,operator,packet_size_bytes,throughput_pps,run_id"
        assert len(lines) == 1 + 2 * 7 * 3

    def test_out_directory(self, reference_dir):
        names = sorted(p.name for p in reference_dir.iterdir())
        assert names == [
            "arm.profile.json", "opq_plot.json", "reference_measurements.csv", "report.txt", "x86.profile.json",
        ]
        assert len(load_profile(reference_dir / "arm.profile.json").opq_points) == 6


class TestPipeline:
    """simulate → derive → fit → classify → report"""

    def test_simulate_writes_csv(self, measurements):
        records = parse_measurements_csv(measurements)
        assert len(records) == 2 * 3 * 3
        assert {r.operator for r in records} == {"baseline", "crc"}

    def test_full_pipeline(self, tmp_path, measurements, capsys):
        derived, fitted, classified = tmp_path / "d.json", tmp_path / "f.json", tmp_path / "c.json"
        assert main(["derive", "--input", str(measurements), "--cpu-hz", "1.8e9", "--out", str(derived)]) == 0

        profile = load_profile(derived)
        assert [s.packet_size for s in profile.samples] == [128, 256]
        assert [(w.packet_size, w.flag) for w in profile.warnings] == [(64, ValidityFlag.LINE_RATE_BOUND)]

        assert main(["fit", "--input", str(derived), "--out", str(fitted)]) == 0
        [curve] = load_profile(fitted).curves
        assert curve.exponent_k == pytest.approx(1.3, abs=1e-9)
        assert curve.coefficient_a == pytest.approx(2.0, rel=1e-9)

        assert main(["classify", "--input", str(fitted), "--threshold", "100", "--out", str(classified)]) == 0
        [point] = load_profile(classified).opq_points
        assert point.threshold_used == 100.0
        assert point.quadrant.value == "LatentTrap"

        capsys.readouterr()
        assert main(["report", "--input", str(classified)]) == 0
        report = capsys.readouterr().out
        assert "crc" in report and "1.3000" in report

    def test_strict_line_rate_exits_3(self, measurements):
        assert main(["derive", "--input", str(measurements), "--cpu-hz", "1.8e9", "--strict"]) == 3

    def test_guard_disabled(self, tmp_path, measurements):
        out = tmp_path / "d.json"
        argv = ["derive", "--input", str(measurements), "--cpu-hz", "1.8e9", "--line-rate-pps", "none", "--out", str(out)]
        assert main(argv) == 0
        assert len(load_profile(out).samples) == 3

    def test_derive_requires_cpu_hz(self, measurements):
        assert main(["derive", "--input", str(measurements)]) == 2

    def test_derive_bad_csv(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("size,pps\n64,1\n")
        assert main(["derive", "--input", str(bad), "--cpu-hz", "1e9"]) == 2

    def test_fit_without_samples(self, reference_dir):
        assert main(["fit", "--input", str(reference_dir / "arm.profile.json")]) == 2


class TestDeterminism:
    """相同种子与配置输出逐字节一致"""

    def test_simulate_with_noise(self, tmp_path):
        sim_config = tmp_path / "noisy.json"
        sim_config.write_text(json.dumps({"simulate": {
            "cpu_hz": 2.2e9, "base_cost": {"coefficient": 400}, "op_cost": {"coefficient": 3, "exponent": 0.8},
            "noise_sigma": 0.02, "runs": 5,
        }}))
        outputs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            assert main(["simulate", "--config", str(sim_config), "--seed", "9", "--out", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_reference_outputs(self, tmp_path):
        for name in ("one", "two"):
            assert main(["reference", "--out", str(tmp_path / name)]) == 0
        for path in (tmp_path / "one").iterdir():
            assert path.read_bytes() == (tmp_path / "two" / path.name).read_bytes()


class TestShift:
    """shift 子命令"""

    def test_records_and_plot(self, tmp_path, reference_dir):
        out, plot = tmp_path / "shift.json", tmp_path / "plot.json"
        argv = [
            "shift", "--from", str(reference_dir / "arm.profile.json"), "--to", str(reference_dir / "x86.profile.json"),
            "--out", str(out), "--plot-out", str(plot),
        ]
        assert main(argv) == 0
        payload = json.loads(out.read_text())
        assert len(payload["records"]) == 6
        crc = next(r for r in payload["records"] if r["operator"] == "crc")
        assert crc["shifted"] is False
        assert crc["to_strategy"] == "algorithm replacement or hardware offload"
        assert payload["normalized_ns"]["crc"]["from_ns"] == pytest.approx(457.22, abs=0.01)
        assert len(json.loads(plot.read_text())["arrows"]) == 6

    def test_stale_quadrant_label(self, tmp_path, reference_dir):
        payload = json.loads((reference_dir / "arm.profile.json").read_text())
        crc = next(p for p in payload["opq_points"] if p["operator"] == "crc")
        crc["quadrant"] = "Ideal"
        edited = tmp_path / "edited.profile.json"
        edited.write_text(json.dumps(payload))
        assert main(["shift", "--from", str(edited), "--to", str(reference_dir / "x86.profile.json")]) == 2

    def test_unclassified_profile(self, tmp_path, measurements, reference_dir):
        derived = tmp_path / "d.json"
        assert main(["derive", "--input", str(measurements), "--cpu-hz", "1.8e9", "--out", str(derived)]) == 0
        assert main(["shift", "--from", str(derived), "--to", str(reference_dir / "x86.profile.json")]) == 2


class TestErrors:
    """数据错误与有效性错误的退出码"""

    def test_calibrate_override(self, capsys):
        assert main(["calibrate", "--cpu-hz", "2.2e9"]) == 0
        assert float(capsys.readouterr().out) == 2.2e9

    def test_bench_rejects_baseline(self):
        assert main(["bench", "--operators", "crc,baseline", "--cpu-hz", "2e9"]) == 2

    def test_bench_pool_larger_than_flow_table(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"defaults": {"POOL_SIZE": 70000}}))
        argv = ["bench", "--operators", "hash", "--cpu-hz", "2e9", "--config", str(path), "--out", str(tmp_path / "b")]
        assert main(argv) == 2

    def test_simulate_reserved_operator(self, tmp_path):
        path = tmp_path / "sim.json"
        path.write_text(json.dumps({"simulate": {
            "cpu_hz": 1e9, "base_cost": {"coefficient": 100}, "op_cost": {"coefficient": 5}, "operator": "baseline",
        }}))
        assert main(["simulate", "--config", str(path)]) == 2

    def test_invalid_simulation_file(self, tmp_path):
        path = tmp_path / "sim.json"
        path.write_text(json.dumps({"simulate": {"cpu_hz": -1, "base_cost": {"coefficient": 1}, "op_cost": {"coefficient": 1}}}))
        assert main(["simulate", "--config", str(path)]) == 2

    def test_invalid_defaults_section(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"defaults": {"LINE_RATE_MARGIN": 2}}))
        assert main(["reference", "--config", str(path)]) == 2

    def test_missing_input_file(self, tmp_path):
        assert main(["report", "--input", str(tmp_path / "missing.json")]) == 2
