"""
测试饱和数据面仿真
"""
import math

import numpy as np
import pytest

from opq_profiler.core.exceptions import DataValidationError, NonPositiveInput
from opq_profiler.schemas.cost import PowerLaw
from opq_profiler.schemas.simulation import SimulationFile
from opq_profiler.services.cost_derivation_service import ethernet_line_rate_pps
from opq_profiler.services.ingest_service import format_measurements_csv
from opq_profiler.services.saturation_sim_service import make_rng
from opq_profiler.shared.constants.enums import BASELINE_OPERATOR, BoundFlag
from tests.conftest import CAP_AT_64_BASE, SIZES


class TestSimulateThroughput:
    """F / (C_base + C_op)，可选噪声与线速上限"""

    def test_baseline_rate(self, simulator, make_sim):
        point = simulator.simulate_throughput(make_sim(cpu_hz=1e9, base_cost=100.0), 64, 0.0)
        assert point.pps == pytest.approx(1.0e7)
        assert point.bound == BoundFlag.CPU_BOUND

    def test_capped(self, simulator, make_sim):
        point = simulator.simulate_throughput(make_sim(cpu_hz=1e9, base_cost=5.0, line_rate=5e7), 64, 5.0)
        assert point.pps == 5.0e7
        assert point.bound == BoundFlag.LINE_RATE_BOUND

    def test_crc_cost_on_arm(self, simulator, make_sim):
        point = simulator.simulate_throughput(make_sim(cpu_hz=1.8e9, base_cost=400.0), 64, 823.0)
        assert point.pps == pytest.approx(1.8e9 / 1223.0)
        assert point.pps == pytest.approx(1.4718e6, rel=1e-4)

    def test_bound_iff_cap_returned(self, simulator, make_sim):
        sim = make_sim(cpu_hz=1.8e9, base_cost=CAP_AT_64_BASE, line_rate="100gbe")
        for size in SIZES:
            point = simulator.simulate_throughput(sim, size, 0.0)
            at_cap = point.pps == ethernet_line_rate_pps(size)
            assert (point.bound == BoundFlag.LINE_RATE_BOUND) == at_cap
        assert simulator.simulate_throughput(sim, 64, 0.0).bound == BoundFlag.LINE_RATE_BOUND

    def test_monotonic(self, simulator, make_sim):
        sim = make_sim(cpu_hz=2.2e9, base_cost=100.0)
        rates = [simulator.simulate_throughput(sim, 64, c).pps for c in (0.0, 1.0, 10.0, 100.0)]
        assert all(a > b for a, b in zip(rates, rates[1:]))
        slow = simulator.simulate_throughput(make_sim(cpu_hz=1.8e9, base_cost=100.0), 64, 10.0).pps
        assert slow < rates[2]

    def test_negative_op_cost(self, simulator, make_sim):
        with pytest.raises(DataValidationError) as exc_info:
            simulator.simulate_throughput(make_sim(), 64, -1.0)
        assert exc_info.value.code == "NEGATIVE_OP_COST"

    def test_non_positive_base_cost(self, simulator, make_sim):
        with pytest.raises(NonPositiveInput):
            simulator.simulate_throughput(make_sim(base_cost=0.0), 64, 1.0)

    def test_noise_unbiased_in_log_space(self, simulator, make_sim):
        sigma = 0.05
        sim = make_sim(cpu_hz=1e9, base_cost=100.0, noise_sigma=sigma, seed=11)
        rng = make_rng(sim.seed)
        true_log = math.log(1e7)
        n = 10000
        deviations = [math.log(simulator.simulate_throughput(sim, 64, 0.0, rng).pps) - true_log for _ in range(n)]
        assert abs(float(np.mean(deviations))) < 5 * sigma / math.sqrt(n)
        assert float(np.std(deviations)) == pytest.approx(sigma, rel=0.05)


class TestRunProtocol:
    """基线/SUT 两步协议"""

    def test_records_and_operators(self, simulator, make_sim):
        baseline, sut = simulator.run_protocol(make_sim(), PowerLaw(coefficient=2.0, exponent=1.3), SIZES, runs=2)
        assert [r.operator for r in baseline] == [BASELINE_OPERATOR] * 6
        assert {r.operator for r in sut} == {"sim_op"}
        assert [(r.packet_size, r.run_id) for r in sut] == [(s, i) for s in SIZES for i in range(2)]

    def test_noiseless_repeats_identical(self, simulator, make_sim):
        baseline, sut = simulator.run_protocol(make_sim(), PowerLaw(coefficient=2.0, exponent=1.3), [64], runs=5)
        assert len({r.throughput_pps for r in baseline}) == 1
        assert len({r.throughput_pps for r in sut}) == 1

    def test_same_seed_byte_identical(self, simulator, make_sim):
        sim = make_sim(noise_sigma=0.02, seed=42)
        op = PowerLaw(coefficient=2.0, exponent=1.3)
        first = format_measurements_csv(sum(simulator.run_protocol(sim, op, SIZES, runs=3), []))
        second = format_measurements_csv(sum(simulator.run_protocol(sim, op, SIZES, runs=3), []))
        assert first == second

    def test_different_seed_differs(self, simulator, make_sim):
        op = PowerLaw(coefficient=2.0, exponent=1.3)
        a, _ = simulator.run_protocol(make_sim(noise_sigma=0.02, seed=1), op, SIZES)
        b, _ = simulator.run_protocol(make_sim(noise_sigma=0.02, seed=2), op, SIZES)
        assert [r.throughput_pps for r in a] != [r.throughput_pps for r in b]

    def test_closed_loop(self, simulator, derivation, make_sim):
        op = PowerLaw(coefficient=2.0, exponent=1.3)
        baseline, sut = simulator.run_protocol(make_sim(), op, SIZES)
        result = derivation.derive_sweep(1.8e9, baseline, sut)
        for sample in result.samples:
            assert sample.cost_cycles == pytest.approx(op(sample.packet_size), rel=1e-9)

    def test_empty_sizes(self, simulator, make_sim):
        with pytest.raises(DataValidationError):
            simulator.run_protocol(make_sim(), PowerLaw(coefficient=1.0), [])

    def test_zero_runs(self, simulator, make_sim):
        with pytest.raises(NonPositiveInput):
            simulator.run_protocol(make_sim(), PowerLaw(coefficient=1.0), SIZES, runs=0)


class TestEndToEndRoundtrip:
    """仿真 → 推导 → 拟合"""

    def test_recovers_injected_curve(self, simulator, make_sim):
        report = simulator.end_to_end_roundtrip(make_sim(), PowerLaw(coefficient=2.0, exponent=1.37), SIZES)
        assert not report.degenerate
        assert report.curve.exponent_k == pytest.approx(1.37, abs=1e-6)
        assert abs(report.delta_k) < 1e-6
        assert abs(report.delta_a) < 1e-6
        assert report.max_relative_error < 1e-9

    @pytest.mark.parametrize("c_base", [50.0, 400.0, 1000.0])
    @pytest.mark.parametrize("c_op", [0.5, 10.0, 823.0, 12006.0])
    def test_noiseless_grid(self, simulator, make_sim, c_base, c_op):
        report = simulator.end_to_end_roundtrip(make_sim(base_cost=c_base), PowerLaw(coefficient=c_op), SIZES)
        assert report.max_relative_error < 1e-9

    def test_zero_cost_operator_is_degenerate(self, simulator, make_sim):
        report = simulator.end_to_end_roundtrip(make_sim(), PowerLaw(coefficient=0.0), SIZES)
        assert report.degenerate
        assert report.degenerate_reason == "NON_POSITIVE_COST"
        assert all(s.cost_cycles == 0.0 for s in report.recovered)
        assert report.curve is None

    def test_cap_binding_at_smallest_size(self, simulator, make_sim):
        sim = make_sim(cpu_hz=1.8e9, base_cost=CAP_AT_64_BASE, line_rate="100gbe")
        report = simulator.end_to_end_roundtrip(sim, PowerLaw(coefficient=2.0, exponent=1.3), SIZES)
        assert report.excluded_sizes == [64]
        assert report.curve.n_points == 2
        assert report.curve.exponent_k == pytest.approx(1.3, abs=1e-9)


class TestConfigFromFile:
    """JSON 配置段 -> SimConfig"""

    def test_100gbe(self, simulator):
        sim_file = SimulationFile(
            cpu_hz=1.8e9, base_cost={"coefficient": 400.0}, op_cost={"coefficient": 2.0, "exponent": 1.3},
            line_rate="100gbe",
        )
        sim = simulator.config_from_file(sim_file)
        assert sim.line_rate_pps_fn(64) == pytest.approx(ethernet_line_rate_pps(64))
        assert sim.base_cost_fn(256) == pytest.approx(400.0)

    def test_fixed_cap(self, simulator):
        sim_file = SimulationFile(cpu_hz=1e9, base_cost={"coefficient": 5.0}, op_cost={"coefficient": 5.0}, line_rate=5e7)
        sim = simulator.config_from_file(sim_file)
        assert sim.line_rate_pps_fn(1500) == 5e7

    def test_no_cap(self, simulator):
        sim_file = SimulationFile(cpu_hz=1e9, base_cost={"coefficient": 5.0}, op_cost={"coefficient": 5.0})
        assert simulator.config_from_file(sim_file).line_rate_pps_fn is None
