"""
Report service

参考数据加载、文本表格报告、OPQ 绘图数据。
"""
from typing import Dict, List, Optional, Sequence, Tuple

import structlog
from tabulate import tabulate

from opq_profiler.core.config import ToolkitDefaults, defaults as default_config
from opq_profiler.core.exceptions import EmptyDataset, UnclassifiedPoints
from opq_profiler.schemas.cost import CostCurve, PowerLaw
from opq_profiler.schemas.measurement import MeasurementRecord, PlatformSpec
from opq_profiler.schemas.profile import (
    BarPair,
    CostSeries,
    OpqPlotDocument,
    PlotArrow,
    PlotBoundary,
    PlotPoint,
    ProfileDocument,
)
from opq_profiler.schemas.simulation import SimConfig
from opq_profiler.services.opq_service import OpqService
from opq_profiler.services.saturation_sim_service import SaturationSimService
from opq_profiler.services.scaling_fit_service import eval_curve
from opq_profiler.shared.constants.enums import OPERATOR_REPORT_ORDER, Provenance
from opq_profiler.shared.constants.reference import (
    REFERENCE_BASELINE_COST,
    REFERENCE_MIN_SIZE,
    REFERENCE_PLATFORMS,
    REFERENCE_ROWS,
    REFERENCE_SIZES,
)
from opq_profiler.utils.formatting import format_cost, format_exponent, round_sig

logger = structlog.get_logger(__name__)

TABLE_HEADERS = ["Operator", "Platform", "Base Cost", "Exponent k", "R²"]
TABLE_ALIGN = ("left", "left", "right", "right", "right")
HEAVY_LOG_OPERATOR = "printf"
LIGHT_LOG_OPERATORS = ("rte_log", "ringlog")


def operator_sort_key(operator: str) -> Tuple[int, str]:
    name = operator.lower()
    if name in OPERATOR_REPORT_ORDER:
        return OPERATOR_REPORT_ORDER.index(name), name
    return len(OPERATOR_REPORT_ORDER), name


class ReportService:
    """报告服务"""

    def __init__(self, config: Optional[ToolkitDefaults] = None):
        self.config = config or default_config
        self.opq = OpqService()

    def load_reference_profiles(
        self, thresholds: Optional[Dict[str, float]] = None
    ) -> Dict[str, ProfileDocument]:
        """内置参考数据集：arm 与 x86 两份 profile

        Args:
            thresholds: 平台 -> 固定阈值；未给出的平台使用本平台中位数
        """
        thresholds = thresholds or {}
        documents = {}
        for platform, (cpu_hz, description) in REFERENCE_PLATFORMS.items():
            curves = [
                CostCurve(
                    operator=operator,
                    coefficient_a=base / REFERENCE_MIN_SIZE ** k,
                    exponent_k=k,
                    r_squared=r2,
                    base_cost=base,
                    n_points=len(REFERENCE_SIZES),
                    fit_space="unknown",
                    min_size=REFERENCE_SIZES[0],
                    max_size=REFERENCE_SIZES[-1],
                )
                for operator, row_platform, base, k, r2 in REFERENCE_ROWS
                if row_platform == platform
            ]
            points = self.opq.classify_profile(curves, platform, threshold=thresholds.get(platform))
            documents[platform] = ProfileDocument(
                schema_version=self.config.SCHEMA_VERSION,
                platform=PlatformSpec(name=platform, cpu_hz=cpu_hz, description=description),
                curves=curves,
                opq_points=points,
                provenance=Provenance.REFERENCE,
                metadata={"r_squared": "as published; fit space not stated"},
            )
        return documents

    def reference_measurements(self) -> List[MeasurementRecord]:
        """由参考曲线经饱和仿真生成的基线/SUT 测量记录

        无噪声、无线速上限；按各平台频率推导后可复现参考表的基础成本与指数。
        """
        simulator = SaturationSimService(self.config)
        records: List[MeasurementRecord] = []
        for platform, (cpu_hz, _) in REFERENCE_PLATFORMS.items():
            sim = SimConfig(cpu_hz=cpu_hz, base_cost_fn=PowerLaw(coefficient=REFERENCE_BASELINE_COST))
            baseline_written = False
            for operator, row_platform, base, k, _ in REFERENCE_ROWS:
                if row_platform != platform:
                    continue
                op_cost = PowerLaw(coefficient=base / REFERENCE_MIN_SIZE ** k, exponent=k)
                baseline, sut = simulator.run_protocol(
                    sim, op_cost, REFERENCE_SIZES, operator=operator, platform=platform
                )
                if not baseline_written:
                    records.extend(baseline)
                    baseline_written = True
                records.extend(sut)
        return records

    def emit_table_report(self, profiles: Sequence[ProfileDocument]) -> str:
        """按参考表布局输出文本表格"""
        if not profiles:
            raise EmptyDataset()
        platform_order = {p.platform.name: i for i, p in enumerate(profiles)}
        rows = []
        for profile in profiles:
            for curve in profile.curves:
                rows.append((profile.platform.name, curve))
        rows.sort(key=lambda item: (operator_sort_key(item[1].operator), platform_order[item[0]]))

        table = tabulate(
            [
                [
                    curve.operator,
                    platform,
                    format_cost(curve.base_cost),
                    format_exponent(curve.exponent_k),
                    format_exponent(curve.r_squared),
                ]
                for platform, curve in rows
            ],
            headers=TABLE_HEADERS,
            tablefmt="simple",
            disable_numparse=True,
            colalign=TABLE_ALIGN if rows else None,
        )
        footnotes = ["Base Cost in CPU cycles at the smallest packet size."]
        for profile in profiles:
            note = f"{profile.platform.name}: provenance={profile.provenance.value}"
            if profile.provenance != Provenance.REFERENCE:
                note += f", R² in {profile.fit_space} space"
            footnotes.append(note)
        return table + "\n\n" + "\n".join(footnotes) + "\n"

    def emit_opq_plot_data(
        self,
        from_profile: ProfileDocument,
        to_profile: Optional[ProfileDocument] = None,
    ) -> OpqPlotDocument:
        """OPQ 散点、象限边界、迁移箭头、成本曲线与日志算子对比"""
        profiles = [p for p in (from_profile, to_profile) if p is not None]
        for profile in profiles:
            if profile.curves and not profile.opq_points:
                raise UnclassifiedPoints(profile.platform.name)

        points: List[PlotPoint] = []
        boundaries: List[PlotBoundary] = []
        series: List[CostSeries] = []
        bar_pairs: List[BarPair] = []
        for profile in profiles:
            name = profile.platform.name
            for p in sorted(profile.opq_points, key=lambda p: operator_sort_key(p.operator)):
                points.append(PlotPoint(
                    operator=p.operator,
                    platform=name,
                    x=round(p.exponent_k, 4),
                    y=round_sig(p.base_cost),
                    quadrant=p.quadrant,
                ))
            if profile.opq_points:
                boundaries.append(PlotBoundary(platform=name, axis="x", value=1.0))
                boundaries.append(PlotBoundary(
                    platform=name, axis="y", value=round_sig(profile.opq_points[0].threshold_used)
                ))
            series.extend(self._cost_series(profile))
            bar_pair = self._log_bar_pair(profile)
            if bar_pair is not None:
                bar_pairs.append(bar_pair)

        arrows: List[PlotArrow] = []
        if to_profile is not None:
            shift = self.opq.compute_shift(from_profile.opq_points, to_profile.opq_points)
            for r in sorted(shift.records, key=lambda r: operator_sort_key(r.operator)):
                arrows.append(PlotArrow(
                    operator=r.operator,
                    from_xy=[round(r.from_k, 4), round_sig(r.from_base)],
                    to_xy=[round(r.to_k, 4), round_sig(r.to_base)],
                    from_quadrant=r.from_quadrant,
                    to_quadrant=r.to_quadrant,
                    shifted=r.shifted,
                ))

        return OpqPlotDocument(
            schema_version=self.config.SCHEMA_VERSION,
            points=points,
            boundaries=boundaries,
            arrows=arrows,
            series=series,
            bar_pairs=bar_pairs,
        )

    def _cost_series(self, profile: ProfileDocument) -> List[CostSeries]:
        measured: Dict[str, Dict[int, float]] = {}
        for sample in profile.samples:
            measured.setdefault(sample.operator, {})[sample.packet_size] = sample.cost_cycles

        result = []
        for curve in sorted(profile.curves, key=lambda c: operator_sort_key(c.operator)):
            op_measured = measured.get(curve.operator, {})
            sizes = sorted(op_measured) or list(self.config.PACKET_SIZES)
            result.append(CostSeries(
                operator=curve.operator,
                platform=profile.platform.name,
                sizes=sizes,
                measured=[round_sig(op_measured[s]) if s in op_measured else None for s in sizes],
                fitted=[round_sig(eval_curve(curve, s)) for s in sizes],
            ))
        return result

    def _log_bar_pair(self, profile: ProfileDocument) -> Optional[BarPair]:
        bases = {p.operator: p.base_cost for p in profile.opq_points}
        if HEAVY_LOG_OPERATOR not in bases:
            return None
        light = next((op for op in LIGHT_LOG_OPERATORS if op in bases), None)
        if light is None:
            return None
        return BarPair(
            platform=profile.platform.name,
            heavy_operator=HEAVY_LOG_OPERATOR,
            light_operator=light,
            heavy_cost=round_sig(bases[HEAVY_LOG_OPERATOR]),
            light_cost=round_sig(bases[light]),
            fold_change=round_sig(self.opq.fold_change(bases[HEAVY_LOG_OPERATOR], bases[light])),
        )
