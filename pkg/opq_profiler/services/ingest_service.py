"""
Ingest service

测量 CSV 的读写与 profile 文档的持久化。
CSV 表头固定为 platform,operator,packet_size_bytes,throughput_pps,run_id（run_id 可空）。
"""
import csv
import io
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import structlog

from opq_profiler.core.exceptions import (
    BadRow,
    DataValidationError,
    EmptyFile,
    MissingHeader,
)
from opq_profiler.schemas.measurement import MeasurementRecord
from opq_profiler.schemas.profile import OpqPlotDocument, ProfileDocument
from opq_profiler.shared.constants.enums import BASELINE_OPERATOR
from opq_profiler.shared.utils.validators import validate_record
from opq_profiler.utils.file_utils import atomic_write_text

logger = structlog.get_logger(__name__)

CSV_HEADER = ["platform", "operator", "packet_size_bytes", "throughput_pps", "run_id"]

PathLike = Union[str, Path]


def _parse_number(text: str) -> Union[int, float]:
    """整数保持整数，其余按 float 解析"""
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_measurements_csv(path: PathLike) -> List[MeasurementRecord]:
    """读取测量 CSV

    Raises:
        EmptyFile: 文件为空
        MissingHeader: 首行不是规定表头
        BadRow: 某行格式或取值非法（带行号）
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise EmptyFile(str(path))

    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != CSV_HEADER:
        raise MissingHeader(",".join(CSV_HEADER), ",".join(header) if header else None)

    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise BadRow(line, f"expected {len(CSV_HEADER)} columns, got {len(row)}")
        platform, operator, size_text, pps_text, run_text = (cell.strip() for cell in row)

        try:
            packet_size = int(size_text)
        except ValueError:
            raise BadRow(line, f"non-integer packet_size_bytes '{size_text}'") from None
        try:
            throughput = _parse_number(pps_text)
        except ValueError:
            raise BadRow(line, f"non-numeric throughput_pps '{pps_text}'") from None
        try:
            run_id = int(run_text) if run_text else None
        except ValueError:
            raise BadRow(line, f"non-integer run_id '{run_text}'") from None

        record = MeasurementRecord(
            platform=platform,
            operator=operator,
            packet_size=packet_size,
            throughput_pps=throughput,
            run_id=run_id,
        )
        try:
            records.append(validate_record(record))
        except DataValidationError as e:
            raise BadRow(line, e.message) from e

    logger.info("measurements_parsed", path=str(path), records=len(records))
    return records


def format_measurements_csv(records: Sequence[MeasurementRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([
            r.platform,
            r.operator,
            r.packet_size,
            repr(r.throughput_pps),
            "" if r.run_id is None else r.run_id,
        ])
    return buffer.getvalue()


def write_measurements_csv(records: Sequence[MeasurementRecord], path: PathLike) -> Path:
    return atomic_write_text(path, format_measurements_csv(records))


def split_series(
    records: Sequence[MeasurementRecord],
) -> Dict[str, Tuple[List[MeasurementRecord], Dict[str, List[MeasurementRecord]]]]:
    """按平台拆分为 (基线记录, 算子 -> SUT 记录)，保持文件中的算子顺序"""
    series: Dict[str, Tuple[List[MeasurementRecord], Dict[str, List[MeasurementRecord]]]] = {}
    for r in records:
        baseline, suts = series.setdefault(r.platform, ([], defaultdict(list)))
        if r.operator == BASELINE_OPERATOR:
            baseline.append(r)
        else:
            suts[r.operator].append(r)
    return {platform: (baseline, dict(suts)) for platform, (baseline, suts) in series.items()}


def save_profile(document: ProfileDocument, path: PathLike) -> Path:
    return atomic_write_text(path, document.model_dump_json(indent=2) + "\n")


def load_profile(path: PathLike) -> ProfileDocument:
    return ProfileDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))


def save_plot_document(document: OpqPlotDocument, path: PathLike) -> Path:
    return atomic_write_text(path, document.model_dump_json(indent=2) + "\n")
