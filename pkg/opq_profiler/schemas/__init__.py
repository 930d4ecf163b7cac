"""
Value objects shared by every service
"""
from .base import ValueObject
from .measurement import MeasurementRecord, PlatformSpec
from .cost import CostCurve, CostSample, DerivationResult, PowerLaw, ValidityWarning
from .opq import OpqPoint, ShiftRecord, ShiftResult
from .simulation import RoundtripReport, SimConfig, SimulatedPoint, SimulationFile
from .bench import BenchConfig
from .profile import OpqPlotDocument, ProfileDocument

__all__ = [
    "ValueObject",
    "MeasurementRecord",
    "PlatformSpec",
    "CostCurve",
    "CostSample",
    "DerivationResult",
    "PowerLaw",
    "ValidityWarning",
    "OpqPoint",
    "ShiftRecord",
    "ShiftResult",
    "RoundtripReport",
    "SimConfig",
    "SimulatedPoint",
    "SimulationFile",
    "BenchConfig",
    "OpqPlotDocument",
    "ProfileDocument",
]
