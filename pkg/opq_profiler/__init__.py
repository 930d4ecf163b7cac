"""
OPQ profiler: per-operator cycle costs from saturation throughput deltas
"""

__version__ = "1.0.0"
