"""
In-process packet-processing micro-benchmark
"""
