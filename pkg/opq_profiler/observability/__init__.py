"""
Observability module for logging
"""
