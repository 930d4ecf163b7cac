"""
Tests module
"""

