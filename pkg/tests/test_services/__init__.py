"""
Service tests
"""
