"""
Unit tests for utility modules.
"""
