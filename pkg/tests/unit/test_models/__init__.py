"""
Unit tests for model modules.
"""
