"""
Unit tests for service modules.
"""
