"""
Unit tests for repository modules.
"""
