"""
Test package for the CIUV truth-discovery engine.
"""
