"""
Factory Pattern implementation for object creation.

This package provides the factory that creates services and environments
with their configuration injected.
"""

from src.factories.service_factory import ServiceFactory

__all__ = [
    "ServiceFactory",
]
