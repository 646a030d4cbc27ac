"""Core modules of the doublefold toolkit."""

from . import configio, logger, version

__all__ = [
    "configio",
    "logger",
    "version",
]
