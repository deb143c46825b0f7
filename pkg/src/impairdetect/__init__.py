"""Alcohol/drug impairment classifier suite and pulse-bracelet simulator."""

__version__ = "0.1.0"
