"""Flows, series solutions and limit-cycle diagnostics for the complex oscillator."""

__version__ = "0.1.0"
