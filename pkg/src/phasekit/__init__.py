"""Oscillatory integrals with singular amplitudes: expansions, bounds, oracles."""

__version__ = "0.1.0"
