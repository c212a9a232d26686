"""Empirical mode decomposition with spline envelopes or forward heat-equation mean curves."""

__version__ = "0.1.0"
