"""Isentropic Euler 2-shock construction with certified existence-time bounds."""
__version__ = "0.1.0"
