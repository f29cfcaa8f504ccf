"""Bifurcation structure of the FitzHugh-Nagumo traveling-wave ODE."""

__version__ = "0.1.0"
