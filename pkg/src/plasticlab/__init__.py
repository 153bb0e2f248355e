"""Continual-learning lab: growable plastic network, benchmark tracks, metrics and Pareto analysis."""

__version__ = "0.1.0"
