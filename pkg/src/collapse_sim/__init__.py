"""Filtration-absorption dome collapse: closed forms, shooting, simulation and fits."""

__version__ = "0.1.0"
