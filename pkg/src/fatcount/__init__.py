"""Pericardial fat count image pipeline: phantoms, projections, models, metrics."""

__version__ = "0.1.0"
