"""Infrared nullification of the thermal effective electromagnetic field."""

__version__ = "0.1.0"
