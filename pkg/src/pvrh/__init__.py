"""Monodromy-to-asymptotics toolkit for the fifth Painleve equation."""

__version__ = "0.1.0"
