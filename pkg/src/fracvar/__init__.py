"""Fractional and generalized variations, smoothness-class witnesses and reparametrizations."""

__version__ = "0.1.0"
