"""Gridded screening-curve model of cost-optimal decentralised heating."""

__version__ = "0.1.0"
