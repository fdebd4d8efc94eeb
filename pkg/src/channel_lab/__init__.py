"""Purity and fidelity Hamiltonians of finite-dimensional quantum channels."""

__version__ = "0.1.0"
