"""Exact verification workbench for kappa-deformed E(2) quantum groups."""

__version__ = "0.1.0"
