"""Exact verification engine for relative twisted vertex operators on
rational lattices with finite-order isometries."""

__version__ = "0.1.0"
