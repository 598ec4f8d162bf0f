"""Desk-scale combinatorics of tagged trees, ordinal ranks and coloured orders."""

__version__ = "0.1.0"
