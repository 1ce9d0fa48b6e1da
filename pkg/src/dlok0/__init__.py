"""Definable sets in dense linear orders and their Grothendieck ring."""

__version__ = "0.1.0"
