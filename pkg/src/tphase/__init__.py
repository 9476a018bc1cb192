"""Ternary Cahn-Hilliard phase-field models."""
__version__ = "0.1.0"
