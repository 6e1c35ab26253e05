"""Spectral tests package."""
