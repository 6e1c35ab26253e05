"""Elliptic kernel tests package."""
