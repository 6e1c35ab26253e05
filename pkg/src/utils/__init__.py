"""
Utilities module for the generalized Lamé toolkit.

Contains logging configuration and the shared exception hierarchy.
"""
