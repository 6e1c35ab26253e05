"""
Test package for genlame.

Contains all unit tests, integration tests, and test utilities.
"""
