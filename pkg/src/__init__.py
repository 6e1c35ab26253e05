"""
Generalized Lamé toolkit - generalized Jacobi functions and the spectral
theory of the generalized Lamé and Ince equations.

This package evaluates the generalized Jacobi functions s, c, d1, d2,
verifies the fifteen polynomial eigenpairs of the generalized Lamé
equation, computes Hill spectra and rediscovers the eigenpairs from the
termination conditions of their Fourier and power-series recurrences.
"""

__version__ = "0.1.0"
__author__ = "Generalized Lamé Toolkit Team"
