"""
Spectral machinery for the generalized Lamé equation: the catalog of
polynomial eigenpairs, the Schrödinger and algebraic operators, the
generalized Ince recurrences and the power-series recurrences.
"""
