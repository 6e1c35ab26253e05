"""
Command-line surface for the generalized Lamé toolkit.
"""
