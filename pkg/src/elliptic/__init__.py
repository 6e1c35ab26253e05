"""
Elliptic function kernels: complete elliptic integrals, Jacobi functions,
the generalized Jacobi functions and the independent oracles used to
verify them.
"""
