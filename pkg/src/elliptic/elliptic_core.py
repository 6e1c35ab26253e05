"""
Complete elliptic integral of the first kind and Jacobi elliptic functions.

Both are computed from the arithmetic-geometric mean: K(k) directly from
AGM(1, k'), and sn, cn, dn by the descending Landen (AGM) scheme with a
trigonometric base case. Arguments may be floats or numpy arrays; the
modulus is always a scalar.
"""

import math
from typing import Tuple, Union

import numpy as np

from ..utils.errors import ConvergenceError, DomainError
from ..utils.logger import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

MAX_AGM_ITERATIONS = 32
_EPS = np.finfo(float).eps


def _validate_modulus(k: float, allow_one: bool) -> float:
    k = float(k)
    if not math.isfinite(k) or k < 0.0 or k > 1.0:
        raise DomainError(f"Elliptic modulus must lie in [0, 1], got {k}")
    if k == 1.0 and not allow_one:
        raise DomainError("K(k) diverges at k = 1; period queries need k < 1")
    return k


def agm(a: float, b: float) -> float:
    """
    Arithmetic-geometric mean of two non-negative numbers.

    Args:
        a: First argument
        b: Second argument

    Returns:
        AGM(a, b)

    Raises:
        ConvergenceError: if the iteration cap is reached
    """
    if a < 0.0 or b < 0.0:
        raise DomainError(f"AGM needs non-negative arguments, got ({a}, {b})")
    for _ in range(MAX_AGM_ITERATIONS):
        if abs(a - b) <= 4.0 * _EPS * max(a, b):
            return 0.5 * (a + b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    raise ConvergenceError(f"AGM did not converge within {MAX_AGM_ITERATIONS} iterations")


def complete_K(k: float) -> float:
    """
    Complete elliptic integral of the first kind.

    K(k) = pi / (2 AGM(1, sqrt(1 - k^2))).

    Args:
        k: Modulus, 0 <= k < 1

    Returns:
        K(k)

    Raises:
        DomainError: for k < 0 or k >= 1
    """
    k = _validate_modulus(k, allow_one=False)
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


def _landen_sequence(k: float):
    """AGM sequences a_n, c_n for the descending scheme, c_N below rounding."""
    a, b, c = 1.0, math.sqrt((1.0 - k) * (1.0 + k)), k
    a_seq, c_seq = [a], [c]
    for _ in range(MAX_AGM_ITERATIONS):
        if abs(c) <= _EPS * a:
            return a_seq, c_seq
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    raise ConvergenceError(f"Landen descent did not converge for k={k}")


def jacobi_scd(u: ArrayLike, k: float) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    Jacobi elliptic functions sn, cn, dn for real argument.

    k = 0 gives (sin, cos, 1) and k = 1 the hyperbolic limit
    (tanh, sech, sech).

    Args:
        u: Real argument (float or array)
        k: Modulus, 0 <= k <= 1

    Returns:
        Tuple (sn, cn, dn) with the shape of u
    """
    k = _validate_modulus(k, allow_one=True)
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)

    if k == 0.0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    elif k == 1.0:
        sn, cn = np.tanh(u), 1.0 / np.cosh(u)
        dn = cn.copy()
    else:
        a_seq, c_seq = _landen_sequence(k)
        n_steps = len(a_seq) - 1
        phi = (2.0**n_steps) * a_seq[-1] * u
        for n in range(n_steps, 0, -1):
            phi = 0.5 * (phi + np.arcsin(c_seq[n] / a_seq[n] * np.sin(phi)))
        sn, cn = np.sin(phi), np.cos(phi)
        # dn > 0 on the real axis for k < 1
        dn = np.sqrt(1.0 - (k * sn) ** 2)

    if scalar:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn
