"""
Generalized Jacobi functions s, c, d1, d2.

s(u) inverts the pseudo-hyperelliptic integral

    u = ∫_0^s dt / sqrt((1 - t^2)(1 - k1^2 t^2)(1 - k2^2 t^2))

and c, d1, d2 are its companions sqrt(1 - s^2), sqrt(1 - k1^2 s^2),
sqrt(1 - k2^2 s^2). On the real axis they are expressed through the
standard Jacobi functions of argument w = k2' u and modulus kappa:

    D  = k2'^2 + k2^2 sn^2
    s  = sn / sqrt(D)
    c  = k2' cn / sqrt(D)
    d1 = k2' dn / sqrt(D)
    d2 = k2' / sqrt(D)

which is the quotient representation with the common factor cancelled
analytically, so nothing is lost when k1 and k2 are close.
"""

import math
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from ..utils.errors import ConvergenceError, DomainError
from ..utils.logger import get_logger
from .elliptic_core import complete_K, jacobi_scd

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ModulusPair:
    """
    The two moduli of the generalized functions, 0 <= k2 <= k1 <= 1.

    Attributes:
        k1: Larger modulus
        k2: Smaller modulus
    """

    k1: float
    k2: float

    def __post_init__(self):
        k1, k2 = float(self.k1), float(self.k2)
        if not (math.isfinite(k1) and math.isfinite(k2)):
            raise DomainError(f"Moduli must be finite, got k1={k1}, k2={k2}")
        if not 0.0 <= k2 <= k1 <= 1.0:
            raise DomainError(f"Moduli must satisfy 0 <= k2 <= k1 <= 1, got k1={k1}, k2={k2}")
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k2", k2)

    @property
    def x(self) -> float:
        """k1^2"""
        return self.k1 * self.k1

    @property
    def y(self) -> float:
        """k2^2"""
        return self.k2 * self.k2

    @property
    def k2p(self) -> float:
        """Complementary modulus k2' = sqrt(1 - k2^2)."""
        return math.sqrt((1.0 - self.k2) * (1.0 + self.k2))

    @property
    def kappa(self) -> float:
        """Modulus of the underlying Jacobi functions, kappa^2 = (k1^2 - k2^2) / (1 - k2^2)."""
        if self.k2 == 1.0:
            raise DomainError("kappa is undefined for k2 = 1")
        value = (self.k1 - self.k2) * (self.k1 + self.k2) / ((1.0 - self.k2) * (1.0 + self.k2))
        return math.sqrt(min(value, 1.0))

    @property
    def kappa_prime(self) -> float:
        """sqrt(1 - kappa^2) = sqrt((1 - k1^2) / (1 - k2^2))."""
        if self.k2 == 1.0:
            raise DomainError("kappa' is undefined for k2 = 1")
        return math.sqrt((1.0 - self.k1) * (1.0 + self.k1) / ((1.0 - self.k2) * (1.0 + self.k2)))

    def swapped(self) -> Tuple[float, float]:
        """(k2, k1); the exchanged pair generally violates the ordering, so it is returned raw."""
        return self.k2, self.k1

    def to_dict(self) -> Dict[str, float]:
        return {"k1": self.k1, "k2": self.k2}


@dataclass
class GenJacobiPoint:
    """Values of s, c, d1, d2 at a common real argument (scalars or equal-shape arrays)."""

    s: ArrayLike
    c: ArrayLike
    d1: ArrayLike
    d2: ArrayLike

    def as_tuple(self) -> Tuple[ArrayLike, ArrayLike, ArrayLike, ArrayLike]:
        return self.s, self.c, self.d1, self.d2

    def identity_residuals(self, m: ModulusPair) -> Dict[str, float]:
        """
        Largest violation of each of the six algebraic identities.

        Args:
            m: Moduli the point was evaluated at

        Returns:
            Dictionary of identity name to max absolute residual
        """
        s, c, d1, d2 = (np.asarray(v, dtype=float) for v in self.as_tuple())
        x, y = m.x, m.y
        residuals = {
            "s2+c2": s**2 + c**2 - 1.0,
            "d1^2+k1^2s2": d1**2 + x * s**2 - 1.0,
            "d2^2+k2^2s2": d2**2 + y * s**2 - 1.0,
            "d1^2-k1^2c2": d1**2 - x * c**2 - (1.0 - x),
            "d2^2-k2^2c2": d2**2 - y * c**2 - (1.0 - y),
            "k1^2d2^2-k2^2d1^2": x * d2**2 - y * d1**2 - (x - y),
        }
        return {name: float(np.max(np.abs(value))) for name, value in residuals.items()}

    def to_dict(self) -> Dict[str, float]:
        return {"s": float(self.s), "c": float(self.c), "d1": float(self.d1), "d2": float(self.d2)}


@dataclass(frozen=True)
class BranchData:
    """Branch points of the generalized functions and their real-axis periods."""

    u1: complex
    u2: complex
    u3: complex
    u4: complex
    real_period_s: float
    real_period_c: float
    real_period_d: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "u1": [self.u1.real, self.u1.imag],
            "u2": [self.u2.real, self.u2.imag],
            "u3": [self.u3.real, self.u3.imag],
            "u4": [self.u4.real, self.u4.imag],
            "real_period_s": self.real_period_s,
            "real_period_c": self.real_period_c,
            "real_period_d": self.real_period_d,
        }


def _algebraic_limit(u: ArrayLike, scalar: bool) -> GenJacobiPoint:
    # k1 = k2 = 1: k2' -> 0 and kappa -> 0, so sn(k2' u)/k2' -> u
    u = np.asarray(u, dtype=float)
    root = np.sqrt(1.0 + np.square(u))
    s, rest = u / root, 1.0 / root
    if scalar:
        return GenJacobiPoint(float(s), float(rest), float(rest), float(rest))
    return GenJacobiPoint(s, rest, rest.copy(), rest.copy())


def eval_all(u: ArrayLike, m: ModulusPair) -> GenJacobiPoint:
    """
    Evaluate s, c, d1, d2 on the real axis.

    At k1 = k2 = 1 the functions are algebraic: s = u / sqrt(1 + u^2)
    and c = d1 = d2 = 1 / sqrt(1 + u^2).

    Args:
        u: Real argument (float or numpy array)
        m: Moduli

    Returns:
        GenJacobiPoint with the shape of u
    """
    scalar = np.ndim(u) == 0
    if m.k2 == 1.0:
        return _algebraic_limit(u, scalar)
    k2p = m.k2p
    sn, cn, dn = jacobi_scd(k2p * np.asarray(u, dtype=float), m.kappa)
    root = np.sqrt(k2p * k2p + m.y * np.square(sn))

    s = sn / root
    c = k2p * cn / root
    d1 = k2p * dn / root
    d2 = k2p / root
    if scalar:
        return GenJacobiPoint(float(s), float(c), float(d1), float(d2))
    return GenJacobiPoint(s, c, d1, d2)


def quotient_form_d(u: ArrayLike, m: ModulusPair) -> Tuple[ArrayLike, ArrayLike]:
    """
    d1 and d2 from the uncancelled quotient representation.

        d1 = sqrt(k1^2 - k2^2) dn / sqrt(k1^2 - k2^2 dn^2)
        d2 = sqrt(k1^2 - k2^2) / sqrt(k1^2 - k2^2 dn^2)

    Loses accuracy as k1 - k2 shrinks; eval_all is the production path.

    Args:
        u: Real argument
        m: Moduli with k1 > k2

    Returns:
        Tuple (d1, d2)
    """
    if m.k1 <= m.k2:
        raise DomainError("Quotient form needs k1 > k2")
    _, _, dn = jacobi_scd(m.k2p * np.asarray(u, dtype=float), m.kappa)
    gap = math.sqrt((m.k1 - m.k2) * (m.k1 + m.k2))
    denom = np.sqrt(m.x - m.y * np.square(dn))
    d1, d2 = gap * dn / denom, gap / denom
    if np.ndim(u) == 0:
        return float(d1), float(d2)
    return d1, d2


def eval_derivatives(u: ArrayLike, m: ModulusPair) -> Tuple[ArrayLike, ArrayLike, ArrayLike, ArrayLike]:
    """
    First derivatives (s', c', d1', d2').

    s' = c d1 d2, c' = -s d1 d2, d1' = -k1^2 s c d2, d2' = -k2^2 s c d1.
    """
    s, c, d1, d2 = eval_all(u, m).as_tuple()
    return c * d1 * d2, -s * d1 * d2, -m.x * s * c * d2, -m.y * s * c * d1


def eval_second_derivatives(u: ArrayLike, m: ModulusPair) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    Second derivatives (s'', c'', d1'') as quintic polynomials in s, c, d1.

    s''  = -3k1^2k2^2 s^5 + 2(k1^2 + k2^2 + k1^2k2^2) s^3 - (1 + k1^2 + k2^2) s
    c''  = -3k1^2k2^2 c^5 - 2(k1^2 + k2^2 - 3k1^2k2^2) c^3 + (-1 + 2k1^2 + 2k2^2 - 3k1^2k2^2) c
    d1'' = -3(k2^2/k1^2) d1^5 - 2(1 + k2^2 - 3k2^2/k1^2) d1^3
           + (2 - k1^2 + 2k2^2 - 3k2^2/k1^2) d1

    The d1 polynomial divides by k1^2; at k1 = 0 the function d1 is
    constant and d1'' = 0 is returned.

    Args:
        u: Real argument
        m: Moduli

    Returns:
        Tuple (s'', c'', d1'')
    """
    s, c, d1, _ = eval_all(u, m).as_tuple()
    x, y = m.x, m.y
    p = x * y

    s2 = -3.0 * p * s**5 + 2.0 * (x + y + p) * s**3 - (1.0 + x + y) * s
    c2 = -3.0 * p * c**5 - 2.0 * (x + y - 3.0 * p) * c**3 + (-1.0 + 2.0 * x + 2.0 * y - 3.0 * p) * c
    if x == 0.0:
        d12 = 0.0 * d1
    else:
        r = y / x
        d12 = -3.0 * r * d1**5 - 2.0 * (1.0 + y - 3.0 * r) * d1**3 + (2.0 - x + 2.0 * y - 3.0 * r) * d1
    return s2, c2, d12


def eval_second_derivatives_all(
    u: ArrayLike, m: ModulusPair
) -> Tuple[ArrayLike, ArrayLike, ArrayLike, ArrayLike]:
    """
    Second derivatives of all four functions, written in s without division.

    s''/s   = -(1 + k1^2 + k2^2) + 2(k1^2 + k2^2 + k1^2k2^2) s^2 - 3k1^2k2^2 s^4
    c''/c   = -1 + 2(k1^2 + k2^2) s^2 - 3k1^2k2^2 s^4
    d1''/d1 = -k1^2 (1 - 2(1 + k2^2) s^2 + 3k2^2 s^4)
    d2''/d2 = -k2^2 (1 - 2(1 + k1^2) s^2 + 3k1^2 s^4)
    """
    s, c, d1, d2 = eval_all(u, m).as_tuple()
    return second_derivatives_from_point(GenJacobiPoint(s, c, d1, d2), m)


def second_derivatives_from_point(
    point: GenJacobiPoint, m: ModulusPair
) -> Tuple[ArrayLike, ArrayLike, ArrayLike, ArrayLike]:
    """Same as eval_second_derivatives_all for values already evaluated."""
    s, c, d1, d2 = point.as_tuple()
    x, y = m.x, m.y
    p = x * y
    s_sq = s * s
    s2 = s * (-(1.0 + x + y) + 2.0 * (x + y + p) * s_sq - 3.0 * p * s_sq * s_sq)
    c2 = c * (-1.0 + 2.0 * (x + y) * s_sq - 3.0 * p * s_sq * s_sq)
    d12 = -x * d1 * (1.0 - 2.0 * (1.0 + y) * s_sq + 3.0 * y * s_sq * s_sq)
    d22 = -y * d2 * (1.0 - 2.0 * (1.0 + x) * s_sq + 3.0 * x * s_sq * s_sq)
    return s2, c2, d12, d22


def real_periods(m: ModulusPair) -> Tuple[float, float]:
    """
    Real-axis periods (of s and c, of d1 and d2).

    Returns:
        (4K(kappa)/k2', 2K(kappa)/k2')

    Raises:
        DomainError: if k1 = 1 (kappa = 1, K diverges)
    """
    if m.k1 >= 1.0:
        raise DomainError("Real periods need k1 < 1")
    half = 2.0 * complete_K(m.kappa) / m.k2p
    return 2.0 * half, half


def branch_data(m: ModulusPair) -> BranchData:
    """
    Branch points u1..u4 and real periods.

    u1 = i w / k2' where cn(w, kappa') = k2 on [0, K(kappa')],
    u2 = -u1 + 2i K(kappa') / k2', u3 = u1 + 2K(kappa)/k2', u4 = u2 + 2K(kappa)/k2'.

    Args:
        m: Moduli with 0 < k2 < k1 < 1

    Returns:
        BranchData

    Raises:
        DomainError: on a degenerate lattice
    """
    if not 0.0 < m.k2 < m.k1 < 1.0:
        raise DomainError(
            f"Branch data needs 0 < k2 < k1 < 1, got k1={m.k1}, k2={m.k2}"
        )

    kappa_p = m.kappa_prime
    K_prime = complete_K(kappa_p)

    def cn_minus_k2(w: float) -> float:
        return jacobi_scd(w, kappa_p)[1] - m.k2

    # cn falls monotonically from 1 to 0 on [0, K']
    try:
        w = brentq(cn_minus_k2, 0.0, K_prime, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    except (ValueError, RuntimeError) as exc:
        raise ConvergenceError(f"Could not invert cn for the branch point: {exc}") from exc

    k2p = m.k2p
    period_s, period_d = real_periods(m)
    u1 = complex(0.0, w / k2p)
    u2 = -u1 + complex(0.0, 2.0 * K_prime / k2p)
    u3 = u1 + period_d
    u4 = u2 + period_d
    logger.debug(f"Branch points for k1={m.k1}, k2={m.k2}: u1={u1}, u2={u2}")
    return BranchData(u1, u2, u3, u4, period_s, period_s, period_d)


def amplitude(z: ArrayLike, m: ModulusPair, rtol: float = 1e-12, atol: float = 1e-12) -> ArrayLike:
    """
    Generalized amplitude t = a(z) with sin(a(z)) = s(z).

    Integrates dt/dz = sqrt((1 - k1^2 sin^2 t)(1 - k2^2 sin^2 t)), t(0) = 0,
    with DOP853. The amplitude is odd in z.

    Args:
        z: Real argument (float or array)
        m: Moduli
        rtol: Relative tolerance
        atol: Absolute tolerance

    Returns:
        Amplitude with the shape of z
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    x, y = m.x, m.y

    def rhs(_z, t):
        sin_sq = np.sin(t[0]) ** 2
        return [math.sqrt(max((1.0 - x * sin_sq) * (1.0 - y * sin_sq), 0.0))]

    magnitude = np.abs(z)
    z_end = float(magnitude.max())
    if z_end == 0.0:
        result = np.zeros_like(z)
    else:
        # t_eval must be strictly increasing
        unique, inverse = np.unique(magnitude, return_inverse=True)
        solution = solve_ivp(rhs, (0.0, z_end), [0.0], method="DOP853", t_eval=unique, rtol=rtol, atol=atol)
        if not solution.success:
            raise ConvergenceError(f"Amplitude integration failed: {solution.message}")
        result = np.sign(z) * solution.y[0][inverse.reshape(z.shape)]

    if scalar:
        return float(result[0])
    return result


def invert_hyperelliptic(y_value: float, m: ModulusPair) -> float:
    """
    The argument u with s(u) = y, by quadrature of the defining integral.

    Substituting t = sin(theta) removes the endpoint singularity:
    u = ∫_0^asin(y) dθ / sqrt((1 - k1^2 sin^2θ)(1 - k2^2 sin^2θ)).

    Args:
        y_value: Target value, -1 < y < 1
        m: Moduli

    Returns:
        u(y)

    Raises:
        DomainError: for |y| >= 1
    """
    y_value = float(y_value)
    if not -1.0 < y_value < 1.0:
        raise DomainError(f"Inversion needs -1 < y < 1, got {y_value}")
    x, y = m.x, m.y

    def integrand(theta: float) -> float:
        sin_sq = math.sin(theta) ** 2
        return 1.0 / math.sqrt((1.0 - x * sin_sq) * (1.0 - y * sin_sq))

    value, error = quad(integrand, 0.0, math.asin(y_value), epsabs=1e-14, epsrel=1e-13, limit=200)
    if error > 1e-10:
        raise ConvergenceError(f"Quadrature error estimate {error} too large at y={y_value}")
    return value
