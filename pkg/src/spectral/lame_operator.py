"""
The generalized Lamé operator in Schrödinger and algebraic form.

Schrödinger form on the real line:

    f''(z) + V(z) f(z) = -E f(z)
    V = (alpha k1^2k2^2 + beta k2^2) s^4 - (gamma k1^2 + delta k2^2 + lambda k1^2k2^2) s^2

Algebraic form in x = s^2, a Fuchsian equation with regular singular
points 0, 1, k1^-2, k2^-2 and infinity.
"""

import math
import time
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..elliptic.gen_jacobi import (
    GenJacobiPoint,
    ModulusPair,
    eval_all,
    real_periods,
    second_derivatives_from_point,
)
from ..utils.errors import DomainError
from ..utils.logger import get_logger, log_performance
from .catalog import FACTOR_NAMES, CatalogEntry, ParamVector, catalog, normalize_factors

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]
Exponents = Mapping[str, int]
Target = Union[CatalogEntry, Sequence[str], Callable[[np.ndarray], np.ndarray]]

DEFAULT_GRID_POINTS = 1001
DEFAULT_TOLERANCE = 1e-10
FD_STEP = 1e-3


def potential_from_s(s: ArrayLike, p: ParamVector, m: ModulusPair) -> ArrayLike:
    """V as a polynomial in s."""
    x, y = m.x, m.y
    s_sq = np.square(s)
    return (p.alpha * x * y + p.beta * y) * s_sq * s_sq - (p.gamma * x + p.delta * y + p.lam * x * y) * s_sq


def potential(z: ArrayLike, p: ParamVector, m: ModulusPair) -> ArrayLike:
    """
    Periodic potential V(z).

    Args:
        z: Real argument (float or array)
        p: Potential parameters
        m: Moduli

    Returns:
        V(z) with the shape of z
    """
    value = potential_from_s(eval_all(z, m).s, p, m)
    if np.ndim(z) == 0:
        return float(value)
    return value


def _exponents(factors: Union[Exponents, Iterable[str]]) -> Dict[str, int]:
    if isinstance(factors, Mapping):
        exponents = {name: int(power) for name, power in factors.items() if power}
        unknown = [name for name in exponents if name not in FACTOR_NAMES]
        if unknown or any(power < 0 for power in exponents.values()):
            raise DomainError(f"Invalid factor exponents: {dict(factors)}")
        return exponents
    return {name: 1 for name in normalize_factors(factors)}


def _power_derivatives(g, g1, g2, power: int):
    """Value, first and second derivative of g**power."""
    if power == 1:
        return g, g1, g2
    value = g**power
    first = power * g ** (power - 1) * g1
    second = power * (power - 1) * g ** (power - 2) * g1 * g1 + power * g ** (power - 1) * g2
    return value, first, second


def _combine(parts):
    """Product rule over a list of (value, first, second) triples."""
    f, f1, f2 = 1.0, 0.0, 0.0
    for g, g1, g2 in parts:
        f, f1, f2 = f * g, f1 * g + f * g1, f2 * g + 2.0 * f1 * g1 + f * g2
    return f, f1, f2


def product_derivatives(
    factors: Union[Exponents, Iterable[str]], point: GenJacobiPoint, m: ModulusPair
) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    Value, first and second derivative of a monomial in s, c, d1, d2.

    Derivatives come from the closed first- and second-derivative
    formulas of the generalized functions, combined by the product rule.

    Args:
        factors: Factor names (each to the first power) or a mapping of
            factor name to non-negative integer exponent
        point: Function values at the evaluation points
        m: Moduli

    Returns:
        Tuple (f, f', f'')
    """
    exponents = _exponents(factors)
    s, c, d1, d2 = point.as_tuple()
    values = {"s": s, "c": c, "d1": d1, "d2": d2}
    firsts = {"s": c * d1 * d2, "c": -s * d1 * d2, "d1": -m.x * s * c * d2, "d2": -m.y * s * c * d1}
    seconds = dict(zip(FACTOR_NAMES, second_derivatives_from_point(point, m)))

    parts = [
        _power_derivatives(values[name], firsts[name], seconds[name], power)
        for name, power in exponents.items()
    ]
    f, f1, f2 = _combine(parts)
    if np.ndim(s) == 0:
        return float(f), float(f1), float(f2)
    # an empty product stays scalar
    return tuple(np.broadcast_to(v, np.shape(s)).astype(float) for v in (f, f1, f2))


def eigenfunction_values(
    entry: CatalogEntry, z: ArrayLike, m: ModulusPair
) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Catalog eigenfunction and its first two derivatives at z."""
    return product_derivatives(entry.factors, eval_all(np.asarray(z, dtype=float), m), m)


def real_period_grid(m: ModulusPair, count: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Uniform grid over one real period 4K(kappa)/k2' of s and c, endpoints included."""
    if count < 2:
        raise DomainError(f"Grid needs at least 2 points, got {count}")
    period, _ = real_periods(m)
    return np.linspace(0.0, period, count)


def _finite_difference(func: Callable[[np.ndarray], np.ndarray], z: np.ndarray, h: float):
    f = np.asarray(func(z), dtype=float)
    f_plus = np.asarray(func(z + h), dtype=float)
    f_minus = np.asarray(func(z - h), dtype=float)
    return f, (f_plus - 2.0 * f + f_minus) / (h * h)


def schrodinger_residual(
    target: Target,
    E: float,
    m: ModulusPair,
    grid: Sequence[float],
    params: Optional[ParamVector] = None,
    fd_step: float = FD_STEP,
) -> float:
    """
    Normalized residual max|f'' + V f + E f| / max|f| over a grid.

    Args:
        target: A CatalogEntry (its own parameters and factors), a tuple
            of factor names, or a vectorized callable f(z)
        E: Spectral parameter
        m: Moduli
        grid: Real evaluation points
        params: Potential parameters; required unless target is a CatalogEntry
        fd_step: Step of the second central difference for callables

    Returns:
        Normalized maximum residual

    Raises:
        DomainError: for an empty grid, a vanishing f or missing parameters
    """
    z = np.asarray(grid, dtype=float)
    if z.size == 0:
        raise DomainError("Residual grid is empty")

    if isinstance(target, CatalogEntry):
        params = target.params if params is None else params
        target = target.factors
    if params is None:
        raise DomainError("Potential parameters are required for this target")

    V = potential(z, params, m)
    if callable(target):
        f, f2 = _finite_difference(target, z, fd_step)
    else:
        f, _, f2 = product_derivatives(target, eval_all(z, m), m)

    scale = float(np.max(np.abs(f)))
    if scale == 0.0:
        raise DomainError("Function vanishes on the whole grid")
    return float(np.max(np.abs(f2 + (V + E) * f))) / scale


def verify_catalog(
    m: ModulusPair,
    count: int = DEFAULT_GRID_POINTS,
    tolerance: float = DEFAULT_TOLERANCE,
    energy_shift: float = 0.0,
) -> list:
    """
    Residual check of every catalog entry over one real period.

    Args:
        m: Moduli with k1 < 1
        count: Grid points
        tolerance: Pass threshold on the normalized residual
        energy_shift: Added to every catalog energy

    Returns:
        List of dicts with entry, energy, residual and passed flag
    """
    start_time = time.time()
    grid = real_period_grid(m, count)
    report = []
    for entry in catalog():
        energy = entry.energy(m) + energy_shift
        residual = schrodinger_residual(entry, energy, m, grid)
        passed = residual < tolerance
        if not passed:
            logger.warning(f"Entry {entry.params.label()} fails: residual {residual:.3e}")
        report.append({"entry": entry, "energy": energy, "residual": residual, "passed": passed})

    log_performance(
        logger,
        "Catalog verification",
        start_time,
        time.time(),
        entries=len(report),
        passed=sum(row["passed"] for row in report),
    )
    return report


# Algebraic form


def singular_points(m: ModulusPair) -> Tuple[float, float, float, float]:
    """Finite regular singular points 0, 1, k1^-2, k2^-2 of the algebraic form."""
    if m.k1 * m.k2 == 0.0:
        raise DomainError("Algebraic form needs k1 k2 > 0")
    return 0.0, 1.0, 1.0 / m.x, 1.0 / m.y


def algebraic_coefficients(p: ParamVector, m: ModulusPair) -> Tuple[float, float]:
    """A = alpha + beta k1^-2 and B = gamma k2^-2 + delta k1^-2 + lambda."""
    singular_points(m)
    return p.alpha + p.beta / m.x, p.gamma / m.y + p.delta / m.x + p.lam


def algebraic_residual(
    x: float,
    p: ParamVector,
    E: float,
    m: ModulusPair,
    f: float,
    f1: float,
    f2: float,
) -> float:
    """
    Left side of the algebraic form at x.

        f'' + (1/2)(1/x + 1/(x-1) + 1/(x-a) + 1/(x-b)) f'
            - (E ab + A x^2 - B x) / (4 x (x-1)(x-a)(x-b)) f

    with a = k1^-2, b = k2^-2.

    Args:
        x: Point, not a singular point
        p: Potential parameters
        E: Spectral parameter
        m: Moduli with k1 k2 > 0
        f, f1, f2: Function value and first two x-derivatives

    Returns:
        Residual
    """
    _, _, a, b = singular_points(m)
    for point in (0.0, 1.0, a, b):
        if math.isclose(x, point, rel_tol=1e-14, abs_tol=1e-14):
            raise DomainError(f"x={x} is a singular point of the algebraic form")

    A, B = algebraic_coefficients(p, m)
    drift = 0.5 * (1.0 / x + 1.0 / (x - 1.0) + 1.0 / (x - a) + 1.0 / (x - b))
    reaction = (E * a * b + A * x * x - B * x) / (4.0 * x * (x - 1.0) * (x - a) * (x - b))
    return f2 + drift * f1 - reaction * f


_LINEAR_FORMS = {
    # factor = sqrt(offset + slope * x) as a function of x = s^2
    "s": lambda m: (0.0, 1.0),
    "c": lambda m: (1.0, -1.0),
    "d1": lambda m: (1.0, -m.x),
    "d2": lambda m: (1.0, -m.y),
}


def algebraic_form(
    factors: Union[CatalogEntry, Iterable[str]], x: ArrayLike, m: ModulusPair
) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    A product of generalized Jacobi functions written in x = s^2.

    Each factor is the positive square root of a linear function of x.

    Args:
        factors: CatalogEntry or factor names
        x: Point(s) in (0, 1)
        m: Moduli

    Returns:
        Tuple (f, df/dx, d2f/dx2)
    """
    if isinstance(factors, CatalogEntry):
        factors = factors.factors
    x = np.asarray(x, dtype=float)
    parts = []
    for name in normalize_factors(factors):
        offset, slope = _LINEAR_FORMS[name](m)
        g = np.sqrt(offset + slope * x)
        parts.append((g, slope / (2.0 * g), -slope * slope / (4.0 * g**3)))
    f, f1, f2 = _combine(parts)
    if np.ndim(x) == 0:
        return float(f), float(f1), float(f2)
    return f, f1, f2


def catalog_algebraic_residual(entry: CatalogEntry, x: float, m: ModulusPair) -> float:
    """Algebraic-form residual of a catalog eigenpair at x, relative to |f(x)|."""
    f, f1, f2 = algebraic_form(entry, x, m)
    return abs(algebraic_residual(x, entry.params, entry.energy(m), m, f, f1, f2)) / abs(f)
