"""
Generalized Ince equation and its Fourier recurrences.

With the amplitude substitution s = sin t the Schrödinger form becomes

    (1 + a1 cos 2t + a2 cos 4t) g'' + (b1 sin 2t + b2 sin 4t) g'
        + (cc + p1 cos 2t + p2 cos 4t) g = 0

for g = f (standard transform) or g = f / d1, f / d2 (shifted
transforms). Inserting one of the four Fourier ansatzes gives a
pentadiagonal recurrence whose truncations yield characteristic values
and whose vanishing rows and columns yield the polynomial eigenpairs.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..elliptic.gen_jacobi import ModulusPair
from ..utils.errors import ConvergenceError, DomainError
from ..utils.logger import LoggerMixin, get_logger, log_performance
from . import symbolic
from .catalog import CatalogEntry, FourierClass, ParamVector, normalize_factors, sort_key
from .lame_operator import real_period_grid, schrodinger_residual

logger = get_logger(__name__)

MIN_TRUNCATION = 5
DEFAULT_TRUNCATION = 64
MAX_TRUNCATION = 512
CONVERGENCE_TOLERANCE = 1e-8
DEFAULT_SCAN_INDEX = 5
LAYOUTS = ("derived", "printed")

# Moduli at which discovered eigenpairs are matched to a factor set
IDENTIFICATION_MODULI = (0.8, 0.3)


class Transform(Enum):
    """Which factor is split off before the amplitude substitution."""

    STANDARD = "standard"  # g = f
    D1_SHIFTED = "d1_shifted"  # f = d1 g
    D2_SHIFTED = "d2_shifted"  # f = d2 g

    @classmethod
    def from_label(cls, label: str) -> "Transform":
        for member in cls:
            if member.value == label.lower().replace("-", "_"):
                return member
        raise DomainError(f"Unknown transform: {label}")


@dataclass(frozen=True)
class InceCoefficients:
    """
    Coefficients of the generalized Ince equation.

    p1, p2 are the cos 2t and cos 4t coefficients of g. In numerator
    form (see ince_numerators) every field is multiplied by denom.
    """

    a1: float
    a2: float
    b1: float
    b2: float
    cc: float
    p1: float
    p2: float
    denom: float
    transform: Transform = Transform.STANDARD

    def to_dict(self) -> Dict[str, float]:
        return {
            "a1": self.a1,
            "a2": self.a2,
            "b1": self.b1,
            "b2": self.b2,
            "cc": self.cc,
            "p1": self.p1,
            "p2": self.p2,
            "denom": self.denom,
            "transform": self.transform.value,
        }


def ince_numerators(x, y, params: Sequence, energy, transform: Transform) -> InceCoefficients:
    """
    Ince coefficients times the common denominator 2 - k1^2 - k2^2 + 3/4 k1^2 k2^2.

    Pure arithmetic, so x, y, params and energy may be floats or sympy
    expressions.

    Args:
        x: k1^2
        y: k2^2
        params: (alpha, beta, gamma, delta, lambda)
        energy: E
        transform: Which transform

    Returns:
        InceCoefficients holding numerators, with denom the denominator
    """
    alpha, beta, gamma, delta, lam = params
    p = x * y
    denom = 2 - x - y + 3 * p / 4
    a1 = x + y - p
    a2 = p / 4

    if transform is Transform.STANDARD:
        b1 = -a1
        b2 = -2 * a2
        cc = 2 * energy - gamma * x + (3 * beta / 4 - delta) * y + (3 * alpha / 4 - lam) * p
        p1 = gamma * x + (delta - beta) * y + (lam - alpha) * p
        p2 = (alpha * p + beta * y) / 4
    else:
        b2 = -4 * a2
        cc = (
            2 * energy
            - gamma * x
            + (3 * beta / 4 - delta) * y
            + (2 - lam + 3 * (alpha - 3) / 4) * p
        )
        p2 = (beta * y + (alpha - 3) * p) / 4
        if transform is Transform.D1_SHIFTED:
            b1 = -3 * x - y + 2 * p
            p1 = (gamma - 2) * x + (delta - beta) * y + (lam - alpha + 1) * p
        else:
            b1 = -x - 3 * y + 2 * p
            p1 = gamma * x + (delta - 2 - beta) * y + (lam - alpha + 1) * p

    return InceCoefficients(a1, a2, b1, b2, cc, p1, p2, denom, transform)


def ince_coefficients(
    p: ParamVector, E: float, m: ModulusPair, transform: Transform = Transform.STANDARD
) -> InceCoefficients:
    """
    Generalized Ince coefficients for a potential and spectral parameter.

    Args:
        p: Potential parameters
        E: Spectral parameter
        m: Moduli
        transform: Which transform

    Returns:
        InceCoefficients
    """
    num = ince_numerators(m.x, m.y, p.as_tuple(), E, transform)
    if not num.denom > 0.0:
        raise DomainError(f"Ince denominator {num.denom} is not positive")
    d = num.denom
    return InceCoefficients(
        num.a1 / d, num.a2 / d, num.b1 / d, num.b2 / d, num.cc / d, num.p1 / d, num.p2 / d, d, transform
    )


def c_to_energy(
    cc: float, p: ParamVector, m: ModulusPair, transform: Transform = Transform.STANDARD
) -> float:
    """Invert the affine map E -> cc."""
    num = ince_numerators(m.x, m.y, p.as_tuple(), 0.0, transform)
    return (cc * num.denom - num.cc) / 2.0


def q_poly(i: int, mu, co: InceCoefficients):
    """Q_i(mu) = 2 a_i mu^2 - b_i mu - p_i / 2."""
    a, b, p = _band(i, co)
    return 2 * a * mu * mu - b * mu - p / 2


def qstar_poly(i: int, mu, co: InceCoefficients):
    """Q*_i(mu) = a_i (2mu - 1)^2 - b_i (2mu - 1) - p_i."""
    a, b, p = _band(i, co)
    nu = 2 * mu - 1
    return a * nu * nu - b * nu - p


def _band(i: int, co: InceCoefficients):
    if i == 1:
        return co.a1, co.b1, co.p1
    if i == 2:
        return co.a2, co.b2, co.p2
    raise DomainError(f"Band index must be 1 or 2, got {i}")


def band_entries(
    fclass: FourierClass, co: InceCoefficients, size: int, one=1, layout: str = "derived"
) -> Dict[Tuple[int, int], object]:
    """
    Nonzero entries of the size x size truncated recurrence matrix.

    Column j holds the equations fed by the j-th Fourier mode. Negative
    frequencies are folded back with sign +1 for cosines and -1 for
    sines; sin(0) terms drop out.

    Args:
        fclass: Fourier class
        co: Coefficients (numeric or numerator form)
        size: Truncation order
        one: Unit multiplying the mode-squared diagonal term (denom in
            numerator form)
        layout: "derived" or "printed"

    Returns:
        Mapping (row, column) -> entry
    """
    if layout not in LAYOUTS:
        raise DomainError(f"Unknown matrix layout: {layout}")
    entries: Dict[Tuple[int, int], object] = {}
    sign = -1 if fclass.is_sine else 1

    def add(row: int, col: int, value):
        if 0 <= row < size:
            entries[(row, col)] = entries.get((row, col), 0) + value

    if fclass.is_pi_periodic:
        offset = 1 if fclass is FourierClass.ODD_PI else 0
        for col in range(size):
            n = col + offset
            add(col, col, 4 * n * n * one - co.cc)
            for shift in (1, 2):
                for target, mu in ((n + shift, n), (n - shift, -n)):
                    value = q_poly(shift, mu, co)
                    if target < 0:
                        target, value = -target, sign * value
                    if target == 0 and fclass.is_sine:
                        continue
                    add(target - offset, col, value)
        if layout == "printed" and fclass is FourierClass.EVEN_PI:
            # column 0 as tabulated, without the doubling from folding
            for row, i in ((1, 1), (2, 2)):
                if row < size:
                    entries[(row, 0)] = q_poly(i, 0, co)
    else:
        for col in range(size):
            n = col
            add(col, col, 2 * (2 * n + 1) ** 2 * one - 2 * co.cc)
            for shift in (1, 2):
                for target, mu in ((n + shift, n + 1), (n - shift, -n)):
                    value = qstar_poly(shift, mu, co)
                    if target < 0:
                        target, value = -target - 1, sign * value
                    add(target, col, value)
    return entries


def recurrence_matrix(
    fclass: FourierClass, co: InceCoefficients, N: int, layout: str = "derived"
) -> np.ndarray:
    """
    N x N truncation of the pentadiagonal Fourier recurrence.

    Diagonal entries are 4n^2 - cc for the period-pi classes and
    2(2n+1)^2 - 2cc for the period-2pi classes.

    Args:
        fclass: Fourier class
        co: Numeric Ince coefficients
        N: Truncation order, at least 5
        layout: "derived" (folded, used for spectra) or "printed"

    Returns:
        Dense N x N array
    """
    if N < MIN_TRUNCATION:
        raise DomainError(f"Truncation order must be at least {MIN_TRUNCATION}, got {N}")
    matrix = np.zeros((N, N))
    for (row, col), value in band_entries(fclass, co, N, layout=layout).items():
        matrix[row, col] = value
    return matrix


class HillSpectrumSolver:
    """Characteristic energies from growing truncations of the recurrence matrices."""

    def __init__(
        self,
        m: ModulusPair,
        transform: Transform = Transform.STANDARD,
        tolerance: float = CONVERGENCE_TOLERANCE,
        max_truncation: int = MAX_TRUNCATION,
        layout: str = "derived",
    ):
        """
        Initialize the solver.

        Args:
            m: Moduli
            transform: Ince transform used to build the matrices
            tolerance: Largest change of any returned energy when N doubles
            max_truncation: Truncation cap
            layout: Matrix layout
        """
        self.m = m
        self.transform = transform
        self.tolerance = tolerance
        self.max_truncation = max_truncation
        self.layout = layout
        self.logger = get_logger(__name__)

    def _lowest_energies(self, fclass: FourierClass, p: ParamVector, N: int, count: int) -> np.ndarray:
        co = replace(ince_coefficients(p, 0.0, self.m, self.transform), cc=0.0)
        unit = 1.0 if fclass.is_pi_periodic else 2.0
        values = linalg.eigvals(recurrence_matrix(fclass, co, N, self.layout) / unit)
        values = values[np.argsort(values.real)][:count]

        scale = np.maximum(1.0, np.abs(values.real))
        if np.any(np.abs(values.imag) > self.tolerance * scale):
            raise ConvergenceError(
                f"Complex characteristic values for {fclass.value} at N={N}: {values}"
            )
        return np.array([c_to_energy(c, p, self.m, self.transform) for c in values.real])

    def energies(
        self, fclass: FourierClass, p: ParamVector, count: int, N: int = DEFAULT_TRUNCATION
    ) -> List[float]:
        """
        Lowest characteristic energies of one Fourier class.

        Doubles N until every returned energy changes by less than the
        tolerance.

        Args:
            fclass: Fourier class
            p: Potential parameters
            count: Number of energies
            N: Starting truncation, at least 2 count + 8

        Returns:
            Energies in ascending order
        """
        if count < 1:
            raise DomainError(f"Count must be positive, got {count}")
        if N < 2 * count + 8:
            raise DomainError(f"Truncation N={N} too small for {count} energies (need {2 * count + 8})")

        current = self._lowest_energies(fclass, p, N, count)
        while True:
            if 2 * N > self.max_truncation:
                raise ConvergenceError(
                    f"{fclass.value} energies not converged below N={self.max_truncation}"
                )
            refined = self._lowest_energies(fclass, p, 2 * N, count)
            change = float(np.max(np.abs(refined - current)))
            self.logger.debug(f"{fclass.value}: N={N} -> {2 * N}, max change {change:.2e}")
            if change < self.tolerance:
                return [float(e) for e in refined]
            current, N = refined, 2 * N

    def spectrum(
        self,
        p: ParamVector,
        count: int,
        N: int = DEFAULT_TRUNCATION,
        classes: Optional[Iterable[FourierClass]] = None,
        workers: Optional[int] = None,
    ) -> Dict[FourierClass, List[float]]:
        """
        Lowest energies of several classes, one worker per class.

        Args:
            p: Potential parameters
            count: Energies per class
            N: Starting truncation
            classes: Classes to compute (default: all four)
            workers: Thread pool size (default: one per class)

        Returns:
            Mapping class -> energies, in class declaration order
        """
        classes = list(classes) if classes is not None else list(FourierClass)
        start_time = time.time()
        with ThreadPoolExecutor(max_workers=workers or len(classes)) as pool:
            futures = {fc: pool.submit(self.energies, fc, p, count, N) for fc in classes}
            result = {fc: futures[fc].result() for fc in classes}
        log_performance(
            self.logger,
            "Hill spectrum",
            start_time,
            time.time(),
            params=p.label(),
            classes=len(classes),
            transform=self.transform.value,
        )
        return result


def hill_eigen_energies(
    fclass: FourierClass,
    p: ParamVector,
    m: ModulusPair,
    transform: Transform = Transform.STANDARD,
    N: int = DEFAULT_TRUNCATION,
    count: int = 4,
) -> List[float]:
    """Lowest `count` characteristic energies of a Fourier class; see HillSpectrumSolver.energies."""
    return HillSpectrumSolver(m, transform).energies(fclass, p, count, N)


@dataclass(frozen=True)
class CoexistenceReport:
    """Outcome of the coexistence test for one Fourier class."""

    fourier_class: FourierClass
    transform: Transform
    mu: Optional[float]
    integral: bool
    degenerate: bool
    conditions: Tuple[float, ...]
    coexistence_possible: bool
    verdict: str

    def to_dict(self) -> Dict[str, object]:
        return {
            "class": self.fourier_class.value,
            "transform": self.transform.value,
            "mu": self.mu,
            "integral": self.integral,
            "degenerate": self.degenerate,
            "conditions": list(self.conditions),
            "coexistence_possible": self.coexistence_possible,
            "verdict": self.verdict,
        }


def coexistence_conditions(
    fclass: FourierClass, co: InceCoefficients, tolerance: float = 1e-12
) -> CoexistenceReport:
    """
    Whether two independent periodic solutions of one class can coexist.

    Coexistence needs Q1(mu) = Q2(mu) = Q2(mu - 1) = 0 (Q* for the
    period-2pi classes) at an integer mu. The last two force
    b2 = 2 a2 (2mu - 1), respectively b2 = 4 a2 (mu - 1), which fixes mu.

    Args:
        fclass: Fourier class
        co: Numeric Ince coefficients
        tolerance: Threshold for integrality and for vanishing conditions

    Returns:
        CoexistenceReport
    """
    if abs(co.a2) <= tolerance:
        return CoexistenceReport(
            fclass,
            co.transform,
            None,
            False,
            True,
            (),
            False,
            "a2 = 0: three-term Ince limit (k1 k2 = 0), mu is not fixed by b2",
        )

    if fclass.is_pi_periodic:
        mu = (co.b2 / (2.0 * co.a2) + 1.0) / 2.0
        poly = q_poly
    else:
        mu = 1.0 + co.b2 / (4.0 * co.a2)
        poly = qstar_poly

    integral = abs(mu - round(mu)) <= tolerance
    if not integral:
        return CoexistenceReport(
            fclass, co.transform, mu, False, False, (), False, f"mu = {mu:g} is not an integer"
        )

    mu_int = round(mu)
    conditions = (poly(1, mu_int, co), poly(2, mu_int, co), poly(2, mu_int - 1, co))
    possible = all(abs(v) <= tolerance for v in conditions)
    verdict = (
        f"mu = {mu_int}: conditions vanish, coexistence possible"
        if possible
        else f"mu = {mu_int}: conditions do not all vanish"
    )
    return CoexistenceReport(fclass, co.transform, float(mu_int), True, False, conditions, possible, verdict)


@dataclass(frozen=True)
class VanishingSolution:
    """An eigenpair found from a vanishing row or column of a recurrence matrix."""

    params: ParamVector
    energy_coeffs: Tuple[int, int, int]
    fourier_class: FourierClass
    which: str  # "row" or "column"
    index: int
    transform: Transform

    @property
    def key(self) -> Tuple[Tuple[float, ...], Tuple[int, int, int]]:
        return self.params.as_tuple(), self.energy_coeffs

    def energy(self, m: ModulusPair) -> float:
        e0, e1, e2 = self.energy_coeffs
        return e0 + e1 * m.x + e2 * m.y

    def to_dict(self) -> Dict[str, object]:
        return {
            **self.params.to_dict(),
            "energy_coeffs": list(self.energy_coeffs),
            "class": self.fourier_class.value,
            "which": self.which,
            "index": self.index,
            "transform": self.transform.value,
        }


class VanishingEnumerator(LoggerMixin):
    """Finds every parameter tuple for which a row or column of a recurrence matrix vanishes identically."""

    def __init__(self, max_index: int = DEFAULT_SCAN_INDEX, box: Tuple[int, int] = symbolic.DEFAULT_BOX):
        """
        Initialize the enumerator.

        Args:
            max_index: Rows and columns with index below this are scanned
            box: Inclusive integer range for the potential parameters
        """
        self.max_index = max_index
        self.box = box

    def _numerators(self, transform: Transform) -> InceCoefficients:
        return ince_numerators(
            symbolic.X, symbolic.Y, symbolic.PARAM_SYMBOLS, symbolic.energy_expression(), transform
        )

    def scan(self, transform: Transform, fclass: FourierClass) -> List[VanishingSolution]:
        """All vanishing rows and columns of one class below max_index."""
        co = self._numerators(transform)
        entries = band_entries(fclass, co, self.max_index + 2, one=co.denom)
        found = []
        for which in ("row", "column"):
            for index in range(self.max_index):
                axis = 0 if which == "row" else 1
                line = [value for key, value in entries.items() if key[axis] == index]
                solution = symbolic.solve_identities(line)
                if solution is None:
                    continue
                for point in symbolic.integer_solutions(solution, self.box):
                    if point.is_trivial():
                        continue
                    self.logger.debug(
                        f"{transform.value} {fclass.value} {which} {index}: "
                        f"{point.params.label()} E={point.energy_coeffs}"
                    )
                    found.append(
                        VanishingSolution(
                            point.params, point.energy_coeffs, fclass, which, index, transform
                        )
                    )
        return found

    def enumerate(self, transform: Transform) -> List[VanishingSolution]:
        """Vanishing solutions over all four classes of one transform, deduplicated."""
        start_time = time.time()
        seen, result = set(), []
        for fclass in FourierClass:
            for solution in self.scan(transform, fclass):
                if solution.key not in seen:
                    seen.add(solution.key)
                    result.append(solution)
        log_performance(
            self.logger,
            "Vanishing enumeration",
            start_time,
            time.time(),
            transform=transform.value,
            solutions=len(result),
        )
        return result


@lru_cache(maxsize=None)
def _cached_enumeration(transform: Transform, max_index: int, box: Tuple[int, int]):
    return tuple(VanishingEnumerator(max_index, box).enumerate(transform))


def enumerate_vanishing_solutions(
    transform: Transform = Transform.STANDARD,
    box: Tuple[int, int] = symbolic.DEFAULT_BOX,
    max_index: int = DEFAULT_SCAN_INDEX,
) -> List[VanishingSolution]:
    """
    Eigenpairs from vanishing rows and columns, solved as identities in k1, k2.

    Args:
        transform: Ince transform
        box: Inclusive integer range for alpha, beta, gamma, delta, lambda
        max_index: Rows and columns with index below this are scanned

    Returns:
        Deduplicated list of VanishingSolution
    """
    if box[0] > box[1]:
        return []
    return list(_cached_enumeration(transform, max_index, tuple(box)))


_CLASS_FACTORS = {
    FourierClass.EVEN_PI: (),
    FourierClass.ODD_PI: ("s", "c"),
    FourierClass.ODD_2PI: ("s",),
    FourierClass.EVEN_2PI: ("c",),
}


def identify_eigenfunction(
    params: ParamVector,
    energy_coeffs: Tuple[int, int, int],
    fclass: FourierClass,
    m: Optional[ModulusPair] = None,
    tolerance: float = 1e-8,
) -> Tuple[str, ...]:
    """
    Factor set of the eigenfunction of a discovered eigenpair.

    The class fixes the s and c content; each of the four d-subsets is
    tried and the one with a vanishing Schrödinger residual is returned.

    Args:
        params: Potential parameters
        energy_coeffs: (e0, e1, e2)
        fclass: Fourier class of the solution
        m: Moduli for the residual test
        tolerance: Residual threshold

    Returns:
        Factor names in s, c, d1, d2 order

    Raises:
        DomainError: if no candidate satisfies the equation
    """
    m = m or ModulusPair(*IDENTIFICATION_MODULI)
    e0, e1, e2 = energy_coeffs
    energy = e0 + e1 * m.x + e2 * m.y
    grid = real_period_grid(m, 201)

    best, best_residual = None, math.inf
    for extra in ((), ("d1",), ("d2",), ("d1", "d2")):
        factors = normalize_factors(_CLASS_FACTORS[fclass] + extra)
        residual = schrodinger_residual(factors, energy, m, grid, params=params)
        if residual < best_residual:
            best, best_residual = factors, residual
    if best_residual > tolerance:
        raise DomainError(
            f"No product eigenfunction for {params.label()} in class {fclass.value} "
            f"(best residual {best_residual:.2e})"
        )
    return best


def vanishing_catalog(
    transforms: Iterable[Transform] = (Transform.STANDARD, Transform.D1_SHIFTED),
    box: Tuple[int, int] = symbolic.DEFAULT_BOX,
) -> List[CatalogEntry]:
    """
    Union of the vanishing solutions of several transforms, with identified eigenfunctions.

    Returns:
        CatalogEntry list sorted by alpha, then eigenfunction factors
    """
    seen, entries = set(), []
    for transform in transforms:
        for solution in enumerate_vanishing_solutions(transform, box):
            if solution.key in seen:
                continue
            seen.add(solution.key)
            factors = identify_eigenfunction(solution.params, solution.energy_coeffs, solution.fourier_class)
            entries.append(CatalogEntry(solution.params, solution.energy_coeffs, factors))
    return sorted(entries, key=sort_key)
