"""
The fifteen polynomial eigenpairs of the generalized Lamé equation.

Each entry fixes the potential parameters (alpha, beta, gamma, delta,
lambda), the eigenvalue E = e0 + e1 k1^2 + e2 k2^2 and the factors of
the eigenfunction, a product drawn from {s, c, d1, d2}.
"""

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Sequence, Tuple

from ..elliptic.gen_jacobi import ModulusPair
from ..utils.errors import DomainError

FACTOR_NAMES = ("s", "c", "d1", "d2")
CSV_COLUMNS = ["alpha", "beta", "gamma", "delta", "lambda", "e0", "e1", "e2", "factors"]


class FourierClass(Enum):
    """Fourier ansatz of a periodic solution in the amplitude variable t."""

    EVEN_PI = "EvenPi"  # cos(2nt)
    ODD_PI = "OddPi"  # sin(2nt)
    ODD_2PI = "Odd2Pi"  # sin((2n+1)t)
    EVEN_2PI = "Even2Pi"  # cos((2n+1)t)

    @property
    def is_pi_periodic(self) -> bool:
        return self in (FourierClass.EVEN_PI, FourierClass.ODD_PI)

    @property
    def is_sine(self) -> bool:
        return self in (FourierClass.ODD_PI, FourierClass.ODD_2PI)

    @classmethod
    def from_label(cls, label: str) -> "FourierClass":
        for member in cls:
            if member.value.lower() == label.lower():
                return member
        raise DomainError(f"Unknown Fourier class: {label}")


@dataclass(frozen=True)
class ParamVector:
    """Potential parameters of V = (alpha k1^2k2^2 + beta k2^2) s^4 - (gamma k1^2 + delta k2^2 + lambda k1^2k2^2) s^2."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    lam: float

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return self.alpha, self.beta, self.gamma, self.delta, self.lam

    def is_integral(self) -> bool:
        return all(float(v).is_integer() for v in self.as_tuple())

    def label(self) -> str:
        return "(" + ",".join(_format_number(v) for v in self.as_tuple()) + ")"

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "ParamVector":
        if len(values) != 5:
            raise DomainError(f"Expected 5 potential parameters, got {len(values)}")
        return cls(*(float(v) for v in values))

    def to_dict(self) -> Dict[str, float]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "delta": self.delta,
            "lambda": self.lam,
        }


@dataclass(frozen=True)
class CatalogEntry:
    """One polynomial eigenpair: parameters, eigenvalue coefficients, eigenfunction factors."""

    params: ParamVector
    energy_coeffs: Tuple[int, int, int]
    factors: Tuple[str, ...]

    def energy(self, m: ModulusPair) -> float:
        """E = e0 + e1 k1^2 + e2 k2^2."""
        e0, e1, e2 = self.energy_coeffs
        return e0 + e1 * m.x + e2 * m.y

    @property
    def factor_label(self) -> str:
        return "*".join(self.factors)

    @property
    def fourier_class(self) -> FourierClass:
        return fourier_class_of(self.factors)

    def to_dict(self) -> Dict[str, object]:
        record = {key: _plain(value) for key, value in self.params.to_dict().items()}
        record.update(zip(("e0", "e1", "e2"), self.energy_coeffs))
        record["factors"] = self.factor_label
        return record


def _plain(value: float):
    return int(value) if float(value).is_integer() else value


def _format_number(value: float) -> str:
    return str(_plain(value))


def _entry(params, energy, factors) -> CatalogEntry:
    return CatalogEntry(ParamVector(*params), tuple(energy), tuple(factors))


# Order as conventionally tabulated: the four single factors, the six
# pairs, the four triples, then the full product.
_CATALOG: Tuple[CatalogEntry, ...] = (
    _entry((3, 0, 2, 2, 2), (1, 1, 1), ("s",)),
    _entry((3, 0, 2, 2, 0), (1, 0, 0), ("c",)),
    _entry((3, 0, 2, 0, 2), (0, 1, 0), ("d1",)),
    _entry((3, 0, 0, 2, 2), (0, 0, 1), ("d2",)),
    _entry((8, 0, 6, 6, 2), (4, 1, 1), ("s", "c")),
    _entry((8, 0, 2, 2, 6), (0, 1, 1), ("d1", "d2")),
    _entry((8, 0, 6, 2, 6), (1, 4, 1), ("s", "d1")),
    _entry((8, 0, 2, 6, 6), (1, 1, 4), ("s", "d2")),
    _entry((8, 0, 6, 2, 2), (1, 1, 0), ("c", "d1")),
    _entry((8, 0, 2, 6, 2), (1, 0, 1), ("c", "d2")),
    _entry((15, 0, 6, 6, 6), (1, 1, 1), ("c", "d1", "d2")),
    _entry((15, 0, 12, 6, 6), (4, 4, 1), ("s", "c", "d1")),
    _entry((15, 0, 6, 12, 6), (4, 1, 4), ("s", "c", "d2")),
    _entry((15, 0, 6, 6, 12), (1, 4, 4), ("s", "d1", "d2")),
    _entry((24, 0, 12, 12, 12), (4, 4, 4), ("s", "c", "d1", "d2")),
)


def catalog() -> List[CatalogEntry]:
    """
    The fifteen polynomial eigenpairs.

    Returns:
        List of CatalogEntry in tabulated order
    """
    return list(_CATALOG)


def find_entry(params: ParamVector) -> CatalogEntry:
    """Catalog entry with the given parameters."""
    for entry in _CATALOG:
        if entry.params == params:
            return entry
    raise DomainError(f"No catalog entry with parameters {params.label()}")


def sort_key(entry: CatalogEntry):
    """Order by alpha, then number of factors, then factor names in s, c, d1, d2 order."""
    return entry.params.alpha, len(entry.factors), [FACTOR_NAMES.index(f) for f in entry.factors]


def normalize_factors(factors: Iterable[str]) -> Tuple[str, ...]:
    """Sort factor names into s, c, d1, d2 order, rejecting unknown names and repeats."""
    factors = list(factors)
    unknown = [f for f in factors if f not in FACTOR_NAMES]
    if unknown:
        raise DomainError(f"Unknown eigenfunction factors: {unknown}")
    if len(set(factors)) != len(factors):
        raise DomainError(f"Repeated eigenfunction factors: {factors}")
    return tuple(name for name in FACTOR_NAMES if name in factors)


def fourier_class_of(factors: Iterable[str]) -> FourierClass:
    """
    Fourier class of a product of generalized Jacobi functions.

    In the amplitude variable s = sin t and c = cos t, while d1, d2 are
    even and pi-periodic in t, so only the s and c content matters.

    Args:
        factors: Factor names drawn from s, c, d1, d2

    Returns:
        The FourierClass of the product
    """
    factors = normalize_factors(factors)
    has_s, has_c = "s" in factors, "c" in factors
    if has_s and has_c:
        return FourierClass.ODD_PI
    if has_s:
        return FourierClass.ODD_2PI
    if has_c:
        return FourierClass.EVEN_2PI
    return FourierClass.EVEN_PI


def catalog_to_csv(entries: Iterable[CatalogEntry]) -> str:
    """CSV text with columns alpha,beta,gamma,delta,lambda,e0,e1,e2,factors."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for entry in entries:
        writer.writerow(entry.to_dict())
    return buffer.getvalue()


def catalog_to_json(entries: Iterable[CatalogEntry]) -> str:
    """JSON array of entry records, keys as in the CSV header."""
    return json.dumps([entry.to_dict() for entry in entries], indent=2)


def catalog_from_json(text: str) -> List[CatalogEntry]:
    """Inverse of catalog_to_json."""
    entries = []
    for record in json.loads(text):
        params = ParamVector(*(float(record[key]) for key in CSV_COLUMNS[:5]))
        energy = tuple(int(record[key]) for key in ("e0", "e1", "e2"))
        factors = normalize_factors(record["factors"].split("*")) if record["factors"] else ()
        entries.append(CatalogEntry(params, energy, factors))
    return entries

