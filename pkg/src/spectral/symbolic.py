"""
Symbolic helpers for solving conditions as identities in the moduli.

A condition such as "this matrix row vanishes" is a polynomial in
X = k1^2 and Y = k2^2 whose coefficients are linear in the unknown
potential parameters and energy coefficients. Requiring it to vanish for
all moduli means every monomial coefficient vanishes, which gives a
linear system solved exactly over the rationals.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy as sp

from ..utils.errors import DomainError
from ..utils.logger import get_logger
from .catalog import ParamVector

logger = get_logger(__name__)

X, Y = sp.symbols("X Y")
PARAM_SYMBOLS = sp.symbols("alpha beta gamma delta lambda_")
ENERGY_SYMBOLS = sp.symbols("e0:4")
UNKNOWNS = tuple(PARAM_SYMBOLS) + tuple(ENERGY_SYMBOLS)

DEFAULT_BOX = (0, 30)
MAX_FREE_SYMBOLS = 3


def energy_expression() -> sp.Expr:
    """E = e0 + e1 X + e2 Y + e3 X Y with unknown coefficients."""
    e0, e1, e2, e3 = ENERGY_SYMBOLS
    return e0 + e1 * X + e2 * Y + e3 * X * Y


def monomial_equations(expressions: Iterable[sp.Expr]) -> List[sp.Expr]:
    """Coefficients of every monomial in X, Y of each polynomial expression."""
    equations = []
    for expr in expressions:
        expr = sp.expand(expr)
        if expr == 0:
            continue
        equations.extend(c for c in sp.Poly(expr, X, Y).coeffs() if c != 0)
    return equations


def solve_identities(
    expressions: Iterable[sp.Expr], unknowns: Sequence[sp.Symbol] = UNKNOWNS
) -> Optional[Dict[sp.Symbol, sp.Expr]]:
    """
    Solve expressions == 0 identically in X, Y for the unknowns.

    Args:
        expressions: Polynomials in X, Y, linear in the unknowns
        unknowns: Symbols to solve for

    Returns:
        Mapping of unknown to solution expression (possibly in free
        unknowns), or None when the system is inconsistent
    """
    equations = monomial_equations(expressions)
    if not equations:
        return {u: u for u in unknowns}
    solutions = sp.linsolve(equations, list(unknowns))
    if solutions == sp.S.EmptySet or not solutions:
        return None
    (solution,) = tuple(solutions)
    return dict(zip(unknowns, solution))


@dataclass(frozen=True)
class SolvedTuple:
    """An integral solution: potential parameters and energy coefficients."""

    params: ParamVector
    energy_coeffs: Tuple[int, int, int]

    def is_trivial(self) -> bool:
        return all(v == 0 for v in self.params.as_tuple())


def integer_solutions(
    solution: Dict[sp.Symbol, sp.Expr], box: Tuple[int, int] = DEFAULT_BOX
) -> List[SolvedTuple]:
    """
    Integral points of a (possibly parametric) solution inside the box.

    Free unknowns are scanned over the box. Points with a nonzero
    k1^2 k2^2 energy coefficient or a parameter outside the box are
    discarded.

    The box is a search heuristic. beta is a real parameter, so a
    family that leaves it free is sampled at the box integers only, and
    nothing outside the box is reported.

    Args:
        solution: Result of solve_identities
        box: Inclusive integer range for alpha, beta, gamma, delta, lambda

    Returns:
        List of SolvedTuple
    """
    free = sorted(
        set().union(*(sp.sympify(expr).free_symbols for expr in solution.values())) & set(UNKNOWNS),
        key=str,
    )
    if len(free) > MAX_FREE_SYMBOLS:
        raise DomainError(f"Solution family has {len(free)} free unknowns; box scan refused")

    low, high = box
    results = []
    for values in itertools.product(range(low, high + 1), repeat=len(free)):
        substitution = dict(zip(free, values))
        point = [sp.nsimplify(sp.sympify(solution[u]).subs(substitution)) for u in UNKNOWNS]
        if not all(v.is_integer for v in point):
            continue
        params, energy = [int(v) for v in point[:5]], [int(v) for v in point[5:]]
        if energy[3] != 0:
            continue
        if not all(low <= v <= high for v in params):
            continue
        results.append(SolvedTuple(ParamVector(*params), tuple(energy[:3])))
    return results
