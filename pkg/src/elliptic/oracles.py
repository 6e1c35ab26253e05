"""
Independent numerical oracles for the elliptic and spectral modules.

Nothing here uses the closed forms under test: the classical fourth
order Runge-Kutta integrator runs on plain Python floats, and the
initial value solver for the Schrödinger equation delegates to scipy's
DOP853 with tight tolerances.
"""

import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ..utils.errors import ConvergenceError, DomainError
from ..utils.logger import get_logger

logger = get_logger(__name__)

State = Tuple[float, ...]
RightHandSide = Callable[[float, State], State]

DEFAULT_RK4_STEP = 1e-4


def _rk4_step(rhs: RightHandSide, t: float, y: State, h: float) -> State:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, tuple(yi + 0.5 * h * ki for yi, ki in zip(y, k1)))
    k3 = rhs(t + 0.5 * h, tuple(yi + 0.5 * h * ki for yi, ki in zip(y, k2)))
    k4 = rhs(t + h, tuple(yi + h * ki for yi, ki in zip(y, k3)))
    return tuple(
        yi + h * (a + 2.0 * (b + c) + d) / 6.0 for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def rk4_trajectory(
    rhs: RightHandSide,
    y0: Sequence[float],
    sample_times: Sequence[float],
    step: float = DEFAULT_RK4_STEP,
    t0: float = 0.0,
) -> List[State]:
    """
    Integrate y' = rhs(t, y) with classical RK4 and sample the solution.

    The interval between consecutive sample times is split into equal
    steps no longer than `step`, so every sample lands on a step boundary.

    Args:
        rhs: Right-hand side taking (t, state tuple) and returning a tuple
        y0: Initial state at t0
        sample_times: Times at which to report the state (any order, any sign)
        step: Maximum step length
        t0: Initial time

    Returns:
        States in the order of sample_times
    """
    if step <= 0.0:
        raise DomainError(f"RK4 step must be positive, got {step}")

    results: List[State] = [()] * len(sample_times)
    y0 = tuple(float(v) for v in y0)

    # forward and backward branches both start from t0
    for direction in (1.0, -1.0):
        indices = [i for i, t in enumerate(sample_times) if (t - t0) * direction >= 0.0]
        indices.sort(key=lambda i: direction * (sample_times[i] - t0))
        t, y = t0, y0
        for i in indices:
            target = float(sample_times[i])
            span = target - t
            n_steps = int(math.ceil(abs(span) / step)) if span != 0.0 else 0
            if n_steps:
                h = span / n_steps
                for _ in range(n_steps):
                    y = _rk4_step(rhs, t, y, h)
                    t += h
                t = target
            results[i] = y
    return results


def gen_jacobi_rhs(k1: float, k2: float) -> RightHandSide:
    """First-order system s'=c d1 d2, c'=-s d1 d2, d1'=-k1^2 s c d2, d2'=-k2^2 s c d1."""
    x, y = k1 * k1, k2 * k2

    def rhs(_t: float, state: State) -> State:
        s, c, d1, d2 = state
        return (c * d1 * d2, -s * d1 * d2, -x * s * c * d2, -y * s * c * d1)

    return rhs


def jacobi_rhs(k: float) -> RightHandSide:
    """First-order system sn'=cn dn, cn'=-sn dn, dn'=-k^2 sn cn."""
    m = k * k

    def rhs(_t: float, state: State) -> State:
        sn, cn, dn = state
        return (cn * dn, -sn * dn, -m * sn * cn)

    return rhs


def gen_jacobi_by_rk4(
    u_values: Sequence[float], k1: float, k2: float, step: float = DEFAULT_RK4_STEP
) -> np.ndarray:
    """
    Generalized Jacobi functions by RK4 integration from (0, 1, 1, 1).

    Returns:
        Array of shape (len(u_values), 4) with columns s, c, d1, d2
    """
    states = rk4_trajectory(gen_jacobi_rhs(k1, k2), (0.0, 1.0, 1.0, 1.0), u_values, step)
    return np.array(states, dtype=float)


def jacobi_by_rk4(
    u_values: Sequence[float], k: float, step: float = DEFAULT_RK4_STEP
) -> np.ndarray:
    """Jacobi sn, cn, dn by RK4 integration from (0, 1, 1); shape (n, 3)."""
    states = rk4_trajectory(jacobi_rhs(k), (0.0, 1.0, 1.0), u_values, step)
    return np.array(states, dtype=float)


def schrodinger_ivp(
    potential: Callable[[float], float],
    energy: float,
    initial: Tuple[float, float],
    z_values: Sequence[float],
    rtol: float = 1e-12,
    atol: float = 1e-13,
) -> np.ndarray:
    """
    Integrate f'' + (V(z) + E) f = 0 from z = 0 with DOP853.

    Args:
        potential: V as a scalar function of z
        energy: Spectral parameter E
        initial: (f(0), f'(0))
        z_values: Sample points, all of one sign
        rtol: Relative tolerance
        atol: Absolute tolerance

    Returns:
        f at the sample points
    """
    z_values = np.asarray(z_values, dtype=float)
    if z_values.size == 0:
        raise DomainError("No sample points given")
    if np.any(z_values > 0.0) and np.any(z_values < 0.0):
        raise DomainError("Sample points must lie on one side of z = 0")

    z_end = z_values[np.argmax(np.abs(z_values))]
    if z_end == 0.0:
        return np.full(z_values.shape, float(initial[0]))

    def rhs(z, y):
        return [y[1], -(potential(z) + energy) * y[0]]

    # t_eval must be strictly monotone in the direction of integration
    magnitude, inverse = np.unique(np.abs(z_values), return_inverse=True)
    direction = 1.0 if z_end > 0.0 else -1.0
    solution = solve_ivp(
        rhs,
        (0.0, float(z_end)),
        list(initial),
        method="DOP853",
        t_eval=direction * magnitude,
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise ConvergenceError(f"DOP853 integration failed: {solution.message}")

    return solution.y[0][inverse.reshape(z_values.shape)]
