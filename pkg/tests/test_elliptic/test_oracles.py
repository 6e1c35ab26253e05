"""
Unit tests for the independent numerical oracles.
"""

import math

import numpy as np
import pytest

from src.elliptic.elliptic_core import jacobi_scd
from src.elliptic.oracles import (
    gen_jacobi_by_rk4,
    gen_jacobi_rhs,
    jacobi_by_rk4,
    rk4_trajectory,
    schrodinger_ivp,
)
from src.utils.errors import DomainError


@pytest.mark.unit
class TestRk4Trajectory:
    """Test the classical Runge-Kutta integrator."""

    def test_exponential_both_directions(self):
        """Test y' = y sampled forward and backward from t0 = 0."""
        samples = rk4_trajectory(lambda t, y: (y[0],), (1.0,), [1.0, -1.0, 0.5], step=1e-3)
        assert samples[0][0] == pytest.approx(math.e, rel=1e-12)
        assert samples[1][0] == pytest.approx(1.0 / math.e, rel=1e-12)
        assert samples[2][0] == pytest.approx(math.exp(0.5), rel=1e-12)

    def test_sample_at_start(self):
        """Test that a sample at t0 returns the initial state."""
        assert rk4_trajectory(lambda t, y: (1.0,), (3.0,), [0.0]) == [(3.0,)]

    def test_time_dependent_rhs(self):
        """Test y' = cos t from a nonzero start time."""
        (state,) = rk4_trajectory(lambda t, y: (math.cos(t),), (0.0,), [2.0], step=1e-3, t0=1.0)
        assert state[0] == pytest.approx(math.sin(2.0) - math.sin(1.0), abs=1e-12)

    @pytest.mark.parametrize("step", [0.0, -1e-3])
    def test_invalid_step_rejected(self, step):
        """Test that a non-positive step raises DomainError."""
        with pytest.raises(DomainError):
            rk4_trajectory(lambda t, y: y, (1.0,), [1.0], step=step)


@pytest.mark.unit
class TestEllipticSystems:
    """Test the right-hand sides of the elliptic systems."""

    def test_gen_jacobi_rhs_at_origin(self):
        """Test the system at (0, 1, 1, 1)."""
        assert gen_jacobi_rhs(0.8, 0.3)(0.0, (0.0, 1.0, 1.0, 1.0)) == (1.0, -0.0, -0.0, -0.0)

    def test_jacobi_system_matches_closed_form(self):
        """Test that RK4 of the sn/cn/dn system agrees with the Landen evaluation."""
        u = [0.25, 1.0, 2.5, -1.5]
        np.testing.assert_allclose(jacobi_by_rk4(u, 0.6), np.array([jacobi_scd(v, 0.6) for v in u]), atol=1e-10)

    def test_gen_jacobi_reduces_for_k2_zero(self):
        """Test that the generalized system with k2 = 0 keeps d2 = 1."""
        states = gen_jacobi_by_rk4([1.0, 2.0], 0.7, 0.0)
        np.testing.assert_array_equal(states[:, 3], 1.0)
        np.testing.assert_allclose(states[:, 0], [jacobi_scd(1.0, 0.7)[0], jacobi_scd(2.0, 0.7)[0]], atol=1e-10)


@pytest.mark.unit
class TestSchrodingerIvp:
    """Test the DOP853 initial value oracle."""

    def test_free_particle(self):
        """Test f'' + 4 f = 0, f(0) = 0, f'(0) = 1 gives sin(2z)/2."""
        z = np.linspace(0.0, 2.0, 21)
        f = schrodinger_ivp(lambda _z: 0.0, 4.0, (0.0, 1.0), z)
        np.testing.assert_allclose(f, np.sin(2.0 * z) / 2.0, atol=1e-10)

    def test_negative_side(self):
        """Test integration towards negative z, with repeated sample points."""
        z = np.array([-0.5, -1.5, -0.5, -1.0])
        f = schrodinger_ivp(lambda _z: 0.0, 1.0, (1.0, 0.0), z)
        np.testing.assert_allclose(f, np.cos(z), atol=1e-10)

    def test_only_origin(self):
        """Test that samples at z = 0 return f(0)."""
        np.testing.assert_array_equal(schrodinger_ivp(lambda _z: 0.0, 1.0, (2.0, 0.0), [0.0, 0.0]), 2.0)

    def test_mixed_signs_rejected(self):
        """Test that samples on both sides of 0 raise DomainError."""
        with pytest.raises(DomainError):
            schrodinger_ivp(lambda _z: 0.0, 1.0, (1.0, 0.0), [-0.1, 0.1])

    def test_empty_rejected(self):
        """Test that an empty sample set raises DomainError."""
        with pytest.raises(DomainError):
            schrodinger_ivp(lambda _z: 0.0, 1.0, (1.0, 0.0), [])
