"""
Unit tests for the complete elliptic integral and the Jacobi functions.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import ellipj, ellipkm1

from src.elliptic.elliptic_core import agm, complete_K, jacobi_scd
from src.elliptic.oracles import jacobi_by_rk4
from src.utils.errors import ConvergenceError, DomainError


@pytest.mark.unit
class TestAgm:
    """Test the arithmetic-geometric mean."""

    def test_equal_arguments(self):
        """Test that AGM(a, a) = a."""
        assert agm(2.5, 2.5) == 2.5

    def test_known_value(self):
        """Test AGM(1, sqrt 2) against Gauss's constant."""
        assert agm(1.0, math.sqrt(2.0)) == pytest.approx(1.1981402347355922, rel=1e-15)

    def test_negative_argument_rejected(self):
        """Test that negative arguments raise DomainError."""
        with pytest.raises(DomainError):
            agm(-1.0, 1.0)

    def test_iteration_cap_raises(self):
        """Test that a zero argument exhausts the iteration cap."""
        with pytest.raises(ConvergenceError):
            agm(1.0, 0.0)


@pytest.mark.unit
class TestCompleteK:
    """Test complete_K."""

    def test_k_zero_is_half_pi(self):
        """Test that K(0) = pi/2."""
        assert complete_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)

    @pytest.mark.parametrize("k", [1.0, 1.2, -0.1, float("nan")])
    def test_invalid_modulus_rejected(self, k):
        """Test that k outside [0, 1) raises DomainError."""
        with pytest.raises(DomainError):
            complete_K(k)

    def test_matches_quadrature(self):
        """Test K(0.8) against quadrature of the defining integral."""
        k = 0.8
        value, _ = quad(lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2), 0.0, math.pi / 2, epsabs=1e-15)
        assert complete_K(k) == pytest.approx(value, rel=1e-12)

    @pytest.mark.parametrize("k", [0.1, 0.5, 0.8, 0.99, 0.999999])
    def test_matches_scipy(self, k):
        """Test agreement with scipy's ellipkm1 (argument 1 - k^2)."""
        assert complete_K(k) == pytest.approx(ellipkm1((1.0 - k) * (1.0 + k)), rel=1e-13)


@pytest.mark.unit
class TestJacobiScd:
    """Test the Jacobi elliptic functions."""

    @pytest.mark.parametrize("k", [0.0, 0.3, 0.8, 1.0])
    def test_initial_values(self, k):
        """Test (sn, cn, dn)(0) = (0, 1, 1)."""
        assert jacobi_scd(0.0, k) == (0.0, 1.0, 1.0)

    def test_circular_limit(self):
        """Test that k = 0 gives (sin, cos, 1)."""
        u = np.linspace(-3.0, 7.0, 41)
        sn, cn, dn = jacobi_scd(u, 0.0)
        np.testing.assert_allclose(sn, np.sin(u), atol=1e-15)
        np.testing.assert_allclose(cn, np.cos(u), atol=1e-15)
        np.testing.assert_array_equal(dn, np.ones_like(u))

    def test_hyperbolic_limit(self):
        """Test that k = 1 gives (tanh, sech, sech)."""
        u = np.linspace(-3.0, 3.0, 13)
        sn, cn, dn = jacobi_scd(u, 1.0)
        np.testing.assert_allclose(sn, np.tanh(u), atol=1e-15)
        np.testing.assert_allclose(cn, 1.0 / np.cosh(u), atol=1e-15)
        np.testing.assert_allclose(dn, cn, atol=0.0)

    def test_scalar_in_scalar_out(self):
        """Test that a float argument returns floats."""
        assert all(isinstance(v, float) for v in jacobi_scd(0.4, 0.6))

    def test_identities_on_random_arguments(self):
        """Test sn^2 + cn^2 = 1 and dn^2 + k^2 sn^2 = 1 at 1000 random (u, k)."""
        rng = np.random.default_rng(20240611)
        u = rng.uniform(-20.0, 20.0, 1000)
        ks = rng.uniform(0.0, 1.0, 1000)
        for ui, k in zip(u, ks):
            sn, cn, dn = jacobi_scd(ui, k)
            assert abs(sn * sn + cn * cn - 1.0) < 1e-12
            assert abs(dn * dn + k * k * sn * sn - 1.0) < 1e-12

    def test_matches_runge_kutta(self):
        """Test (sn, cn, dn)(0.7, 0.8) against RK4 integration of the defining system."""
        expected = jacobi_by_rk4([0.7], 0.8)[0]
        np.testing.assert_allclose(jacobi_scd(0.7, 0.8), expected, atol=1e-10)

    @pytest.mark.parametrize("k", [0.2, 0.8, 0.95])
    def test_matches_scipy(self, k):
        """Test agreement with scipy's ellipj."""
        u = np.linspace(-5.0, 5.0, 101)
        sn, cn, dn, _ = ellipj(u, k * k)
        ours = jacobi_scd(u, k)
        np.testing.assert_allclose(ours[0], sn, atol=1e-11)
        np.testing.assert_allclose(ours[1], cn, atol=1e-11)
        np.testing.assert_allclose(ours[2], dn, atol=1e-11)

    @settings(max_examples=50, deadline=None)
    @given(u=st.floats(-10.0, 10.0), k=st.floats(0.0, 0.99))
    def test_real_period(self, u, k):
        """Test sn(u + 4K) = sn(u)."""
        period = 4.0 * complete_K(k)
        assert jacobi_scd(u + period, k)[0] == pytest.approx(jacobi_scd(u, k)[0], abs=1e-10)

    def test_invalid_modulus_rejected(self):
        """Test that k > 1 raises DomainError."""
        with pytest.raises(DomainError):
            jacobi_scd(0.5, 1.5)
