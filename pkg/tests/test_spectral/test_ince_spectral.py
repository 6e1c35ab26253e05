"""
Unit tests for the generalized Ince coefficients, recurrences and Hill spectra.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.elliptic.gen_jacobi import ModulusPair
from src.spectral.catalog import FourierClass, ParamVector
from src.spectral.ince_spectral import (
    HillSpectrumSolver,
    Transform,
    c_to_energy,
    coexistence_conditions,
    hill_eigen_energies,
    ince_coefficients,
    q_poly,
    qstar_poly,
    recurrence_matrix,
)
from src.utils.errors import ConvergenceError, DomainError

ZERO = ParamVector(0, 0, 0, 0, 0)
S_ENTRY = ParamVector(3, 0, 2, 2, 2)
D1D2_ENTRY = ParamVector(8, 0, 2, 2, 6)
GENERIC = ParamVector(1.5, 0.3, 2.2, 0.7, 1.1)

moduli_pairs = st.tuples(st.floats(0.01, 0.99), st.floats(0.0, 1.0)).map(
    lambda pair: ModulusPair(pair[0], pair[0] * pair[1])
)


@pytest.mark.unit
class TestInceCoefficients:
    """Test the coefficient formulas of both transforms."""

    def test_standard_values(self, moduli):
        """Test a1, a2, b1, b2 and denom at k1 = 0.8, k2 = 0.3."""
        co = ince_coefficients(S_ENTRY, 1.73, moduli)
        assert co.denom == pytest.approx(1.3132, rel=1e-14)
        assert co.a1 == pytest.approx(0.6724 / 1.3132, rel=1e-14)
        assert co.a2 == pytest.approx(0.0144 / 1.3132, rel=1e-14)
        assert co.b1 == -co.a1
        assert co.b2 == -2 * co.a2

    def test_zero_potential(self, moduli):
        """Test that p = 0, E = 0 gives cc = p1 = p2 = 0."""
        co = ince_coefficients(ZERO, 0.0, moduli)
        assert (co.cc, co.p1, co.p2) == (0.0, 0.0, 0.0)

    def test_d1_shifted_b1(self, moduli):
        """Test b1 of the d1-shifted transform."""
        co = ince_coefficients(S_ENTRY, 1.73, moduli, Transform.D1_SHIFTED)
        assert co.b1 == pytest.approx((-3 * 0.64 - 0.09 + 2 * 0.0576) / 1.3132, rel=1e-14)
        assert co.b2 == pytest.approx(-4 * co.a2, rel=1e-15)

    def test_identities_on_grid(self):
        """Test b1 = -a1, b2 = -2 a2 (standard) and b2 = -4 a2 (shifted) on a 20 x 20 grid."""
        for k1 in np.linspace(0.05, 0.95, 20):
            for k2 in np.linspace(0.0, k1, 20):
                m = ModulusPair(k1, k2)
                co = ince_coefficients(S_ENTRY, 1.0, m)
                assert co.b1 == -co.a1
                assert co.b2 == -2 * co.a2
                assert co.denom > 0
                shifted = ince_coefficients(S_ENTRY, 1.0, m, Transform.D2_SHIFTED)
                assert shifted.b2 == pytest.approx(-4 * shifted.a2, abs=1e-16)

    @settings(max_examples=50, deadline=None)
    @given(m=moduli_pairs, energy=st.floats(-50.0, 50.0))
    def test_energy_round_trip(self, m, energy):
        """Test c_to_energy(ince_coefficients(E).cc) = E."""
        for transform in Transform:
            cc = ince_coefficients(S_ENTRY, energy, m, transform).cc
            assert c_to_energy(cc, S_ENTRY, m, transform) == pytest.approx(energy, abs=1e-12)

    def test_cc_slope(self, moduli):
        """Test that cc is affine in E with slope 2 / denom."""
        c0 = ince_coefficients(GENERIC, 0.0, moduli).cc
        c1 = ince_coefficients(GENERIC, 1.0, moduli).cc
        assert c1 - c0 == pytest.approx(2 / 1.3132, rel=1e-13)

    def test_first_case_energy(self, moduli):
        """Test that cc = 0 for (8,0,2,2,6) gives E = k1^2 + k2^2."""
        assert c_to_energy(0.0, D1D2_ENTRY, moduli) == pytest.approx(0.73, abs=1e-14)

    def test_transform_from_label(self):
        """Test that transform labels accept dashes."""
        assert Transform.from_label("d1-shifted") is Transform.D1_SHIFTED
        with pytest.raises(DomainError):
            Transform.from_label("d3_shifted")


@pytest.mark.unit
class TestConditionPolynomials:
    """Test Q and Q*."""

    def test_q_zero_params(self, moduli):
        """Test Q_i(0) = 0 when p1 = p2 = 0."""
        co = ince_coefficients(ZERO, 0.0, moduli)
        assert q_poly(1, 0, co) == 0.0
        assert q_poly(2, 0, co) == 0.0

    @settings(max_examples=30, deadline=None)
    @given(mu=st.floats(-10.0, 10.0))
    def test_q_odd_part(self, mu):
        """Test Q_i(mu) - Q_i(-mu) = -2 b_i mu."""
        co = ince_coefficients(GENERIC, 0.7, ModulusPair(0.8, 0.3))
        assert q_poly(1, mu, co) - q_poly(1, -mu, co) == pytest.approx(-2 * co.b1 * mu, abs=1e-12)
        assert q_poly(2, mu, co) - q_poly(2, -mu, co) == pytest.approx(-2 * co.b2 * mu, abs=1e-12)

    def test_first_case_row_conditions(self, moduli):
        """Test Q1(-1) = Q2(-2) = cc = 0 for (8,0,2,2,6) at E = k1^2 + k2^2."""
        co = ince_coefficients(D1D2_ENTRY, 0.73, moduli)
        assert abs(co.cc) < 1e-15
        assert abs(q_poly(1, -1, co)) < 1e-15
        assert abs(q_poly(2, -2, co)) < 1e-15

    def test_qstar_at_half(self, moduli):
        """Test that Q*_i vanishes at mu = 1/2 when p1 = p2 = 0."""
        co = ince_coefficients(ZERO, 0.0, moduli)
        assert qstar_poly(1, 0.5, co) == 0.0
        assert qstar_poly(2, 0.5, co) == 0.0

    def test_qstar_first_column_of_s_entry(self, moduli):
        """Test the vanishing first column for (3,0,2,2,2), E = 1 + k1^2 + k2^2."""
        co = ince_coefficients(S_ENTRY, 1.73, moduli)
        assert abs(2 - 2 * co.cc - qstar_poly(1, 0, co)) < 1e-14
        assert abs(qstar_poly(1, 1, co) - qstar_poly(2, 0, co)) < 1e-14
        assert abs(qstar_poly(2, 1, co)) < 1e-14

    def test_qstar_linear_term(self, moduli):
        """Test Q*_i at 2mu - 1 = 1 and -1 differ by -2 b_i."""
        co = ince_coefficients(GENERIC, 0.7, moduli)
        assert qstar_poly(1, 1, co) - qstar_poly(1, 0, co) == pytest.approx(-2 * co.b1, abs=1e-14)

    def test_band_index_checked(self, moduli):
        """Test that band index 3 raises DomainError."""
        with pytest.raises(DomainError):
            q_poly(3, 0, ince_coefficients(ZERO, 0.0, moduli))


@pytest.mark.unit
class TestRecurrenceMatrix:
    """Test the truncated recurrence matrices."""

    def test_even_pi_corner(self, moduli):
        """Test EvenPi entries (0,0) = -cc and (0,1) = Q1(-1)."""
        co = ince_coefficients(GENERIC, 0.7, moduli)
        matrix = recurrence_matrix(FourierClass.EVEN_PI, co, 5)
        assert matrix[0, 0] == pytest.approx(-co.cc, abs=1e-15)
        assert matrix[0, 1] == pytest.approx(q_poly(1, -1, co), abs=1e-15)

    def test_even_pi_folding(self, moduli):
        """Test that the folded column 0 carries 2 Q_i(0), the printed one Q_i(0)."""
        co = ince_coefficients(GENERIC, 0.7, moduli)
        derived = recurrence_matrix(FourierClass.EVEN_PI, co, 5)
        printed = recurrence_matrix(FourierClass.EVEN_PI, co, 5, layout="printed")
        assert derived[1, 0] == pytest.approx(2 * q_poly(1, 0, co), abs=1e-15)
        assert printed[1, 0] == pytest.approx(q_poly(1, 0, co), abs=1e-15)
        assert printed[2, 0] == pytest.approx(q_poly(2, 0, co), abs=1e-15)
        np.testing.assert_array_equal(derived[:, 1:], printed[:, 1:])

    def test_odd_2pi_diagonal(self, moduli):
        """Test Odd2Pi entry (1,1) = 18 - 2cc."""
        co = ince_coefficients(GENERIC, 0.7, moduli)
        matrix = recurrence_matrix(FourierClass.ODD_2PI, co, 5)
        assert matrix[1, 1] == pytest.approx(18 - 2 * co.cc, abs=1e-13)

    @pytest.mark.parametrize("fclass", list(FourierClass))
    def test_pentadiagonal(self, moduli, fclass):
        """Test that entries more than two off the diagonal vanish."""
        co = ince_coefficients(GENERIC, 0.7, moduli)
        matrix = recurrence_matrix(fclass, co, 12)
        rows, cols = np.indices(matrix.shape)
        assert np.all(matrix[np.abs(rows - cols) > 2] == 0.0)

    def test_small_truncation_rejected(self, moduli):
        """Test that N < 5 raises DomainError."""
        with pytest.raises(DomainError):
            recurrence_matrix(FourierClass.ODD_PI, ince_coefficients(ZERO, 0.0, moduli), 4)

    def test_unknown_layout_rejected(self, moduli):
        """Test that an unknown layout raises DomainError."""
        with pytest.raises(DomainError):
            recurrence_matrix(FourierClass.ODD_PI, ince_coefficients(ZERO, 0.0, moduli), 5, layout="other")


@pytest.mark.unit
class TestHillSpectrum:
    """Test characteristic energies from truncated recurrences."""

    def test_free_particle(self):
        """Test that k1 = k2 = 0 gives plane-wave energies n^2."""
        solver = HillSpectrumSolver(ModulusPair(0.0, 0.0))
        assert solver.energies(FourierClass.EVEN_PI, ZERO, 3) == pytest.approx([0, 4, 16], abs=1e-10)
        assert solver.energies(FourierClass.ODD_PI, ZERO, 3) == pytest.approx([4, 16, 36], abs=1e-10)
        assert solver.energies(FourierClass.ODD_2PI, ZERO, 3) == pytest.approx([1, 9, 25], abs=1e-10)
        assert solver.energies(FourierClass.EVEN_2PI, ZERO, 3) == pytest.approx([1, 9, 25], abs=1e-10)

    def test_classical_lame_first_order(self):
        """Test k2 = 0, gamma = 2: energies 1 + k^2 (sn), 1 (cn), k^2 (dn)."""
        m = ModulusPair(0.8, 0.0)
        p = ParamVector(0, 0, 2, 0, 0)
        assert hill_eigen_energies(FourierClass.ODD_2PI, p, m, count=1)[0] == pytest.approx(1.64, abs=1e-8)
        assert hill_eigen_energies(FourierClass.EVEN_2PI, p, m, count=1)[0] == pytest.approx(1.0, abs=1e-8)
        assert hill_eigen_energies(FourierClass.EVEN_PI, p, m, count=1)[0] == pytest.approx(0.64, abs=1e-8)

    def test_classical_lame_second_order(self):
        """Test k2 = 0, gamma = 6 against the closed-form second-order Lamé eigenvalues."""
        m = ModulusPair(0.8, 0.0)
        k_sq = 0.64
        p = ParamVector(0, 0, 6, 0, 0)
        spectrum = HillSpectrumSolver(m).spectrum(p, 1)
        assert spectrum[FourierClass.ODD_PI][0] == pytest.approx(4 + k_sq, abs=1e-8)
        assert spectrum[FourierClass.ODD_2PI][0] == pytest.approx(1 + 4 * k_sq, abs=1e-8)
        assert spectrum[FourierClass.EVEN_2PI][0] == pytest.approx(1 + k_sq, abs=1e-8)
        expected = 2 * (1 + k_sq) - 2 * math.sqrt(1 - k_sq + k_sq**2)
        assert spectrum[FourierClass.EVEN_PI][0] == pytest.approx(expected, abs=1e-8)
        assert expected == pytest.approx(1.525464, abs=1e-6)

    def test_s_entry_lowest_odd_2pi(self, moduli):
        """Test that (3,0,2,2,2) has lowest Odd2Pi energy 1 + k1^2 + k2^2."""
        assert hill_eigen_energies(FourierClass.ODD_2PI, S_ENTRY, moduli)[0] == pytest.approx(1.73, abs=1e-8)

    def test_sc_entry_lowest_odd_pi(self, moduli):
        """Test that (8,0,6,6,2) has lowest OddPi energy 4 + k1^2 + k2^2."""
        p = ParamVector(8, 0, 6, 6, 2)
        assert hill_eigen_energies(FourierClass.ODD_PI, p, moduli)[0] == pytest.approx(4.73, abs=1e-8)

    def test_catalog_energies_in_spectrum(self, moduli, catalog_entries):
        """Test that every catalog energy is a characteristic energy of its class."""
        for entry in catalog_entries:
            energies = hill_eigen_energies(entry.fourier_class, entry.params, moduli, count=3)
            assert min(abs(e - entry.energy(moduli)) for e in energies) < 1e-8

    def test_shifted_transform_same_spectrum(self, moduli):
        """Test that the d1-shifted matrices give the same energies per class."""
        standard = HillSpectrumSolver(moduli).spectrum(GENERIC, 3)
        shifted = HillSpectrumSolver(moduli, Transform.D1_SHIFTED).spectrum(GENERIC, 3)
        for fclass in FourierClass:
            assert shifted[fclass] == pytest.approx(standard[fclass], abs=1e-7)

    def test_spectrum_subset_of_classes(self, moduli):
        """Test that spectrum honours an explicit class list."""
        result = HillSpectrumSolver(moduli).spectrum(S_ENTRY, 2, classes=[FourierClass.ODD_2PI], workers=1)
        assert list(result) == [FourierClass.ODD_2PI]

    def test_truncation_too_small(self, moduli):
        """Test that N < 2 count + 8 raises DomainError."""
        with pytest.raises(DomainError):
            hill_eigen_energies(FourierClass.ODD_PI, S_ENTRY, moduli, N=10, count=2)

    def test_count_must_be_positive(self, moduli):
        """Test that count = 0 raises DomainError."""
        with pytest.raises(DomainError):
            hill_eigen_energies(FourierClass.ODD_PI, S_ENTRY, moduli, count=0)

    def test_truncation_cap(self, moduli):
        """Test that a cap below the first doubling raises ConvergenceError."""
        solver = HillSpectrumSolver(moduli, max_truncation=64)
        with pytest.raises(ConvergenceError):
            solver.energies(FourierClass.ODD_PI, S_ENTRY, 2, N=64)


@pytest.mark.unit
class TestCoexistence:
    """Test the coexistence analysis."""

    @pytest.mark.parametrize("fclass", [FourierClass.EVEN_PI, FourierClass.ODD_PI])
    def test_pi_classes_force_mu_zero(self, fclass):
        """Test that the standard transform forces mu = 0 for the period-pi classes."""
        for k1 in np.linspace(0.1, 0.95, 20):
            for k2 in np.linspace(0.05, k1, 20):
                co = ince_coefficients(GENERIC, 1.0, ModulusPair(k1, k2))
                report = coexistence_conditions(fclass, co)
                assert report.integral
                assert report.mu == 0.0
                assert not report.coexistence_possible

    @pytest.mark.parametrize("fclass", [FourierClass.ODD_2PI, FourierClass.EVEN_2PI])
    def test_2pi_classes_non_integral(self, fclass):
        """Test that the period-2pi classes give mu = 1/2 over the same modulus grid."""
        for k1 in np.linspace(0.1, 0.95, 20):
            for k2 in np.linspace(0.05, k1, 20):
                report = coexistence_conditions(fclass, ince_coefficients(GENERIC, 1.0, ModulusPair(k1, k2)))
                assert report.mu == pytest.approx(0.5, abs=1e-12)
                assert not report.integral
                assert not report.coexistence_possible

    def test_zero_potential_coexists(self, moduli):
        """Test that p1 = p2 = 0 satisfies the mu = 0 conditions."""
        report = coexistence_conditions(FourierClass.EVEN_PI, ince_coefficients(ZERO, 0.0, moduli))
        assert report.coexistence_possible

    def test_d1_shifted_pi_class(self, moduli):
        """Test that b2 = -4 a2 gives 2mu - 1 = -2, a non-integral mu."""
        co = ince_coefficients(GENERIC, 1.0, moduli, Transform.D1_SHIFTED)
        report = coexistence_conditions(FourierClass.ODD_PI, co)
        assert report.mu == pytest.approx(-0.5, abs=1e-14)
        assert not report.integral

    def test_degenerate_lame_limit(self):
        """Test that k2 = 0 is reported as degenerate."""
        co = ince_coefficients(GENERIC, 1.0, ModulusPair(0.8, 0.0))
        report = coexistence_conditions(FourierClass.ODD_PI, co)
        assert report.degenerate
        assert report.mu is None
        assert report.to_dict()["degenerate"] is True
