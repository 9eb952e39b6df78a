import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robin_eit.exceptions import DomainError
from robin_eit.forward import BoundaryGrid
from robin_eit.greens import (
    SamplingPoint,
    greens_trace_matrix,
    greens_trace_series,
    poisson_kernel,
    robin_greens_trace,
    series_truncation_bound,
)

GRID = BoundaryGrid(32)


class TestPoissonKernel:
    @given(st.floats(-10, 10))
    def test_origin(self, lam):
        assert poisson_kernel(0.0, lam) == 1.0

    def test_half_radius(self):
        assert poisson_kernel(0.5, 0.0) == pytest.approx(3.0, rel=1e-15)

    def test_mean_value(self):
        lam = np.linspace(0, 2 * np.pi, 400, endpoint=False)
        assert poisson_kernel(0.7, lam).mean() == pytest.approx(1.0, rel=1e-12)

    @settings(max_examples=200)
    @given(st.floats(0, 0.999), st.floats(-10, 10))
    def test_positive(self, t, lam):
        assert poisson_kernel(t, lam) > 0

    @pytest.mark.parametrize("t", [1.0, 1.5, -0.1])
    def test_outside_disk(self, t):
        with pytest.raises(DomainError):
            poisson_kernel(t, 0.0)


class TestTrace:
    @pytest.mark.parametrize("sigma", [1.0, 10.0, 0.3])
    def test_center_is_constant(self, sigma):
        values = robin_greens_trace(SamplingPoint(0.0, 0.0), sigma, GRID).values
        assert np.allclose(values, sigma / (2 * np.pi), rtol=1e-12, atol=0)

    def test_quadrature_matches_series(self):
        z = SamplingPoint(0.4, 0.0)
        q = robin_greens_trace(z, 1.0, GRID).values
        s = greens_trace_series(z, 1.0, GRID, 200).values
        assert np.max(np.abs(q - s)) <= 1e-10

    @pytest.mark.parametrize("rho_z", [0.0, 0.5, 0.9])
    @pytest.mark.parametrize("sigma", [1.0, 10.0])
    def test_lattice_agreement(self, rho_z, sigma):
        z = SamplingPoint(rho_z, 1.1)
        q = robin_greens_trace(z, sigma, GRID).values
        s = greens_trace_series(z, sigma, GRID, 600).values
        assert np.max(np.abs(q - s)) <= 1e-8

    def test_series_center_any_order(self):
        for n_max in (0, 1, 5):
            values = greens_trace_series(SamplingPoint(0.0, 0.0), 2.0, GRID, n_max).values
            assert np.allclose(values, 2.0 / (2 * np.pi), rtol=1e-15)

    def test_truncation_bound(self):
        assert series_truncation_bound(0.9, 1.0, 300) < 1e-12
        assert series_truncation_bound(0.0, 1.0, 0) == 0.0

    def test_truncation_bound_is_a_bound(self):
        z = SamplingPoint(0.8, 0.2)
        exact = greens_trace_series(z, 3.0, GRID, 500).values
        short = greens_trace_series(z, 3.0, GRID, 20)
        assert np.max(np.abs(exact - short.values)) <= short.truncation_bound

    @pytest.mark.parametrize("shift", [1, 5, 31])
    def test_on_grid_rotation_is_cyclic_shift(self, shift):
        base = robin_greens_trace(SamplingPoint(0.7, 0.3), 2.0, GRID).values
        turned = robin_greens_trace(SamplingPoint(0.7, 0.3 + shift * GRID.spacing), 2.0, GRID).values
        assert np.allclose(turned, np.roll(base, shift), rtol=1e-13, atol=0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.0, 0.95), st.floats(-7, 7), st.floats(0.05, 20))
    def test_positive_entries(self, rho_z, theta_z, sigma):
        assert np.all(robin_greens_trace(SamplingPoint(rho_z, theta_z), sigma, GRID).values > 0)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 10.0])
    def test_radial_derivative_bounded(self, sigma):
        radii = np.linspace(0.0, 0.95, 191)
        values = greens_trace_matrix(radii, np.zeros_like(radii), sigma, GRID)
        slope = np.abs(np.diff(values, axis=0)) / np.diff(radii)[:, None]
        assert np.all(np.isfinite(slope))
        # every Fourier term has derivative at most n rho**(n-1) / pi
        assert slope.max() <= 1.0 / (np.pi * (1 - 0.95) ** 2)

    def test_matrix_rows_match_single_traces(self):
        radii, thetas = np.array([0.0, 0.3, 0.9]), np.array([0.0, 2.0, -1.0])
        M = greens_trace_matrix(radii, thetas, 1.5, GRID)
        for row, r, t in zip(M, radii, thetas):
            assert np.allclose(row, robin_greens_trace(SamplingPoint(r, t), 1.5, GRID).values, rtol=1e-14)

    def test_nonpositive_sigma(self):
        with pytest.raises(DomainError):
            robin_greens_trace(SamplingPoint(0.1, 0.0), 0.0, GRID)


class TestSamplingPoint:
    def test_radius_cap(self):
        with pytest.raises(DomainError):
            SamplingPoint(0.96, 0.0)
        SamplingPoint(0.96, 0.0, r_max=0.99)

    def test_cartesian_round_trip(self):
        z = SamplingPoint.from_cartesian(-0.3, 0.4)
        assert z.rho_z == pytest.approx(0.5)
        assert z.cartesian == pytest.approx((-0.3, 0.4))

    def test_angle_wraps(self):
        assert SamplingPoint(0.2, 2 * np.pi + 0.5).theta_z == pytest.approx(0.5)
