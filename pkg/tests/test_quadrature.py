import math

import numpy as np
import pytest

from disklab import (
    DomainError,
    SingularIntegrandError,
    integrate,
    make_circle_grid,
    make_disk_grid,
    richardson_check,
)


def poisson_kernel(zeta):
    def f(z):
        return (1.0 - np.abs(z) ** 2) / np.abs(z - zeta) ** 2

    return f


class TestDiskGridInvariants:
    def test_weights_sum_to_one(self, disk_grid):
        assert abs(math.fsum(disk_grid.weights) - 1.0) <= 1e-12

    def test_weights_positive(self, disk_grid):
        assert (disk_grid.weights > 0).all()

    def test_nodes_strictly_inside(self, disk_grid):
        assert (np.abs(disk_grid.nodes) < 1.0).all()

    def test_orders_below_minimum_rejected(self):
        with pytest.raises(DomainError):
            make_disk_grid(0, 64)
        with pytest.raises(DomainError):
            make_disk_grid(10, 3)

    def test_bad_singular_radius_rejected(self):
        with pytest.raises(DomainError):
            make_disk_grid(10, 8, singular_radii=(1.0,))


class TestDiskIntegration:
    def test_measure_normalization(self, disk_grid):
        val = integrate(disk_grid, lambda z: np.ones(z.shape))
        assert val == pytest.approx(1.0, abs=1e-14)

    def test_radial_oracle_abs_square(self, disk_grid):
        # integral of |z|^2 dA = int_0^1 r^2 * 2r dr = 1/2
        val = integrate(disk_grid, lambda z: np.abs(z) ** 2)
        assert val == pytest.approx(0.5, abs=1e-14)

    def test_angular_symmetry_kills_z(self, disk_grid):
        val = integrate(disk_grid, lambda z: z)
        assert abs(val) <= 1e-14

    def test_poisson_kernel_integrates_to_one(self):
        # exact angular mean of 1/|zeta - r e^{it}|^2 is 1/(1-r^2), which
        # cancels the numerator; the graded grid must resolve the pole
        grid = make_disk_grid(80, 256)
        for zeta in (1.0, np.exp(0.7j)):
            val = integrate(grid, poisson_kernel(zeta))
            assert val == pytest.approx(1.0, abs=1e-6)

    def test_log_singularity_at_origin(self, disk_grid):
        # int log(1/|z|) dA = int_0^1 -log(r) 2r dr = 1/2
        val = integrate(disk_grid, lambda z: np.log(1.0 / np.abs(z)))
        assert val == pytest.approx(0.5, abs=1e-6)

    def test_scalar_only_integrand_falls_back(self, coarse_disk_grid):
        val = integrate(coarse_disk_grid, lambda z: abs(z) ** 2)
        assert val == pytest.approx(0.5, abs=1e-13)

    def test_singular_integrand_names_node(self, coarse_disk_grid):
        bad_node = coarse_disk_grid.nodes[17]

        def f(z):
            vals = np.ones(z.shape)
            return np.where(z == bad_node, np.inf, vals)

        with pytest.raises(SingularIntegrandError) as err:
            integrate(coarse_disk_grid, f)
        assert "17" in str(err.value)

    def test_linearity(self, coarse_disk_grid):
        f = lambda z: np.abs(z) ** 2
        g = lambda z: np.real(z) ** 2
        lhs = integrate(coarse_disk_grid, lambda z: 2.0 * f(z) + 3.0 * g(z))
        rhs = 2.0 * integrate(coarse_disk_grid, f) + 3.0 * integrate(
            coarse_disk_grid, g
        )
        assert lhs == pytest.approx(rhs, abs=1e-14)

    def test_nonnegative_integrand_nonnegative_result(self, coarse_disk_grid):
        val = integrate(coarse_disk_grid, lambda z: np.abs(z - 0.3) ** 2)
        assert val >= 0.0

    def test_radial_integrand_independent_of_angular_order(self):
        vals = []
        for na in (4, 16, 64, 256):
            grid = make_disk_grid(60, na)
            vals.append(integrate(grid, lambda z: np.exp(-np.abs(z) ** 2)))
        assert max(vals) - min(vals) <= 1e-13


class TestCircleGrid:
    def test_weights_sum_to_one(self, circle_grid):
        assert math.fsum(circle_grid.weights) == pytest.approx(1.0, abs=1e-15)

    def test_nodes_unimodular(self, circle_grid):
        assert np.abs(np.abs(circle_grid.nodes) - 1.0).max() <= 1e-15

    def test_full_period_exponential_sums_to_exactly_zero(self, circle_grid):
        # antipodal construction for even orders: the multiset of node
        # values cancels exactly and fsum certifies the zero
        val = integrate(circle_grid, lambda z: z)
        assert val == 0.0

    def test_constant_integrates_to_exactly_one(self, circle_grid):
        assert integrate(circle_grid, lambda z: np.ones(z.shape)) == 1.0

    def test_trigonometric_moments(self, circle_grid):
        # |1 - z/2|^2 on the circle has mean 1 + 1/4
        val = integrate(circle_grid, lambda z: np.abs(1 - z / 2) ** 2)
        assert val == pytest.approx(1.25, abs=1e-14)

    def test_offset_grid_avoids_angle_zero(self):
        grid = make_circle_grid(64, offset=0.5)
        assert np.abs(grid.nodes - 1.0).min() > 1e-3


class TestRichardson:
    def test_constant_has_tiny_error_estimate(self):
        small = make_disk_grid(40, 64)
        large = make_disk_grid(80, 128)
        value, est = richardson_check(small, large, lambda z: np.ones(z.shape))
        assert value == pytest.approx(1.0, abs=1e-14)
        assert est < 1e-14

    def test_estimates_decrease_under_refinement(self):
        # branch-point integrand converges algebraically, so the
        # refinement differences sit well above the roundoff floor
        f = lambda z: np.sqrt(1.0 - np.abs(z))
        _, est1 = richardson_check(make_disk_grid(10, 16), make_disk_grid(20, 32), f)
        _, est2 = richardson_check(make_disk_grid(20, 32), make_disk_grid(40, 64), f)
        assert est2 < est1

    def test_poisson_estimate_certifies_accuracy(self):
        f = poisson_kernel(np.exp(0.3j))
        value, est = richardson_check(
            make_disk_grid(40, 80), make_disk_grid(80, 160), f
        )
        assert est < 1e-8
        assert value == pytest.approx(1.0, abs=1e-7)

    def test_interior_singularity_reported_finite(self):
        # all nodes interior: boundary-singular integrands stay finite
        small = make_disk_grid(20, 32)
        large = make_disk_grid(40, 64)
        value, est = richardson_check(small, large, poisson_kernel(1.0))
        assert np.isfinite(est) and np.isfinite(value)

    def test_insufficient_refinement_rejected(self):
        small = make_disk_grid(40, 64)
        not_double = make_disk_grid(60, 128)
        with pytest.raises(DomainError):
            richardson_check(small, not_double, lambda z: np.ones(z.shape))

    def test_mixed_grid_kinds_rejected(self):
        with pytest.raises(DomainError):
            richardson_check(
                make_disk_grid(10, 8), make_circle_grid(64), lambda z: z
            )


def test_grading_grows_angular_counts_near_boundary():
    grid = make_disk_grid(80, 64)
    assert max(grid.ring_counts) > 64
    assert min(grid.ring_counts) == 64


def test_summation_is_reproducible():
    grid = make_disk_grid(60, 128)
    f = poisson_kernel(np.exp(1.1j))
    vals = {integrate(grid, f) for _ in range(5)}
    assert len(vals) == 1
