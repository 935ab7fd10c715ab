import numpy as np
import pytest

from disklab import (
    DomainError,
    HarmonicBoundary,
    TaylorSeries,
    constant_series,
    dilation_report,
    energy,
    exp_reference,
    monomial,
)


class TestEnergy:
    def test_identity_function_uniform_weight(self, coarse_disk_grid, uniform):
        assert energy(monomial(1, 4), uniform, coarse_disk_grid) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_square_uniform_weight(self, coarse_disk_grid, uniform):
        # |f'|^2 = 4|z|^2 integrates to 4 * 1/2
        assert energy(monomial(2, 4), uniform, coarse_disk_grid) == pytest.approx(
            2.0, abs=1e-10
        )

    def test_identity_function_harmonic_weight(self, disk_grid, harm_weight):
        assert energy(monomial(1, 4), harm_weight, disk_grid) == pytest.approx(
            1.0, abs=1e-6
        )

    def test_constant_has_zero_energy(self, coarse_disk_grid, uniform):
        assert energy(constant_series(2.3 + 1j, 6), uniform, coarse_disk_grid) <= 1e-12

    def test_energy_is_quadratic(self, coarse_disk_grid, uniform):
        f = TaylorSeries([0.3, 1.0, -0.5j, 0.25])
        e1 = energy(f, uniform, coarse_disk_grid)
        e2 = energy(f.scale(2.0 - 1.0j), uniform, coarse_disk_grid)
        assert e2 == pytest.approx(abs(2.0 - 1.0j) ** 2 * e1, rel=1e-12)

    def test_energy_nonnegative(self, coarse_disk_grid, uniform):
        rng = np.random.default_rng(11)
        for _ in range(5):
            f = TaylorSeries(rng.normal(size=6) + 1j * rng.normal(size=6))
            assert energy(f, uniform, coarse_disk_grid) >= 0.0

    def test_energy_positive_for_nonconstant(self, coarse_disk_grid, uniform,
                                             harm_weight, disk_grid):
        f = TaylorSeries([1.0, 0.0, 0.3j])
        assert energy(f, uniform, coarse_disk_grid) > 1e-3
        assert energy(f, harm_weight, disk_grid) > 1e-3


class TestDilation:
    def test_identity_uniform_closed_form(self, coarse_disk_grid, uniform):
        # f = z: energy of f_r is r^2
        report = dilation_report(
            monomial(1, 4), uniform, (0.5, 0.9), coarse_disk_grid
        )
        assert report.entries[0][1] == pytest.approx(0.25, abs=1e-12)
        assert report.entries[1][1] == pytest.approx(0.81, abs=1e-12)
        assert report.nondecreasing

    def test_limit_toward_one_recovers_energy(self, coarse_disk_grid, uniform):
        f = exp_reference(32)
        full = energy(f, uniform, coarse_disk_grid)
        near = dilation_report(f, uniform, (0.9, 0.999), coarse_disk_grid)
        assert near.entries[-1][1] == pytest.approx(full, rel=1e-2)

    def test_exp_with_harmonic_weight_is_monotone(self, disk_grid, harm_weight):
        report = dilation_report(
            exp_reference(32), harm_weight, (0.3, 0.6, 0.9), disk_grid
        )
        assert report.nondecreasing
        energies = [e for _, e in report.entries]
        assert energies == sorted(energies)

    def test_monotone_for_random_polynomials_harmonic_weights(self, disk_grid):
        rng = np.random.default_rng(23)
        weights = [HarmonicBoundary(1.0), HarmonicBoundary(np.exp(2.1j))]
        for w in weights:
            for _ in range(3):
                f = TaylorSeries(rng.normal(size=11) + 1j * rng.normal(size=11))
                report = dilation_report(
                    f, w, (0.2, 0.4, 0.6, 0.8, 0.95), disk_grid, tol=1e-8
                )
                assert report.nondecreasing, report

    def test_radii_must_increase(self, coarse_disk_grid, uniform):
        with pytest.raises(DomainError):
            dilation_report(monomial(1, 2), uniform, (0.5, 0.5), coarse_disk_grid)

    def test_radii_must_be_interior(self, coarse_disk_grid, uniform):
        with pytest.raises(DomainError):
            dilation_report(monomial(1, 2), uniform, (0.5, 1.0), coarse_disk_grid)
