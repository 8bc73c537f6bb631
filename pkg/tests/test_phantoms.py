import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momentct.errors import CapabilityError
from momentct.phantoms import (
    DiskDensity,
    MomentTable,
    PolynomialDensity,
    SumOfDisksDensity,
    UniformDensity,
    analytic_radon,
    evaluate_density,
    exact_moment,
    unit_square_chord,
)

UNIFORM = UniformDensity()
POLY = PolynomialDensity.from_dict({(1, 1): 4.0})
DISK = DiskDensity.unit_mass(center=(0.5, 0.5), radius=0.25)
TWO_DISKS = SumOfDisksDensity(disks=(
    DiskDensity(center=(0.3, 0.35), radius=0.15, amplitude=0.5 / (math.pi * 0.15**2)),
    DiskDensity(center=(0.65, 0.6), radius=0.2, amplitude=0.5 / (math.pi * 0.2**2)),
))
ALL = [UNIFORM, POLY, DISK, TWO_DISKS]


class TestMoments:
    def test_uniform_values(self):
        assert exact_moment(UNIFORM, 0, 0) == 1.0
        assert exact_moment(UNIFORM, 1, 1) == pytest.approx(0.25)
        assert exact_moment(UNIFORM, 3, 2) == pytest.approx(1.0 / 12.0)

    def test_poly_values(self):
        assert exact_moment(POLY, 0, 0) == pytest.approx(1.0)
        assert exact_moment(POLY, 1, 1) == pytest.approx(4.0 / 9.0)

    def test_exact_fractions(self):
        assert UNIFORM.moment_fraction(2, 3) == Fraction(1, 12)
        assert POLY.moment_fraction(1, 1) == Fraction(4, 9)
        with pytest.raises(CapabilityError):
            DISK.moment_fraction(0, 0)

    def test_disk_moments_against_quadrature_oracle(self):
        integrate = pytest.importorskip("scipy.integrate")
        cx, cy, r, amp = 0.5, 0.5, 0.25, DISK.amplitude
        for a1, a2 in [(0, 0), (1, 0), (2, 1), (3, 3), (0, 4)]:
            # polar coordinates keep the integrand smooth, so the adaptive
            # quadrature reaches oracle grade
            val, err = integrate.dblquad(
                lambda phi, rho: amp * rho
                * (cx + rho * math.cos(phi)) ** a1
                * (cy + rho * math.sin(phi)) ** a2,
                0.0, r, 0.0, 2.0 * math.pi,
                epsabs=1e-12, epsrel=1e-12,
            )
            assert exact_moment(DISK, a1, a2) == pytest.approx(val, abs=1e-11)

    def test_all_phantoms_unit_mass(self):
        for d in ALL:
            assert d.mass == pytest.approx(1.0, abs=1e-14)

    def test_mass_matches_numerical_integration(self):
        g = np.linspace(0.0, 1.0, 801)
        xx, yy = np.meshgrid(g, g, indexing="ij")
        for d in ALL:
            grid = np.asarray(d.evaluate(xx, yy))
            mass = np.trapezoid(np.trapezoid(grid, g, axis=1), g)
            tol = 1e-9 if d in (UNIFORM, POLY) else 5e-3  # disks are discontinuous
            assert mass == pytest.approx(d.mass, abs=tol)

    @settings(deadline=None, max_examples=20)
    @given(st.sampled_from(range(len(ALL))), st.integers(0, 6), st.integers(0, 6))
    def test_moment_monotonicity(self, di, a1, a2):
        d = ALL[di]
        assert exact_moment(d, a1 + 1, a2) <= exact_moment(d, a1, a2) + 1e-15
        assert exact_moment(d, a1, a2 + 1) <= exact_moment(d, a1, a2) + 1e-15

    def test_bounded_density_moment_bound(self):
        for d in ALL:
            M = d.sup_norm
            for a1 in range(5):
                for a2 in range(5):
                    assert exact_moment(d, a1, a2) <= M / ((a1 + 1) * (a2 + 1)) + 1e-12


class TestEvaluate:
    def test_uniform(self):
        assert evaluate_density(UNIFORM, 0.3, 0.7) == 1.0

    def test_disk_center_and_corner(self):
        assert evaluate_density(DISK, 0.5, 0.5) == pytest.approx(16.0 / math.pi)
        assert evaluate_density(DISK, 0.0, 0.0) == 0.0

    def test_nonnegative_everywhere(self):
        rng = np.random.default_rng(7)
        pts = rng.uniform(0, 1, size=(2, 500))
        for d in ALL:
            assert np.all(np.asarray(d.evaluate(pts[0], pts[1])) >= 0.0)

    def test_outside_domain(self):
        with pytest.raises(ValueError):
            evaluate_density(UNIFORM, 1.5, 0.5)
        with pytest.raises(ValueError):
            evaluate_density(DISK, 0.5, -0.2)

    def test_poly_rejects_negative_coefficont_density(self):
        with pytest.raises(ValueError):
            PolynomialDensity.from_dict({(0, 0): -1.0})


class TestAnalyticRadon:
    def test_uniform_horizontal_line(self):
        assert analytic_radon(UNIFORM, math.pi / 2, 0.5) == pytest.approx(1.0)

    def test_uniform_diagonal(self):
        # line through the square's center perpendicular to (1,1)/sqrt2
        val = analytic_radon(UNIFORM, math.pi / 4, math.sqrt(2.0) / 2.0)
        assert val == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_disk_center_line(self):
        # chord through the center: amplitude * 2r = (16/pi) * 0.5
        got = analytic_radon(DISK, 1.234, 0.5 * math.cos(1.234) + 0.5 * math.sin(1.234))
        assert got == pytest.approx(8.0 / math.pi, rel=1e-12)

    @given(st.floats(0.0, 2.0 * math.pi), st.floats(1.5, 10.0))
    def test_line_missing_support(self, theta, p):
        for d in ALL:
            if isinstance(d, PolynomialDensity):
                continue
            assert analytic_radon(d, theta, p) == 0.0

    def test_poly_has_no_closed_form(self):
        with pytest.raises(CapabilityError):
            analytic_radon(POLY, 0.3, 0.2)

    def test_chord_against_brute_force_oracle(self):
        # oracle: count fine arc-length samples inside the square
        rng = np.random.default_rng(3)
        for _ in range(25):
            theta = rng.uniform(0, math.pi)
            p = rng.uniform(-1.2, 1.5)
            t = np.linspace(-2.0, 2.0, 200001)
            x1 = p * math.cos(theta) - t * math.sin(theta)
            x2 = p * math.sin(theta) + t * math.cos(theta)
            inside = (x1 >= 0) & (x1 <= 1) & (x2 >= 0) & (x2 <= 1)
            brute = inside.sum() * (t[1] - t[0])
            assert unit_square_chord(theta, p) == pytest.approx(brute, abs=1e-4)

    def test_mass_conservation_over_offsets(self):
        # vectorized closed forms; fine grid because the disk profile has
        # square-root edges (trapezoid error ~ h^1.5 there).  Exactly
        # axis-aligned angles are excluded: there the uniform row is a step
        # whose jump can sit on a grid node, and any quadrature of such
        # samples is off by O(h) no matter the rule.
        ps = np.linspace(-1.6, 1.6, 500001)
        for theta in (0.3, 1.0, math.pi / 2 - 6.1e-3, 2.5):
            c, s = math.cos(theta), math.sin(theta)
            rows_uniform = np.array([unit_square_chord(theta, p) for p in ps[::125]])
            assert np.trapezoid(rows_uniform, ps[::125]) == pytest.approx(1.0, abs=1e-6)
            for d in (DISK, TWO_DISKS):
                disks = d.disks if isinstance(d, SumOfDisksDensity) else (d,)
                row = np.zeros_like(ps)
                for disk in disks:
                    dd = disk.center[0] * c + disk.center[1] * s - ps
                    row += disk.amplitude * 2.0 * np.sqrt(
                        np.maximum(disk.radius**2 - dd * dd, 0.0)
                    )
                assert np.trapezoid(row, ps) == pytest.approx(d.mass, abs=1e-6)


class TestMomentTable:
    def test_from_density_and_lookup(self):
        t = MomentTable.from_density(UNIFORM, 3)
        assert t.value(1, 2) == pytest.approx(1.0 / 6.0)
        assert not t.is_exact()
        t2 = MomentTable.from_density(UNIFORM, 3, exact=True)
        assert t2.value(1, 2) == Fraction(1, 6)
        assert t2.is_exact()

    def test_validates_triangular_completeness(self):
        with pytest.raises(ValueError):
            MomentTable(max_order=1, values={(0, 0): 1.0})
        with pytest.raises(ValueError):
            MomentTable(max_order=0, values={(0, 0): 1.0, (1, 1): 0.1})

    def test_disk_not_inside_square_rejected(self):
        with pytest.raises(ValueError):
            DiskDensity(center=(0.1, 0.5), radius=0.2, amplitude=1.0)
