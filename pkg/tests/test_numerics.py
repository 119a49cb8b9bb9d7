# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

import math
import unittest

import numpy as np
import pytest

from sdlab.errors import (
    ConfigError,
    DomainError,
    MaxSubdivisions,
    NonFiniteCoefficient,
    NonFiniteIntegrand,
    NumericalError,
    StencilOutsideDomain,
)
from sdlab.numerics import (
    Jet3Complex,
    Jet3Real,
    OdeProfile,
    clustered_grid,
    cumulative_gauss_legendre,
    integrate_linear_ode,
    jet_from_samples,
    quadrature,
    wirtinger_fd,
)

PI2 = 0.25 * math.pi ** 2


def constant(c):
    return lambda x: np.full(np.shape(x), float(c))


def classical(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 - x * x) ** 2


class TestLinearOde(unittest.TestCase):
    """Closed-form solutions of u'' + p u = 0 and u'' - p u = 0."""

    def test_constant_weight_gives_cosine(self):
        prof = integrate_linear_ode(constant(PI2), +1, 1.0, 0.0, eps=1e-3)
        x = prof.grid
        self.assertLessEqual(np.max(np.abs(prof.u - np.cos(0.5 * math.pi * x))), 1e-8)
        mid = np.linspace(-0.999, 0.999, 777)
        self.assertLessEqual(np.max(np.abs(prof.u_at(mid) - np.cos(0.5 * math.pi * mid))), 1e-8)

    def test_zero_weight_keeps_unit_solution(self):
        prof = integrate_linear_ode(constant(0.0), +1, 1.0, 0.0)
        self.assertTrue(np.all(prof.u == 1.0))
        self.assertTrue(np.all(prof.du == 0.0))

    def test_classical_weight_gives_sqrt(self):
        prof = integrate_linear_ode(classical, +1, 1.0, 0.0, eps=1e-3, tol=1e-12)
        x = prof.grid
        self.assertLessEqual(np.max(np.abs(prof.u - np.sqrt(1.0 - x * x))), 1e-8)

    def test_minus_sign_gives_cosh(self):
        prof = integrate_linear_ode(constant(1.0), -1, 1.0, 0.0)
        self.assertLessEqual(np.max(np.abs(prof.u - np.cosh(prof.grid))), 1e-8)

    def test_grid_is_symmetric_with_origin_node(self):
        prof = integrate_linear_ode(constant(PI2), +1, 1.0, 0.0, eps=1e-2)
        self.assertAlmostEqual(prof.lo, -0.99, places=12)
        self.assertAlmostEqual(prof.hi, 0.99, places=12)
        self.assertIn(0.0, prof.grid)
        self.assertTrue(np.all(np.diff(prof.grid) > 0))

    def test_initial_data_at_left_cut(self):
        eps = 1e-2
        prof = integrate_linear_ode(constant(PI2), +1, 0.0, 1.0, eps=eps, origin=-1.0 + eps)
        x = prof.grid
        expected = (2.0 / math.pi) * np.sin(0.5 * math.pi * (x + 1.0 - eps))
        self.assertLessEqual(np.max(np.abs(prof.u - expected)), 1e-8)

    def test_second_derivative_from_equation(self):
        prof = integrate_linear_ode(constant(PI2), +1, 1.0, 0.0)
        x = np.array([-0.5, 0.1, 0.7])
        np.testing.assert_allclose(prof.d2u_at(x), -PI2 * np.cos(0.5 * math.pi * x), atol=1e-8)
        np.testing.assert_allclose(prof.hermite_d2(x), prof.d2u_at(x), atol=1e-5)

    def test_wronskian_is_constant(self):
        p = lambda x: 1.0 + 0.5 * np.asarray(x) ** 2
        a = integrate_linear_ode(p, +1, 1.0, 0.0)
        b = integrate_linear_ode(p, +1, 0.0, 1.0)
        w = a.wronskian(b)
        self.assertLessEqual(np.max(np.abs(w - w[0])) / abs(w[0]), 1e-6)
        self.assertAlmostEqual(float(w[np.searchsorted(a.grid, 0.0)]), 1.0, places=12)

    def test_non_finite_coefficient(self):
        bad = lambda x: np.where(np.asarray(x) > 0.5, np.nan, 1.0)
        with self.assertRaises(NonFiniteCoefficient):
            integrate_linear_ode(bad, +1, 1.0, 0.0)

    def test_invalid_arguments(self):
        with self.assertRaises(ConfigError):
            integrate_linear_ode(constant(1.0), 0, 1.0, 0.0)
        with self.assertRaises(ConfigError):
            integrate_linear_ode(constant(1.0), +1, 1.0, 0.0, eps=1.5)
        with self.assertRaises(ConfigError):
            integrate_linear_ode(constant(1.0), +1, 1.0, 0.0, tol=0.0)
        with self.assertRaises(DomainError):
            integrate_linear_ode(constant(1.0), +1, 1.0, 0.0, eps=0.1, origin=0.95)

    def test_profile_rejects_queries_outside_domain(self):
        prof = integrate_linear_ode(constant(1.0), +1, 1.0, 0.0, eps=0.1)
        with self.assertRaises(DomainError):
            prof.u_at(0.95)


def test_profile_invariants():
    with pytest.raises(ValueError):
        OdeProfile(grid=[0.0, -0.1], u=[1.0, 1.0], du=[0.0, 0.0], sign=1)
    with pytest.raises(ValueError):
        OdeProfile(grid=[0.0, 0.1], u=[1.0], du=[0.0, 0.0], sign=1)
    with pytest.raises(ValueError):
        OdeProfile(grid=[0.0, 0.1], u=[1.0, 1.0], du=[0.0, 0.0], sign=2)
    with pytest.raises(NumericalError):
        OdeProfile(grid=[0.0, 0.1], u=[1.0, 0.0], du=[0.0, 0.0], sign=1)


@pytest.mark.parametrize("seed", range(20))
def test_sturm_comparison(seed):
    """u_p stays above u_q up to the first zero of u_q whenever p <= q."""

    rng = np.random.default_rng(seed)
    a, b, c = rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.5)
    p = lambda x: a + b * np.asarray(x) ** 2
    q = lambda x: a + c + (b + c) * np.asarray(x) ** 2

    up = integrate_linear_ode(p, +1, 1.0, 0.0, eps=1e-2)
    uq = integrate_linear_ode(q, +1, 1.0, 0.0, eps=1e-2)
    x = uq.grid[uq.grid >= 0.0]
    u_q = uq.u[uq.grid >= 0.0]
    zeros = np.nonzero(u_q <= 0.0)[0]
    stop = zeros[0] if zeros.size else x.size
    x, u_q = x[:stop], u_q[:stop]
    assert np.all(up.u_at(x) >= u_q - 1e-9)


class TestQuadrature(unittest.TestCase):
    def test_half_log_three(self):
        value = quadrature(lambda t: 1.0 / (1.0 - t * t), 0.0, 0.5, tol=1e-12)
        self.assertAlmostEqual(value, 0.5 * math.log(3.0), delta=1e-12)

    def test_empty_interval(self):
        self.assertEqual(quadrature(lambda t: math.nan, 0.3, 0.3), 0.0)

    def test_antisymmetric_and_additive(self):
        f = lambda t: math.exp(-t) * math.cos(3.0 * t)
        tol = 1e-11
        self.assertAlmostEqual(quadrature(f, 0.0, 1.0, tol), -quadrature(f, 1.0, 0.0, tol), delta=1e-15)
        whole = quadrature(f, -0.5, 0.8, tol)
        parts = quadrature(f, -0.5, 0.2, tol) + quadrature(f, 0.2, 0.8, tol)
        self.assertAlmostEqual(whole, parts, delta=2 * tol)

    def test_secant_squared_up_to_cut(self):
        eps = 1e-3
        value = quadrature(lambda t: 1.0 / math.cos(0.5 * math.pi * t) ** 2, 0.0, 1.0 - eps, tol=1e-7)
        self.assertAlmostEqual(value, (2.0 / math.pi) * math.tan(0.5 * math.pi * (1.0 - eps)), delta=1e-7)

    def test_non_finite_integrand(self):
        with self.assertRaises(NonFiniteIntegrand):
            quadrature(lambda t: math.nan, 0.0, 1.0)

    def test_max_subdivisions_reports_worst_interval(self):
        with self.assertRaises(MaxSubdivisions) as ctx:
            quadrature(lambda t: math.sin(1.0 / t), 0.0, 1.0, tol=1e-12, limit=3)
        lo, hi = ctx.exception.worst_interval
        self.assertLess(lo, hi)

    def test_bad_tolerance(self):
        with self.assertRaises(ConfigError):
            quadrature(lambda t: t, 0.0, 1.0, tol=-1.0)


def test_cumulative_gauss_legendre_is_exact_for_polynomials():
    nodes = np.linspace(-1.0, 1.0, 21)
    out = cumulative_gauss_legendre(nodes, lambda t: 3.0 * t * t, origin_index=10)
    np.testing.assert_allclose(out, nodes ** 3, atol=1e-14)


def test_cumulative_gauss_legendre_rejects_non_finite():
    with pytest.raises(NonFiniteIntegrand):
        cumulative_gauss_legendre(np.linspace(0.0, 1.0, 5), lambda t: np.full(np.shape(t), np.inf), 0)


def test_clustered_grid_shape():
    grid = clustered_grid(1e-3, 4000)
    assert grid.size == 4001
    assert abs(grid[2000]) < 1e-15
    assert grid[0] == pytest.approx(-0.999, abs=1e-15)
    assert grid[-1] == pytest.approx(0.999, abs=1e-15)
    np.testing.assert_allclose(grid, -grid[::-1], atol=1e-15)
    gaps = np.diff(grid)
    assert gaps[0] < gaps[2000]


class TestWirtinger(unittest.TestCase):
    def test_log_one_plus_abs_squared(self):
        est = wirtinger_fd(lambda z: math.log(1.0 + abs(z) ** 2), 0.3, h=1e-3)
        self.assertAlmostEqual(abs(est.s_z - 0.3 / 1.09), 0.0, delta=1e-6)
        # s_zzbar of log(1 + |z|^2) is (1 + |z|^2)^-2
        self.assertAlmostEqual(est.s_zzbar.real, 1.09 ** -2, delta=1e-5)

    def test_constant_field(self):
        est = wirtinger_fd(lambda z: 2.5, 0.1 + 0.2j)
        for value in (est.s_z, est.s_zbar, est.s_zz, est.s_zzbar):
            self.assertLessEqual(abs(value), 1e-10)

    def test_real_part(self):
        est = wirtinger_fd(lambda z: z.real, -0.2 + 0.4j)
        self.assertAlmostEqual(abs(est.s_z - 0.5), 0.0, delta=1e-8)
        self.assertAlmostEqual(abs(est.s_zbar - 0.5), 0.0, delta=1e-8)
        self.assertLessEqual(abs(est.s_zz), 1e-8)

    def test_error_falls_quadratically(self):
        z = 0.3 + 0.2j
        field = lambda w: -2.0 * math.log(abs(1.0 - w))
        exact = 1.0 / (1.0 - z)
        coarse = abs(wirtinger_fd(field, z, h=1e-2).s_z - exact)
        fine = abs(wirtinger_fd(field, z, h=5e-3).s_z - exact)
        self.assertTrue(3.5 < coarse / fine < 4.5)
        richer = abs(wirtinger_fd(field, z, h=1e-2, richardson=True).s_z - exact)
        self.assertLess(richer, fine)

    def test_stencil_must_stay_inside(self):
        with self.assertRaises(StencilOutsideDomain):
            wirtinger_fd(lambda z: 0.0, 0.9999, h=1e-3)
        with self.assertRaises(ConfigError):
            wirtinger_fd(lambda z: 0.0, 0.0, h=0.0)


class TestJets(unittest.TestCase):
    def test_real_jet_dimension_checks(self):
        jet = Jet3Real([1.0, 2.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0])
        self.assertEqual(jet.dim, 2)
        with self.assertRaises(ValueError):
            Jet3Real([1.0, 2.0], [0.0], [0.0, 0.0], [0.0, 0.0])
        with self.assertRaises(NumericalError):
            Jet3Real([math.inf], [0.0], [0.0], [0.0])

    def test_complex_jet_rejects_non_finite(self):
        self.assertEqual(Jet3Complex(1j, 2.0, 0.0).d3, 0j)
        with self.assertRaises(NumericalError):
            Jet3Complex(complex(math.nan, 0.0), 1.0, 0.0)

    def test_jet_from_samples_matches_exact_derivatives(self):
        curve = lambda t: np.array([math.sin(2.0 * t), t ** 3])
        jet = jet_from_samples(curve, 0.4, h=1e-3)
        np.testing.assert_allclose(jet.d1, [2.0 * math.cos(0.8), 3 * 0.16], atol=1e-5)
        np.testing.assert_allclose(jet.d2, [-4.0 * math.sin(0.8), 6 * 0.4], atol=1e-5)
        np.testing.assert_allclose(jet.d3, [-8.0 * math.cos(0.8), 6.0], atol=1e-5)
