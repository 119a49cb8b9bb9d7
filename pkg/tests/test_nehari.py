# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

import csv
import math
import unittest

import numpy as np
import pytest

from sdlab.errors import (
    ConfigError,
    ConvexityViolated,
    DomainError,
    DoubleZeroDetected,
    HypothesisFailed,
    UnknownKind,
)
from sdlab.harmonic import hyperbolic_distance
from sdlab.metric import H_bound
from sdlab.nehari import (
    Flag,
    NehariFunction,
    NehariKind,
    ProfileKind,
    builtin_nehari,
    check_F_growth,
    closed_form_F,
    closed_form_G,
    closed_form_G_classical,
    closed_form_u0,
    closed_form_u_minus_classical,
    companion_H,
    disconjugacy_check,
    extremal_F,
    extremal_G,
    extremal_scan,
    schwarzian_from_derivative,
)

EPS = 1e-3
WINDOW = np.linspace(-0.99, 0.99, 199)


class TestBuiltinProfiles(unittest.TestCase):
    """The ODE-built F and G against their closed forms."""

    @classmethod
    def setUpClass(cls):
        cls.classical = builtin_nehari(NehariKind.CLASSICAL)
        cls.pi2 = builtin_nehari(NehariKind.PI2)
        cls.pokornyi = builtin_nehari(NehariKind.POKORNYI)
        cls.F = {p.kind: extremal_F(p, EPS) for p in (cls.classical, cls.pi2, cls.pokornyi)}
        cls.G_classical = extremal_G(cls.classical, EPS)
        cls.G_pi2 = extremal_G(cls.pi2, EPS)

    def test_F_matches_closed_forms(self):
        for kind, profile in self.F.items():
            with self.subTest(kind=kind.value):
                self.assertIs(profile.kind, ProfileKind.F)
                np.testing.assert_allclose(profile.F(WINDOW), closed_form_F(kind, WINDOW), rtol=1e-7, atol=1e-9)

    def test_u0_matches_closed_forms(self):
        for kind, profile in self.F.items():
            with self.subTest(kind=kind.value):
                np.testing.assert_allclose(profile.base.u_at(WINDOW), closed_form_u0(kind, WINDOW), rtol=1e-8, atol=1e-10)

    def test_F_is_odd_and_vanishes_at_origin(self):
        profile = self.F[NehariKind.POKORNYI]
        self.assertAlmostEqual(profile.F(0.0), 0.0, places=14)
        np.testing.assert_allclose(profile.F(-WINDOW), -profile.F(WINDOW), rtol=1e-9, atol=1e-12)

    def test_classical_G_and_its_boundary_value(self):
        np.testing.assert_allclose(self.G_classical.F(WINDOW), closed_form_G(NehariKind.CLASSICAL, WINDOW), rtol=1e-7, atol=1e-9)
        np.testing.assert_allclose(self.G_classical.base.u_at(WINDOW), closed_form_u_minus_classical(WINDOW), rtol=1e-8)
        self.assertEqual(self.G_classical.endpoint_value(), 1.0 / math.sqrt(2.0))
        self.assertLess(abs(self.G_classical.F(0.99) - 1.0 / math.sqrt(2.0)), 1e-2)

    def test_constant_G_is_a_scaled_tanh(self):
        np.testing.assert_allclose(self.G_pi2.F(WINDOW), (2.0 / math.pi) * np.tanh(0.5 * math.pi * WINDOW), rtol=1e-7, atol=1e-9)
        self.assertAlmostEqual(self.G_pi2.endpoint_value(), (2.0 / math.pi) * math.tanh(0.5 * math.pi), places=14)

    def test_F_endpoint_is_infinite_for_builtins(self):
        for profile in self.F.values():
            self.assertEqual(profile.endpoint_value(), math.inf)

    def test_schwarzian_of_profiles(self):
        for kind, profile in self.F.items():
            p = builtin_nehari(kind)
            for x in np.linspace(-0.7, 0.7, 15):
                expected = 2.0 * float(p(x))
                with self.subTest(kind=kind.value, x=float(x)):
                    self.assertLess(abs(schwarzian_from_derivative(profile, float(x)) - expected), 1e-4 * max(1.0, expected))

        for x in (-0.5, 0.0, 0.4):
            expected = -2.0 * float(self.classical(x))
            self.assertLess(abs(schwarzian_from_derivative(self.G_classical, x) - expected), 1e-4 * abs(expected))

    def test_jet_of_classical_F(self):
        x = 0.3
        jet = self.F[NehariKind.CLASSICAL].jet(x)
        w = 1.0 - x * x
        self.assertAlmostEqual(jet.value[0], math.atanh(x), places=8)
        self.assertLess(abs(jet.d1[0] - 1.0 / w), 1e-7)
        self.assertLess(abs(jet.d2[0] - 2.0 * x / w ** 2), 1e-6)
        self.assertLess(abs(jet.d3[0] - (2.0 + 6.0 * x * x) / w ** 3), 1e-5)

    def test_second_independent_solution(self):
        profile = self.F[NehariKind.CLASSICAL]
        xs = np.linspace(-0.9, 0.9, 37)
        np.testing.assert_allclose(profile.u_plus_independent(xs), np.sqrt(1.0 - xs ** 2) * np.arctanh(xs), rtol=1e-7, atol=1e-10)
        with self.assertRaises(ConfigError):
            self.G_classical.u_plus_independent(0.2)

    def test_queries_outside_the_cut_are_rejected(self):
        with self.assertRaises(DomainError):
            self.F[NehariKind.CLASSICAL].F(0.9995)

    def test_companion_H_agrees_with_bound(self):
        lambda0, sigma = 2.0, 0.5
        H = companion_H(self.classical, lambda0, sigma, EPS)
        for r in (0.2, 0.5, 0.9):
            with self.subTest(r=r):
                self.assertLess(abs(float(H.F(r)) - H_bound(self.G_classical, lambda0, sigma, r)), 1e-7)
        with self.assertRaises(DomainError):
            companion_H(self.classical, 0.0, sigma)


class TestScans(unittest.TestCase):
    """Disconjugacy, extremality and growth on the cut domain."""

    def test_builtins_are_disconjugate(self):
        for kind in (NehariKind.CLASSICAL, NehariKind.PI2, NehariKind.POKORNYI):
            with self.subTest(kind=kind.value):
                report = disconjugacy_check(builtin_nehari(kind), EPS)
                self.assertTrue(report.ok)
                self.assertIsNone(report.witness)
                self.assertEqual(report.evidence, "numerical evidence")

    def test_oversized_constant_has_a_witness(self):
        p = builtin_nehari(NehariKind.PI2).scaled(1.5)
        report = disconjugacy_check(p, EPS)
        self.assertFalse(report.ok)
        left, right = report.witness
        zero = 1.0 / math.sqrt(1.5)
        self.assertLess(abs(right - zero), 1e-3)
        self.assertLess(abs(left + zero), 1e-3)

    def test_double_zero_is_raised_for_F(self):
        p = builtin_nehari(NehariKind.CLASSICAL).scaled(1.5)
        with self.assertRaises(DoubleZeroDetected) as ctx:
            extremal_F(p, EPS)
        self.assertIsNotNone(ctx.exception.witness)
        self.assertLess(abs(ctx.exception.witness[1] - math.tanh(math.pi / (2.0 * math.sqrt(0.5)))), 1e-3)

    def test_extremal_scan_for_constant(self):
        c = extremal_scan(builtin_nehari(NehariKind.PI2), eps=EPS)
        self.assertLess(abs(c - 1.0 / (1.0 - EPS) ** 2), 1e-3)

    def test_extremal_scan_for_classical_is_resolution_limited(self):
        c = extremal_scan(builtin_nehari(NehariKind.CLASSICAL), eps=EPS)
        expected = 1.0 + (math.pi / (2.0 * math.atanh(1.0 - EPS))) ** 2
        self.assertAlmostEqual(expected, 1.171, places=3)
        self.assertLess(abs(c - expected), 2e-3)

    def test_extremal_scan_rejects_bad_arguments(self):
        p = builtin_nehari(NehariKind.PI2)
        with self.assertRaises(ConfigError):
            extremal_scan(p, c_max=1.0)
        with self.assertRaises(HypothesisFailed):
            extremal_scan(p.scaled(2.0))

    def test_growth_holds_for_builtins(self):
        for kind in (NehariKind.CLASSICAL, NehariKind.PI2, NehariKind.POKORNYI):
            with self.subTest(kind=kind.value):
                report = check_F_growth(extremal_F(builtin_nehari(kind), EPS))
                self.assertTrue(report.ok)
                self.assertGreater(report.min_value, 1.0 - 1e-8)

    def test_growth_fails_for_small_constant(self):
        p = NehariFunction.custom(lambda x: np.full(np.shape(x), 0.5), flags=("even", "positive"), label="half")
        report = check_F_growth(extremal_F(p, EPS))
        self.assertFalse(report.ok)
        self.assertLess(report.first_violation, 0.1)

    def test_growth_needs_F_profile(self):
        with self.assertRaises(ConfigError):
            check_F_growth(extremal_G(builtin_nehari(NehariKind.PI2), EPS))

    def test_convexity_violation_for_negative_weight(self):
        p = NehariFunction.custom(lambda x: np.full(np.shape(x), -2.0), label="negative")
        with self.assertRaises(ConvexityViolated):
            extremal_G(p, EPS)


class TestNehariFunction(unittest.TestCase):
    """Construction, scaling and flag verification of weights."""

    def test_builtin_lookup(self):
        p = builtin_nehari("classical_nehari")
        self.assertIs(p.kind, NehariKind.CLASSICAL)
        self.assertTrue(p.has(Flag.EXTREMAL))
        with self.assertRaises(UnknownKind):
            builtin_nehari("bogus")
        with self.assertRaises(UnknownKind):
            builtin_nehari("custom")

    def test_scaling_drops_extremality(self):
        p = builtin_nehari(NehariKind.PI2)
        half = p.scaled(0.5)
        self.assertFalse(half.has(Flag.EXTREMAL))
        self.assertTrue(half.has(Flag.POSITIVE))
        self.assertTrue(p.scaled(1.0, extremal=True).has(Flag.EXTREMAL))
        self.assertAlmostEqual(float(half(0.3)), 0.5 * math.pi ** 2 / 4.0, places=14)
        self.assertEqual(half.name, "0.5*constant_pi2")
        with self.assertRaises(ConfigError):
            p.scaled(0.0)

    def test_builtin_flags_verify(self):
        for kind in (NehariKind.CLASSICAL, NehariKind.PI2, NehariKind.POKORNYI):
            self.assertEqual(builtin_nehari(kind).verify_flags(EPS), ())

    def test_false_flags_are_reported(self):
        p = NehariFunction.custom(
            lambda x: 1.0 / (1.0 + np.square(x)),
            flags=(Flag.EVEN, Flag.POSITIVE, Flag.MONOTONE_NONDECREASING),
        )
        self.assertEqual(p.verify_flags(EPS), (Flag.MONOTONE_NONDECREASING,))

        lopsided = NehariFunction.custom(lambda x: 1.0 + 0.1 * np.asarray(x), flags=("even",))
        self.assertEqual(lopsided.verify_flags(EPS), (Flag.EVEN,))

    def test_closed_forms_reject_boundary(self):
        with self.assertRaises(DomainError):
            closed_form_F(NehariKind.CLASSICAL, 1.0)
        with self.assertRaises(UnknownKind):
            closed_form_G(NehariKind.POKORNYI, 0.5)


def _write(tmp_path, text):
    path = tmp_path / "weight.txt"
    path.write_text(text, encoding="utf-8")
    return path


def test_p_file_round_trips_classical_samples(tmp_path):
    xs = np.linspace(0.0, 0.9, 91)
    body = "# flags: decay_nonincreasing, monotone_nondecreasing\n"
    body += "\n".join(f"{x:.17g} {1.0 / (1.0 - x * x) ** 2:.17g}" for x in xs)
    p = NehariFunction.from_file(_write(tmp_path, body))

    assert p.kind is NehariKind.CUSTOM
    assert p.label == "weight"
    assert p.has(Flag.EVEN) and p.has(Flag.MONOTONE_NONDECREASING)
    assert abs(float(p(0.45)) - 1.0 / (1.0 - 0.45 ** 2) ** 2) < 1e-4
    assert float(p(-0.45)) == float(p(0.45))
    # past the last sample the decay (1 - x^2)^2 p stays at 1
    assert abs(float(p(0.95)) - 1.0 / (1.0 - 0.95 ** 2) ** 2) < 1e-9


@pytest.mark.parametrize(
    "body, message",
    [
        ("0 1\n0.5 -2\n", "p must be positive"),
        ("0 1\n", "at least two samples"),
        ("0 1 2\n0.5 1\n", "two columns"),
        ("0 1\n0.5 abc\n", "non-numeric"),
        ("0 1\n1.0 2\n", "[0, 1)"),
        ("# flags: wobbly\n0 1\n0.5 2\n", "unknown flag"),
    ],
)
def test_p_file_errors(tmp_path, body, message):
    with pytest.raises(ConfigError, match=message.replace("[", r"\[").replace(")", r"\)")):
        NehariFunction.from_file(_write(tmp_path, body))


def test_missing_p_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        NehariFunction.from_file(tmp_path / "absent.txt")


def test_closed_form_G_classical():
    assert closed_form_G_classical(0.0) == 0.0
    assert closed_form_G_classical(-0.4) == pytest.approx(-closed_form_G_classical(0.4), abs=1e-15)
    assert closed_form_G_classical(0.999999) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-6)
    with pytest.raises(DomainError):
        closed_form_G_classical(1.0)


def test_profile_csv(tmp_path):
    profile = extremal_F(builtin_nehari(NehariKind.CLASSICAL))
    path = tmp_path / "F.csv"
    profile.to_csv(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "u", "du", "F", "dF", "sign"]
    assert len(rows) == profile.base.grid.size + 1
    middle = rows[1 + int(np.searchsorted(profile.base.grid, 0.0))]
    assert float(middle[0]) == 0.0
    assert float(middle[3]) == 0.0
    assert float(middle[4]) == pytest.approx(1.0)
    assert middle[5] == "1"
    for row in rows[1:]:
        for cell in row[:5]:
            float(cell)


@pytest.mark.parametrize("kind", [NehariKind.CLASSICAL, NehariKind.PI2, NehariKind.POKORNYI])
def test_F_expands_hyperbolic_distance(kind):
    profile = extremal_F(builtin_nehari(kind))
    rng = np.random.default_rng(23)
    for x1, x2 in rng.uniform(-0.95, 0.95, size=(60, 2)):
        a, b = float(x1), float(x2)
        gap = abs(float(profile.F(a)) - float(profile.F(b)))
        assert gap >= hyperbolic_distance(a, b) - 1e-7
