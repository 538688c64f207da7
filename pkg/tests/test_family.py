from _testutils import *

import unittest

import numpy as np

from holocircles.backend.base import BackendError, BreakpointError, RangeError
from holocircles.backend.expression import ExpressionFamily, PiecewiseFamily
from holocircles.family import DiscPosition, eval_family, point_in_disc, validate_family


class EvalFamilyTestCase(unittest.TestCase):
    def setUp(self):
        self.family = bundled_family('linear')

    def test_values_and_derivatives(self):
        jet = eval_family(self.family, 0.3, order=3)
        self.assertAlmostEqual(jet.c0, 0.3)
        self.assertEqual(jet.c1, 1)
        self.assertEqual(jet.c2, 0)
        self.assertEqual(jet.r0, 1)
        self.assertEqual(jet.order, 3)

    def test_range_is_closed(self):
        self.assertAlmostEqual(eval_family(self.family, -1.1).c0, -1.1)
        self.assertAlmostEqual(eval_family(self.family, 1.1).c0, 1.1)

    def test_outside_range(self):
        with self.assertRaisesRegex(RangeError, r't=1.2 outside range \[-1.1, 1.1\]'):
            eval_family(self.family, 1.2)

    def test_breakpoint_needs_side(self):
        hairpin = bundled_family('hairpin')
        self.assertEqual(eval_family(hairpin, 3.0).c0, 0)
        with self.assertRaises(BreakpointError):
            eval_family(hairpin, 3.0, order=1)
        left = eval_family(hairpin, 3.0, order=2, side='left')
        right = eval_family(hairpin, 3.0, order=2, side='right')
        self.assertAlmostEqual(left.c1, right.c1)
        self.assertAlmostEqual(left.c2, 0)
        self.assertAlmostEqual(abs(right.c2), 1 / 0.75)

    def test_arc_derivatives(self):
        jet = eval_family(bundled_family('arc'), np.pi / 2, order=2)
        self.assertAlmostEqual(jet.c0, 2j)
        self.assertAlmostEqual(jet.c1, -2)
        self.assertAlmostEqual(jet.c2, -2j)


class PointInDiscTestCase(unittest.TestCase):
    def test_classification(self):
        family = bundled_family('linear')
        self.assertEqual(point_in_disc(family, 0, 0.4j), DiscPosition.INTERIOR)
        self.assertEqual(point_in_disc(family, 0, 1j), DiscPosition.BOUNDARY)
        self.assertEqual(point_in_disc(family, 0.5, 2j), DiscPosition.EXTERIOR)

    def test_tolerance_must_be_positive(self):
        with self.assertRaises(ValueError):
            point_in_disc(bundled_family('linear'), 0, 0, tol=0)


class ValidateFamilyTestCase(unittest.TestCase):
    def test_linear_family_passes(self):
        report = validate_family(bundled_family('linear'))
        self.assertTrue(report.overall)
        self.assertAlmostEqual(report['a'].margin, 0.2, delta=1e-12)
        self.assertEqual(report['a'].witness, (-1.1, 1.1))
        self.assertAlmostEqual(report['d'].margin, 1.0)

    def test_short_linear_family_fails_end_condition(self):
        family = ExpressionFamily('t', '1', [-0.9, 0.9])
        report = validate_family(family)
        self.assertFalse(report.overall)
        self.assertFalse(report['a'].passed)
        self.assertAlmostEqual(report['a'].margin, -0.2, delta=1e-12)
        self.assertEqual([v.name for v in report.failures()], ['a'])

    def test_self_intersecting_centers_fail_injectivity(self):
        # c = t² − 1 − i(t³ − t) crosses itself at 0 for t = ±1
        family = ExpressionFamily('t^2 - 1 - i*(t^3 - t)', '0.1', [-1.5, 1.5])
        report = validate_family(family)
        self.assertFalse(report['b'].passed)
        self.assertLess(report['b'].margin, 1e-6)

    def test_self_crossing_is_refined_to_the_crossing(self):
        family = ExpressionFamily('t^2 - 1 - i*(t^3 - t)', '0.1', [-1.5, 1.5])
        for n in (511, 512):
            verdict = validate_family(family, n)['b']
            self.assertFalse(verdict.passed)
            self.assertLess(verdict.margin, 1e-12)
            self.assertAlmostEqual(verdict.witness[0], -1, delta=1e-9)
            self.assertAlmostEqual(verdict.witness[1], 1, delta=1e-9)
            self.assertEqual(verdict.note, 'sampled injectivity')

    def test_injectivity_note_is_not_repeated(self):
        verdict = validate_family(bundled_family('linear'))['b']
        self.assertTrue(verdict.passed)
        self.assertEqual(verdict.note, 'sampled injectivity')

    def test_nested_circles_fail_containment(self):
        family = ExpressionFamily('0.1*t', '1 + t', [0, 3])
        report = validate_family(family)
        self.assertFalse(report['c'].passed)
        self.assertFalse(report['d'].passed)

    def test_radius_growing_as_fast_as_centers_fails_speed(self):
        family = ExpressionFamily('t', '2 + t', [0, 5])
        report = validate_family(family)
        self.assertFalse(report['d'].passed)
        self.assertAlmostEqual(report['d'].margin, 0.0, delta=1e-12)

    def test_bundled_families_pass(self):
        for name in ('linear', 'strip', 'cone', 'arc', 'hairpin'):
            with self.subTest(family=name):
                self.assertTrue(validate_family(bundled_family(name)).overall)

    def test_hairpin_end_margin(self):
        report = validate_family(bundled_family('hairpin'))
        self.assertAlmostEqual(report['a'].margin, 0.5, delta=1e-12)

    def test_report_serialises(self):
        data = validate_family(bundled_family('linear')).to_dict()
        self.assertIs(data['overall'], True)
        self.assertEqual(sorted(data['conditions']), ['a', 'b', 'c', 'd'])
        self.assertIs(data['conditions']['a']['passed'], True)

    def test_too_few_samples(self):
        with self.assertRaises(ValueError):
            validate_family(bundled_family('linear'), n_samples=16)


class PiecewiseFamilyTestCase(unittest.TestCase):
    def test_discontinuous_pieces_are_rejected(self):
        pieces = [ExpressionFamily('t', '1', [0, 1]), ExpressionFamily('t + 1', '1', [1, 2])]
        with self.assertRaisesRegex(BackendError, "discontinuous at t=1"):
            PiecewiseFamily(pieces)

    def test_breakpoints_at_joins(self):
        hairpin = bundled_family('hairpin')
        self.assertEqual(len(hairpin.breakpoints), 2)
        self.assertAlmostEqual(hairpin.breakpoints[0], 3)
        self.assertAlmostEqual(hairpin.breakpoints[1], 3 + 0.75 * np.pi)
