from _testutils import *

import unittest

import numpy as np

from scipy.spatial.distance import directed_hausdorff

from holocircles.backend.expression import ExpressionFamily
from holocircles.critical import (DiscriminantError, build_critical_curves,
                                  critical_values_oracle, curvature_radius,
                                  distance_to_critical, polyline_distance, sliding_points,
                                  tangency_case)


def _hausdorff(a, b):
    a = np.column_stack([a.real, a.imag])
    b = np.column_stack([b.real, b.imag])
    return max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])


class SlidingPointsTestCase(unittest.TestCase):
    def test_linear_family(self):
        family = bundled_family('linear')
        for t in (-1.0, 0.0, 0.6):
            plus, minus = sliding_points(family, t)
            self.assertAlmostEqual(plus, t - 1j)
            self.assertAlmostEqual(minus, t + 1j)

    def test_points_lie_on_their_circle(self):
        for name in ('cone', 'arc', 'hairpin'):
            family = bundled_family(name)
            for t in np.linspace(family.alpha, family.beta, 13)[1:-1]:
                if t in family.breakpoints:
                    continue
                c, r = (x[0] for x in family.derivatives(np.array(t), 0))
                with self.subTest(family=name, t=t):
                    for p in sliding_points(family, t):
                        self.assertAlmostEqual(abs(p - c), float(r), delta=1e-10)

    def test_arc_family(self):
        family = bundled_family('arc')
        t = 0.7
        plus, minus = sliding_points(family, t)
        self.assertAlmostEqual(plus, 3 * np.exp(1j * t))
        self.assertAlmostEqual(minus, np.exp(1j * t))

    def test_discriminant(self):
        family = ExpressionFamily('t', '2*t + 1', [0, 1])
        with self.assertRaisesRegex(DiscriminantError, 'discriminant <= 0'):
            sliding_points(family, 0.5)
        with self.assertRaises(DiscriminantError):
            build_critical_curves(family, 64)


class CriticalSetTestCase(unittest.TestCase):
    def test_linear_branches_match_jacobian_oracle(self):
        family = bundled_family('linear')
        critical = build_critical_curves(family)
        plus, minus = critical.branches
        np.testing.assert_allclose(plus.points, plus.t - 1j, atol=1e-12)
        np.testing.assert_allclose(minus.points, minus.t + 1j, atol=1e-12)
        oracle = critical_values_oracle(family, (1024, 256))
        branches = np.concatenate([b.points for b in critical.branches])
        self.assertLess(_hausdorff(oracle, branches), 1e-6)
        # oracle values lie on P exactly
        self.assertLess(max(min(abs(z.imag - 1), abs(z.imag + 1)) for z in oracle), 1e-6)

    def test_on_circle_property(self):
        critical = build_critical_curves(bundled_family('linear'))
        for branch in critical.branches:
            np.testing.assert_allclose(np.abs(branch.points - branch.t), 1, atol=1e-10)

    def test_linear_is_flat_case1(self):
        family = bundled_family('linear')
        critical = build_critical_curves(family)
        for branch in critical.branches:
            self.assertTrue(np.all(np.isinf(branch.curvature_radius)))
            for t in (-0.5, 0.0, 0.9):
                case = tangency_case(family, branch, t)
                self.assertEqual(case.label, 'case1')
                self.assertTrue(np.isinf(case.rho))
        self.assertTrue(critical.simplicity)
        self.assertEqual(critical.singular_points, ())

    def test_arc_cases(self):
        family = bundled_family('arc')
        outer = tangency_case(family, +1, 1.0)
        inner = tangency_case(family, -1, 1.0)
        self.assertEqual(outer.label, 'case1')
        self.assertEqual(outer.tangency, 'interior')
        self.assertAlmostEqual(outer.rho, 3.0)
        self.assertEqual(inner.label, 'case1')
        self.assertEqual(inner.tangency, 'exterior')
        self.assertAlmostEqual(inner.rho, 1.0)

    def test_case2_when_envelope_curves_faster_than_circle(self):
        family = ExpressionFamily('0.5*exp(i*t)', '1', [0, 3])
        case = tangency_case(family, -1, 1.0)
        self.assertEqual(case.label, 'case2')
        self.assertAlmostEqual(case.rho, 0.5)
        self.assertEqual(tangency_case(family, +1, 1.0).label, 'case1')

    def test_curvature_radius_of_circle(self):
        t = np.linspace(0, 1, 5)
        d1, d2 = 2j * np.exp(1j * t), -2 * np.exp(1j * t)
        np.testing.assert_allclose(curvature_radius(d1, d2), 2)
        self.assertTrue(np.isinf(curvature_radius(np.array([1 + 0j]), np.array([0j]))[0]))

    def test_distances(self):
        critical = build_critical_curves(bundled_family('linear'))
        self.assertAlmostEqual(distance_to_critical(critical, 0.4j), 0.6)
        self.assertAlmostEqual(polyline_distance(np.array([0, 1]), 0.5 + 2j), 2.0)
        self.assertAlmostEqual(polyline_distance(np.array([0, 1]), 3), 2.0)
