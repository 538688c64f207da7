from _testutils import *

import unittest

import numpy as np

from holocircles.backend.base import BaseFunction
from holocircles.fiber import build_fiber_curve
from holocircles.integral import (FiberParametrization, FiniteCurve, KernelError, MoreraError,
                                  kernel_integral, loop_constancy_defect, morera_phi_test,
                                  phi, phi_and_scale, phi_scale)


class ParameterData(BaseFunction):
    """Per-circle data whose extension into D_t is the constant t."""

    def extensions(self, family, ts, z, n_samples=256, defect_tol=None):
        return np.asarray(ts, dtype=complex)


class KernelIdentityTestCase(unittest.TestCase):
    def setUp(self):
        self.circle = FiniteCurve.circle()

    def test_constant_density_vanishes(self):
        for w in (0.3, 0.2 - 0.5j, 4, 1.5j):
            self.assertLess(abs(kernel_integral(self.circle, np.ones_like, w)), 1e-10)

    def test_residue_inside_and_outside(self):
        # F(ζ) = ζ on |ζ| = 1, parametrised by s
        def density(s):
            return np.exp(1j * s)
        for w in (0, 0.3 + 0.2j, -0.5j):
            self.assertAlmostEqual(kernel_integral(self.circle, density, w), 2j * np.pi,
                                   delta=1e-8)
        for w in (2, 1.5 - 1j, 10j):
            self.assertLess(abs(kernel_integral(self.circle, density, w)), 1e-8)

    def test_finite_chart_agrees(self):
        # F(ζ) = ζ² + 3, so Φ(w) = 2πi·F'(w) inside the circle
        def density(s):
            return np.exp(2j * s) + 3
        w = 0.4 - 0.1j
        inverted = kernel_integral(self.circle, density, w)
        finite = kernel_integral(self.circle, density, w, chart='finite')
        self.assertAlmostEqual(inverted, finite, delta=1e-9)
        self.assertAlmostEqual(inverted, 4j * np.pi * w, delta=1e-8)

    def test_derivative_of_cauchy_transform(self):
        # Φ(w) is 2πi times the w-derivative of the first-power Cauchy transform
        s = 2 * np.pi * np.arange(4096) / 4096
        points = 1.2 * np.exp(1j * s) + 0.1
        curve = FiniteCurve.circle(0.1, 1.2)

        def density(x):
            return np.conj(1.2 * np.exp(1j * x) + 0.1)**2
        w, h = 0.3 + 0.2j, 1e-4
        values = density(s)
        derivative = (cauchy_first_power(points, values, w + h)
                      - cauchy_first_power(points, values, w - h)) / (2 * h)
        self.assertAlmostEqual(kernel_integral(curve, density, w), 2j * np.pi * derivative,
                               delta=1e-5)

    def test_cauchy_transform_jumps_by_the_density(self):
        s = 2 * np.pi * np.arange(4096) / 4096
        points = np.exp(1j * s)
        zeta0 = np.exp(0.7j)
        for F in (np.conj, np.square):
            with self.subTest(density=F.__name__):
                errors = []
                for delta in (0.1, 0.05):
                    inside = cauchy_first_power(points, F(points), (1 - delta) * zeta0)
                    outside = cauchy_first_power(points, F(points), (1 + delta) * zeta0)
                    errors.append(abs(inside - outside - F(zeta0)))
                    self.assertLess(errors[-1], 2.5 * delta)
                self.assertLess(errors[1], errors[0])

    def test_point_on_curve(self):
        with self.assertRaisesRegex(KernelError, 'on a loop'):
            kernel_integral(self.circle, np.ones_like, 1j)

    def test_infinity_gives_zero(self):
        self.assertEqual(kernel_integral(self.circle, np.ones_like, None), 0)

    def test_unknown_chart(self):
        with self.assertRaises(ValueError):
            kernel_integral(self.circle, np.ones_like, 0, chart='polar')


class PhiTestCase(unittest.TestCase):
    def setUp(self):
        self.family = bundled_family('linear')
        self.z = 0.4j
        self.fiber = build_fiber_curve(self.family, self.z)

    def test_holomorphic_data_gives_vanishing_phi(self):
        f = bundled_function('exp')
        for w in (-1.2j, 3, 0.5 - 4j):
            value, scale = phi_and_scale(self.family, f, self.z, self.fiber.loops, w)
            self.assertGreater(scale, 0)
            self.assertLess(abs(value) / scale, 1e-5)

    def test_phi_wrappers(self):
        f = bundled_function('one')
        w = -1.2j
        value, scale = phi_and_scale(self.family, f, self.z, self.fiber.loops, w)
        self.assertEqual(phi(self.family, f, self.z, self.fiber.loops, w), value)
        self.assertEqual(phi_scale(self.family, f, self.z, self.fiber.loops, w), scale)

    def test_non_constant_data_gives_nonzero_phi(self):
        value, scale = phi_and_scale(self.family, ParameterData(), self.z, self.fiber.loops,
                                     -1.2j)
        self.assertGreater(abs(value) / scale, 1e-3)

    def test_loop_through_infinity(self):
        fiber = build_fiber_curve(self.family, 0.05)
        self.assertTrue(fiber.loops[0].passes_infinity)
        value, scale = phi_and_scale(self.family, bundled_function('square'), 0.05,
                                     fiber.loops, -1.5j)
        self.assertLess(abs(value) / scale, 1e-5)

    def test_parametrisation_finite_chart(self):
        loop = self.fiber.loops[0]
        curve = FiberParametrization(self.family, self.z, loop.interval, loop.pivot)
        w, dw = curve.finite(np.array([0.0]))
        self.assertAlmostEqual(w[0], -2.5j)
        with self.assertRaises(KernelError):
            FiberParametrization(self.family, 0.05, (-0.9, 0.9), 5).finite(np.array([0.05]))


class ConstancyTestCase(unittest.TestCase):
    def setUp(self):
        self.family = bundled_family('linear')

    def test_holomorphic_data_is_constant_on_loops(self):
        loop = build_fiber_curve(self.family, 0.4j).loops[0]
        self.assertLess(loop_constancy_defect(self.family, bundled_function('exp'), 0.4j, loop),
                        1e-7)

    def test_parameter_data_spans_the_interval(self):
        loop = build_fiber_curve(self.family, 0.4j).loops[0]
        lo, hi = loop.interval
        defect = loop_constancy_defect(self.family, ParameterData(), 0.4j, loop, margin=0)
        self.assertAlmostEqual(defect, hi - lo, delta=1e-12)
        self.assertAlmostEqual(defect, 2 * np.sqrt(0.84), delta=1e-8)


class MoreraTestCase(unittest.TestCase):
    def setUp(self):
        self.family = bundled_family('linear')

    def test_holomorphic_data(self):
        result = morera_phi_test(self.family, bundled_function('exp'), 0.5j, 0.1, -3j, n=16)
        self.assertLess(result.residual, 1e-4 * result.scale)

    def test_loop_crossing_critical_set(self):
        with self.assertRaisesRegex(MoreraError, 'crosses P'):
            morera_phi_test(self.family, bundled_function('exp'), 0.9j, 0.2, -3j)

    def test_loop_crossing_centers(self):
        with self.assertRaisesRegex(MoreraError, 'crosses C'):
            morera_phi_test(self.family, bundled_function('exp'), 0.1j, 0.2, -3j)
