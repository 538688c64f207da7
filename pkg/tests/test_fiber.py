from _testutils import *

import unittest

import numpy as np

from holocircles.fiber import (IncidenceError, Loop, SamplingController, SpherePoint,
                               WindingError, build_fiber_curve, classify_regions,
                               fiber_point, incidence_intervals, infinity_membership,
                               sphere_xyz, winding_index)


class SphereTestCase(unittest.TestCase):
    def test_poles(self):
        np.testing.assert_allclose(SpherePoint(0).xyz(), [0, 0, -1])
        np.testing.assert_allclose(SpherePoint.infinity().xyz(), [0, 0, 1])
        np.testing.assert_allclose(sphere_xyz(1, 0), [0, 0, 1])

    def test_chordal_metric(self):
        self.assertAlmostEqual(SpherePoint(1).chordal(-1), 2.0)
        self.assertAlmostEqual(SpherePoint(1).chordal(1j), np.sqrt(2))
        self.assertAlmostEqual(SpherePoint(1e12).chordal(None), 0.0, places=10)

    def test_coerce(self):
        self.assertTrue(SpherePoint.coerce(None).is_infinity)
        self.assertEqual(SpherePoint.coerce(2).value, 2)
        self.assertEqual(SpherePoint.coerce(complex('inf')).chart, 'infinity')


class IncidenceTestCase(unittest.TestCase):
    def test_linear_closed_form(self):
        family = bundled_family('linear')
        incidence = incidence_intervals(family, 0.4j)
        self.assertEqual(incidence.k, 1)
        lo, hi = incidence.intervals[0]
        self.assertAlmostEqual(lo, -0.916515, delta=1e-6)
        self.assertAlmostEqual(hi, 0.916515, delta=1e-6)
        self.assertAlmostEqual(hi, np.sqrt(0.84), delta=1e-9)

    def test_linear_random_points(self):
        family = bundled_family('linear')
        rng = np.random.default_rng(1)
        for z in rng.uniform(-0.05, 0.05, 20) + 1j * rng.uniform(-0.99, 0.99, 20):
            lo, hi = linear_incidence(z)
            (a, b), = incidence_intervals(family, z).intervals
            self.assertAlmostEqual(a, lo, delta=1e-9)
            self.assertAlmostEqual(b, hi, delta=1e-9)

    def test_outside_every_disc(self):
        self.assertEqual(incidence_intervals(bundled_family('linear'), 2j).intervals, ())

    def test_end_discs_are_excluded(self):
        family = bundled_family('linear')
        with self.assertRaisesRegex(IncidenceError, 'D̄_α'):
            incidence_intervals(family, -1.05)
        with self.assertRaisesRegex(IncidenceError, 'D̄_β'):
            incidence_intervals(family, 1.05)

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(7)
        for name in ('linear', 'arc', 'hairpin'):
            family = bundled_family(name)
            t = family.grid(256)
            centers = family.centers(t)
            lo = np.min(centers.real) - 1, np.min(centers.imag) - 1
            hi = np.max(centers.real) + 1, np.max(centers.imag) + 1
            checked = 0
            while checked < 100:
                z = complex(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]))
                try:
                    fast = incidence_intervals(family, z).intervals
                except IncidenceError:
                    continue
                slow = brute_incidence(family, z)
                # intervals shorter than the coarse grid step are compared separately
                fast = [iv for iv in fast if iv[1] - iv[0] > 1e-2]
                slow = [iv for iv in slow if iv[1] - iv[0] > 1e-2]
                with self.subTest(family=name, z=z):
                    self.assertEqual(len(fast), len(slow))
                    for (a, b), (c, d) in zip(fast, slow):
                        self.assertAlmostEqual(a, c, delta=1e-8)
                        self.assertAlmostEqual(b, d, delta=1e-8)
                checked += 1

    def test_hairpin_has_two_intervals_between_arms(self):
        incidence = incidence_intervals(bundled_family('hairpin'), 1.5 + 0.75j)
        self.assertEqual(incidence.k, 2)


class FiberPointTestCase(unittest.TestCase):
    def test_linear_fiber_point(self):
        family = bundled_family('linear')
        self.assertAlmostEqual(fiber_point(family, 0, 0.4j).value, -2.5j, delta=1e-12)
        for t in (-0.5, 0.1, 0.7):
            self.assertAlmostEqual(fiber_point(family, t, 0.4j).value, linear_fiber(0.4j, t))

    def test_center_maps_to_infinity(self):
        self.assertTrue(fiber_point(bundled_family('linear'), 0.3, 0.3).is_infinity)

    def test_pairwise_intersections_are_circle_crossings(self):
        family = bundled_family('arc')
        t, s = 1.0, 1.4
        (ct, cs), (rt, rs) = (x[0] for x in family.derivatives(np.array([t, s]), 0))
        roots = pairwise_intersections(family, t, s)
        self.assertEqual(roots.size, 2)
        for z in roots:
            self.assertAlmostEqual(abs(z - ct), rt, delta=1e-10)
            self.assertAlmostEqual(abs(z - cs), rs, delta=1e-10)
            # both complexified circles meet over z at conj(z)
            self.assertAlmostEqual(fiber_point(family, t, z).value, np.conj(z), delta=1e-10)
            self.assertAlmostEqual(fiber_point(family, s, z).value, np.conj(z), delta=1e-10)


class FiberCurveTestCase(unittest.TestCase):
    def setUp(self):
        self.family = bundled_family('linear')

    def test_loop_closes_at_conjugate(self):
        fiber = build_fiber_curve(self.family, 0.4j)
        self.assertEqual(fiber.k, 1)
        loop = fiber.loops[0]
        self.assertLess(loop.closure_error(), 1e-8)
        w = loop.w
        self.assertAlmostEqual(w[0], -0.4j, delta=1e-8)
        self.assertAlmostEqual(w[-1], -0.4j, delta=1e-8)
        np.testing.assert_allclose(w, linear_fiber(0.4j, loop.params), atol=1e-10)
        self.assertFalse(loop.passes_infinity)
        self.assertTrue(fiber.injective)

    def test_chords_are_refined(self):
        sampling = SamplingController(chord_fraction=0.01)
        loop = build_fiber_curve(self.family, 0.4j, sampling).loops[0]
        chords = np.linalg.norm(np.diff(loop.xyz, axis=0), axis=-1)
        self.assertLessEqual(np.max(chords), 0.01 * loop.diameter + 1e-12)

    def test_loop_through_infinity(self):
        fiber = build_fiber_curve(self.family, 0.05)
        loop = fiber.loops[0]
        self.assertTrue(loop.passes_infinity)
        self.assertLess(loop.distance(None), 1e-3)

    def test_empty_fiber(self):
        fiber = build_fiber_curve(self.family, 1.5j)
        self.assertEqual(fiber.k, 0)
        self.assertEqual(fiber.loops, ())

    def test_two_loops_on_hairpin(self):
        fiber = build_fiber_curve(bundled_family('hairpin'), 1.5 + 0.75j)
        self.assertEqual(fiber.k, 2)
        for loop in fiber.loops:
            self.assertLess(loop.closure_error(), 1e-8)

    def test_index_is_sum_over_loops(self):
        fiber = build_fiber_curve(bundled_family('hairpin'), 1.5 + 0.75j)
        probes = [np.mean(loop.w) for loop in fiber.loops] + [3 - 2j, 10, None]
        for w in probes:
            if min(loop.distance(w) for loop in fiber.loops) < 1e-6:
                continue
            expected = sum(winding_index(loop, w) for loop in fiber.loops)
            self.assertEqual(fiber.winding_index(w), expected)
        self.assertEqual(fiber.winding_index(None), 0)

    def test_loop_count_is_locally_constant(self):
        cases = [(bundled_family('linear'), 0.4j, 0.05, 1),
                 (bundled_family('hairpin'), 1.5 + 0.75j, 0.05, 2)]
        for family, z0, radius, k in cases:
            ring = z0 + radius * np.exp(2j * np.pi * np.arange(12) / 12)
            for z in [z0, *ring]:
                self.assertEqual(build_fiber_curve(family, z).k, k, f'k changed at z={z}')


class WindingTestCase(unittest.TestCase):
    def setUp(self):
        self.loop = build_fiber_curve(bundled_family('linear'), 0.4j).loops[0]

    def test_linear_loop_is_clockwise(self):
        self.assertEqual(winding_index(self.loop, -1.2j), -1)
        self.assertEqual(winding_index(self.loop, 10), 0)
        self.assertEqual(winding_index(self.loop, None), 0)

    def test_point_on_loop(self):
        with self.assertRaises(WindingError):
            winding_index(self.loop, -0.4j)

    def test_regions_are_quasi_simple(self):
        regions = classify_regions([self.loop], points=[-1.2j, 3])
        self.assertTrue(regions.quasi_simple)
        self.assertEqual(regions.infinity, 'plus')
        self.assertEqual(regions.membership[-2:], ('minus', 'plus'))
        self.assertTrue(set(regions.membership) <= {'plus', 'minus', 'on'})

    def test_infinity_side_flips_across_centers(self):
        family = bundled_family('linear')
        self.assertEqual(infinity_membership(build_fiber_curve(family, 0.4j).loops), 'plus')
        self.assertEqual(infinity_membership(build_fiber_curve(family, -0.4j).loops), 'minus')

    def test_small_loops_take_side_from_orientation(self):
        theta = 2 * np.pi * np.arange(64) / 64
        clockwise = Loop.from_points(2 + 1e-4 * np.exp(-1j * theta))
        counterclockwise = Loop.from_points(2 + 1e-4 * np.exp(1j * theta))
        self.assertLess(clockwise.diameter, 1e-3)
        self.assertEqual(infinity_membership([clockwise]), 'plus')
        self.assertEqual(infinity_membership([counterclockwise]), 'minus')
        regions = classify_regions([clockwise], points=[2])
        self.assertEqual(regions.membership[-1], 'minus')

    def test_small_linear_loops_near_create(self):
        family = bundled_family('linear')
        for y in (0.9999, 0.99995):
            loop, = build_fiber_curve(family, 1j * y).loops
            self.assertLess(loop.diameter, 1e-3)
            self.assertLess(loop.signed_area(), 0)
            self.assertEqual(infinity_membership([loop]), 'plus')

    def test_doubled_loop_is_not_quasi_simple(self):
        theta = 2 * np.pi * np.arange(128) / 64
        loop = Loop.from_points(np.exp(1j * theta))
        regions = classify_regions([loop], points=[0])
        self.assertFalse(regions.quasi_simple)
        self.assertEqual(regions.membership[-1], 'index 2')

    def test_unit_circle_pair(self):
        inner = Loop.from_points(0.5 * np.exp(2j * np.pi * np.arange(64) / 64))
        outer = Loop.from_points(2 * np.exp(-2j * np.pi * np.arange(64) / 64))
        regions = classify_regions([inner, outer], points=[0, 1, 5])
        self.assertTrue(regions.quasi_simple)
        self.assertEqual(regions.membership[-3:], ('plus', 'minus', 'plus'))
