from _testutils import *

import json
import os
import tempfile
import unittest

import numpy as np

from holocircles.backend import SpecError, load_family, load_function, read_spec
from holocircles.backend.base import BackendError, RangeError
from holocircles.backend.expression import ExpressionFamily
from holocircles.backend.function import DomainError, GridFunction, PolyFunction
from holocircles.backend.sampled import SampledFamily
from holocircles.expr import ExpressionError


class LoadTestCase(unittest.TestCase):
    def test_bundled_catalogues(self):
        family = bundled_family('arc')
        self.assertIsInstance(family, ExpressionFamily)
        self.assertAlmostEqual(family.beta, np.pi)
        self.assertEqual(bundled_function('exp').description, 'exp(z)')
        self.assertTrue(bundled_function('cubic').holomorphic)
        self.assertFalse(bundled_function('modulus2').holomorphic)

    def test_unknown_bundled_name(self):
        with self.assertRaisesRegex(SpecError, "no bundled families named 'nothing'"):
            read_spec('bundled:nothing', 'families')

    def test_spec_from_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'family.json')
            with open(path, 'w') as fh:
                json.dump({'kind': 'expr', 'c': 't', 'r': '1', 't_range': [-2, 2]}, fh)
            family = load_family(read_spec(path))
            self.assertEqual(family.t_range, (-2.0, 2.0))
            with open(path, 'w') as fh:
                fh.write('{"kind": ')
            with self.assertRaises(SpecError):
                read_spec(path)

    def test_bad_specs(self):
        with self.assertRaisesRegex(SpecError, 'kind'):
            load_family(['expr'])
        with self.assertRaisesRegex(SpecError, "unknown kind 'bezier'"):
            load_family({'kind': 'bezier'})
        with self.assertRaisesRegex(SpecError, 'incomplete'):
            load_family({'kind': 'expr', 'c': 't'})
        with self.assertRaisesRegex(SpecError, "unknown kind 'expr'"):
            load_function({'kind': 'expr'})

    def test_specs_survive_reloading(self):
        for name in ('linear', 'hairpin'):
            family = bundled_family(name)
            again = load_family(json.loads(json.dumps(family.to_spec())))
            t = family.grid(17)
            np.testing.assert_allclose(again.centers(t), family.centers(t))
        f = load_function(bundled_function('reciprocal').to_spec())
        self.assertEqual(f.pole, 3)


class ExpressionFamilyTestCase(unittest.TestCase):
    def test_bad_expressions(self):
        with self.assertRaisesRegex(ExpressionError, 'cannot parse'):
            ExpressionFamily('t +', '1', [0, 1])
        with self.assertRaisesRegex(ExpressionError, 'unknown function'):
            ExpressionFamily('log(t)', '1', [0, 1])
        with self.assertRaisesRegex(ExpressionError, 'unsupported syntax'):
            ExpressionFamily('[t]', '1', [0, 1])

    def test_radius_must_be_real(self):
        with self.assertRaisesRegex(BackendError, 'not real valued'):
            ExpressionFamily('t', '1 + i*t', [0, 1])

    def test_empty_range(self):
        with self.assertRaises(RangeError):
            ExpressionFamily('t', '1', [1, 1])

    def test_third_order_derivatives(self):
        family = ExpressionFamily('t^3 + 2*i*sin(t)', '1 + 0.1*t^2', [0, 1])
        c, r = family.derivatives(np.array([0.5]), 3)
        s, k = np.sin(0.5), np.cos(0.5)
        np.testing.assert_allclose(c[:, 0], [0.125 + 2j * s, 0.75 + 2j * k, 3 - 2j * s, 6 - 2j * k],
                                   rtol=1e-14)
        np.testing.assert_allclose(r[:, 0], [1.025, 0.1, 0.2, 0], atol=1e-15)

    def test_derivative_order_limit(self):
        with self.assertRaises(BackendError):
            bundled_family('linear').derivatives(0.0, order=4)

    def test_description(self):
        family = ExpressionFamily('t', '1', [0, 1])
        self.assertEqual(family.description, 'c(t) = t, r(t) = 1, t in [0.0, 1.0]')


class SampledFamilyTestCase(unittest.TestCase):
    def test_reproduces_quintic_data(self):
        t = np.linspace(0, 2, 21)
        family = SampledFamily(t, t**3 + 1j * t, 1 + 0.1 * t)
        s = np.array([0.33, 1.7])
        c, r = family.derivatives(s, 3)
        np.testing.assert_allclose(c[0], s**3 + 1j * s, atol=1e-12)
        np.testing.assert_allclose(c[1], 3 * s**2 + 1j, atol=1e-10)
        np.testing.assert_allclose(c[3], 6, atol=1e-6)
        np.testing.assert_allclose(r[1], 0.1, atol=1e-10)

    def test_rejects_bad_samples(self):
        t = np.linspace(0, 1, 10)
        with self.assertRaisesRegex(BackendError, 'at least 6'):
            SampledFamily(t[:4], t[:4], np.ones(4))
        with self.assertRaisesRegex(BackendError, 'strictly increasing'):
            SampledFamily(t[::-1], t, np.ones(10))
        with self.assertRaisesRegex(BackendError, 'positive'):
            SampledFamily(t, t, -np.ones(10))

    def test_spec(self):
        t = np.linspace(-1.1, 1.1, 12)
        spec = {'kind': 'sampled', 't': t.tolist(), 'c_re': t.tolist(), 'c_im': [0] * 12,
                'r': [1] * 12}
        family = load_family(spec)
        self.assertAlmostEqual(family.centers(0.3), 0.3)
        self.assertEqual(family.to_spec()['r'], [1.0] * 12)


class FunctionTestCase(unittest.TestCase):
    def test_poly_rejects_negative_powers(self):
        with self.assertRaises(DomainError):
            PolyFunction([(-1, 0, 1)])

    def test_reciprocal_pole(self):
        f = bundled_function('reciprocal')
        self.assertAlmostEqual(f(np.array([2.0]))[0], -1)
        self.assertFalse(f.covers(np.array([3.0])))
        with self.assertRaisesRegex(DomainError, 'pole'):
            f(np.array([3.0]))

    def test_grid_interpolation(self):
        x = np.linspace(-1, 1, 5)
        y = np.linspace(0, 1, 3)
        f = GridFunction.sample(lambda z: 2 * z + 1j, x, y)
        np.testing.assert_allclose(f(np.array([0.1 + 0.3j, -0.7 + 0.9j])),
                                   [0.2 + 1.6j, -1.4 + 2.8j], atol=1e-12)
        self.assertEqual(load_function(f.to_spec()).values.shape, (5, 3))
        with self.assertRaisesRegex(DomainError, 'does not cover'):
            f(np.array([2.0]))

    def test_grid_shape_mismatch(self):
        with self.assertRaisesRegex(DomainError, 'shape'):
            GridFunction([0, 1], [0, 1, 2], np.zeros((3, 2)))
