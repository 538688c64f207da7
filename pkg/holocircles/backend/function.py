"""Boundary data backends.

Supported kinds
---------------

 - `poly`: finite sums of c·zᵐ·z̄ⁿ
 - `exp`: the exponential
 - `reciprocal`: 1/(z - a)
 - `grid`: samples on a rectangular grid, bilinearly interpolated

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

import numpy as np

from scipy.interpolate import RegularGridInterpolator

from holocircles.backend.base import BaseFunction
from holocircles.util import HolocirclesError

LOGGER = logging.getLogger(__name__)


class DomainError(HolocirclesError, ValueError):
    """Function evaluated outside of where it is defined."""


class PolyFunction(BaseFunction):
    """Polynomial in z and z̄.

    >>> f = PolyFunction([(2, 0, 1), (0, 1, 2j)])
    >>> f(np.array([2])).tolist()
    [(4+4j)]
    >>> f.holomorphic, PolyFunction([(3, 0, 1), (1, 0, -2)]).holomorphic
    (False, True)
    """

    KIND = 'poly'

    def __init__(self, terms):
        self.terms = [(int(m), int(n), complex(coef)) for m, n, coef in terms]
        if any(m < 0 or n < 0 for m, n, _ in self.terms):
            raise DomainError('powers of z and z̄ must be non-negative')

    @classmethod
    def from_spec(cls, spec):
        return cls((t['m'], t['n'], complex(t.get('re', 0), t.get('im', 0)))
                   for t in spec['terms'])

    def to_spec(self):
        terms = [{'m': m, 'n': n, 're': c.real, 'im': c.imag} for m, n, c in self.terms]
        return {'kind': self.KIND, 'terms': terms}

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        zbar = np.conj(z)
        out = np.zeros_like(z)
        for m, n, coef in self.terms:
            out = out + coef * z**m * zbar**n
        return out

    @property
    def holomorphic(self):
        """Whether f is a polynomial in z alone."""
        return all(n == 0 for _, n, coef in self.terms if coef != 0)

    @property
    def description(self):
        def term(m, n, c):
            powers = ''.join(s for s in (f'z^{m}' if m else '', f'conj(z)^{n}' if n else ''))
            return f'({c}){"*" + powers if powers else ""}'
        return ' + '.join(term(*t) for t in self.terms) or '0'


class ExpFunction(BaseFunction):
    """The exponential function."""

    KIND = 'exp'
    holomorphic = True

    @classmethod
    def from_spec(cls, spec):
        return cls()

    def to_spec(self):
        return {'kind': self.KIND}

    def __call__(self, z):
        return np.exp(np.asarray(z, dtype=complex))

    @property
    def description(self):
        return 'exp(z)'


class ReciprocalFunction(BaseFunction):
    """Simple pole 1/(z - a)."""

    KIND = 'reciprocal'
    holomorphic = True

    def __init__(self, pole):
        self.pole = complex(pole)

    @classmethod
    def from_spec(cls, spec):
        return cls(complex(spec.get('a_re', 0), spec.get('a_im', 0)))

    def to_spec(self):
        return {'kind': self.KIND, 'a_re': self.pole.real, 'a_im': self.pole.imag}

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if not self.covers(z):
            raise DomainError(f'evaluated at the pole a={self.pole}')
        return 1 / (z - self.pole)

    def covers(self, z):
        return bool(np.all(np.asarray(z) != self.pole))

    @property
    def description(self):
        return f'1/(z - ({self.pole}))'


class GridFunction(BaseFunction):
    """Samples on a rectangular grid with bilinear interpolation.

    Values are indexed `[ix][iy]`, matching the `x` and `y` node lists.
    """

    KIND = 'grid'
    holomorphic = False

    def __init__(self, x, y, values):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.values = np.asarray(values, dtype=complex)
        if self.values.shape != (self.x.size, self.y.size):
            raise DomainError(f'grid values have shape {self.values.shape}, '
                              f'expected {(self.x.size, self.y.size)}')
        nodes = (self.x, self.y)
        self._re = RegularGridInterpolator(nodes, self.values.real, method='linear')
        self._im = RegularGridInterpolator(nodes, self.values.imag, method='linear')

    @classmethod
    def sample(cls, func, x, y):
        """Tabulate the callable `func` on the grid spanned by `x` and `y`."""
        xx, yy = np.meshgrid(np.asarray(x, dtype=float), np.asarray(y, dtype=float),
                             indexing='ij')
        return cls(x, y, func(xx + 1j * yy))

    @classmethod
    def from_spec(cls, spec):
        values = np.asarray(spec['re'], dtype=float) + 1j * np.asarray(spec['im'], dtype=float)
        return cls(spec['x'], spec['y'], values)

    def to_spec(self):
        return {'kind': self.KIND, 'x': self.x.tolist(), 'y': self.y.tolist(),
                're': self.values.real.tolist(), 'im': self.values.imag.tolist()}

    def covers(self, z):
        z = np.asarray(z, dtype=complex)
        return bool(np.all((z.real >= self.x[0]) & (z.real <= self.x[-1])
                           & (z.imag >= self.y[0]) & (z.imag <= self.y[-1])))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if not self.covers(z):
            raise DomainError(f'grid [{self.x[0]}, {self.x[-1]}] x [{self.y[0]}, {self.y[-1]}] '
                              f'does not cover the queried points')
        pts = np.stack([z.real.ravel(), z.imag.ravel()], axis=-1)
        return (self._re(pts) + 1j * self._im(pts)).reshape(z.shape)

    @property
    def description(self):
        return f'grid of {self.x.size}x{self.y.size} samples'
