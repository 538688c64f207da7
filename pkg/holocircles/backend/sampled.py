"""Circle families interpolated through user samples.

Center and radius samples are interpolated by quintic splines (degree 5,
not-a-knot end conditions), which are C⁴ across the sample nodes and
reproduce polynomials of degree up to five exactly.  Third derivatives come
from differentiating the spline; they are only as good as the sampling is
dense, and should be treated with care when the curvature of the critical
set matters.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

import numpy as np

from scipy.interpolate import make_interp_spline

from holocircles.backend.base import BaseFamily, BackendError

LOGGER = logging.getLogger(__name__)

_DEGREE = 5


class SampledFamily(BaseFamily):
    """Circle family given by samples of c and r."""

    KIND = 'sampled'

    def __init__(self, t, centers, radii, description=None):
        t = np.asarray(t, dtype=float)
        centers = np.asarray(centers, dtype=complex)
        radii = np.asarray(radii, dtype=float)
        if not (t.ndim == 1 and t.shape == centers.shape == radii.shape):
            raise BackendError('t, center and radius samples must be equally long lists')
        if t.size <= _DEGREE:
            raise BackendError(f'at least {_DEGREE + 1} samples are required, got {t.size}')
        if np.any(np.diff(t) <= 0):
            raise BackendError('sample parameters must be strictly increasing')
        if np.any(radii <= 0):
            raise BackendError('radius samples must be positive')
        super().__init__((t[0], t[-1]), description=description)
        self._t = t
        self._centers = centers
        self._radii = radii
        self._splines = [make_interp_spline(t, y, k=_DEGREE)
                         for y in (centers.real, centers.imag, radii)]
        LOGGER.debug('quintic splines through %d samples on [%s, %s]', t.size, t[0], t[-1])

    @classmethod
    def from_spec(cls, spec):
        centers = np.asarray(spec['c_re'], dtype=float) + 1j * np.asarray(spec['c_im'], dtype=float)
        return cls(spec['t'], centers, spec['r'], description=spec.get('description'))

    def to_spec(self):
        return {
            'kind': self.KIND,
            't': self._t.tolist(),
            'c_re': self._centers.real.tolist(),
            'c_im': self._centers.imag.tolist(),
            'r': self._radii.tolist(),
        }

    def derivatives(self, t, order=0, side=None):
        if order > self.MAX_ORDER:
            raise BackendError(f'derivatives of order {order} not available')
        t = np.asarray(t, dtype=float)
        xs, ys, rs = self._splines
        c = np.stack([xs(t, nu) + 1j * ys(t, nu) for nu in range(order + 1)])
        r = np.stack([rs(t, nu) for nu in range(order + 1)])
        return c, r

    @property
    def description(self):
        return self._description or f'quintic spline through {self._t.size} samples'
