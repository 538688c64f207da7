"""Closed-form circle families.

Two kinds are provided:

 - `expr`: c(t) and r(t) given as expressions in t over one interval;
 - `piecewise`: consecutive `expr` pieces sharing endpoints; the shared
   endpoints become the family breakpoints.

Derivatives of any order come from torch autograd on the expressions, so
they are exact up to rounding.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

import numpy as np

from holocircles.backend.base import BaseFamily, BackendError
from holocircles.expr import Expression

LOGGER = logging.getLogger(__name__)

_JOIN_TOLERANCE = 1e-12
_REALNESS_SAMPLES = 33


class ExpressionFamily(BaseFamily):
    """Circle family with closed-form center and radius."""

    KIND = 'expr'

    def __init__(self, center, radius, t_range, description=None):
        super().__init__(t_range, description=description)
        self.center_expr = center if isinstance(center, Expression) else Expression(center)
        self.radius_expr = radius if isinstance(radius, Expression) else Expression(radius)
        probe = np.linspace(self.alpha, self.beta, _REALNESS_SAMPLES)
        if not self.radius_expr.is_real(probe):
            raise BackendError(f'radius {self.radius_expr.text!r} is not real valued')

    @classmethod
    def from_spec(cls, spec):
        return cls(spec['c'], spec['r'], spec['t_range'], description=spec.get('description'))

    def to_spec(self):
        return {
            'kind': self.KIND,
            'c': self.center_expr.text,
            'r': self.radius_expr.text,
            't_range': list(self.t_range),
        }

    def derivatives(self, t, order=0, side=None):
        if order > self.MAX_ORDER:
            raise BackendError(f'derivatives of order {order} not available')
        t = np.asarray(t, dtype=float)
        c = self.center_expr.derivatives(t, order)
        r = self.radius_expr.derivatives(t, order).real
        return c, r

    @property
    def description(self):
        if self._description:
            return self._description
        return (f'c(t) = {self.center_expr.text}, r(t) = {self.radius_expr.text}, '
                f't in [{self.alpha}, {self.beta}]')


class PiecewiseFamily(BaseFamily):
    """Circle family glued from closed-form pieces."""

    KIND = 'piecewise'

    def __init__(self, pieces, description=None):
        pieces = list(pieces)
        if not pieces:
            raise BackendError('piecewise family without pieces')
        for prev, cur in zip(pieces[:-1], pieces[1:]):
            if abs(prev.beta - cur.alpha) > _JOIN_TOLERANCE:
                raise BackendError(f'pieces do not join: {prev.beta} != {cur.alpha}')
        joins = [p.alpha for p in pieces[1:]]
        super().__init__((pieces[0].alpha, pieces[-1].beta), breakpoints=joins,
                         description=description)
        self.pieces = pieces
        self._joins = np.array(joins, dtype=float)
        for t in joins:
            self._check_continuity(t)

    def _check_continuity(self, t):
        (cl, rl), (cr, rr) = (self.derivatives(t, 0, side=s) for s in ('left', 'right'))
        gap = abs(cl[0] - cr[0]) + abs(rl[0] - rr[0])
        if gap > 1e-9 * (1 + abs(cr[0]) + abs(rr[0])):
            raise BackendError(f'family is discontinuous at t={t} (jump {gap:.3g})')

    @classmethod
    def from_spec(cls, spec):
        pieces = [ExpressionFamily(p['c'], p['r'], p['t_range']) for p in spec['pieces']]
        return cls(pieces, description=spec.get('description'))

    def to_spec(self):
        pieces = []
        for p in self.pieces:
            spec = p.to_spec()
            del spec['kind']
            pieces.append(spec)
        return {'kind': self.KIND, 'pieces': pieces}

    def derivatives(self, t, order=0, side=None):
        if order > self.MAX_ORDER:
            raise BackendError(f'derivatives of order {order} not available')
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        which = np.searchsorted(self._joins, flat, side='left' if side == 'left' else 'right')
        c = np.zeros((order + 1, flat.size), dtype=complex)
        r = np.zeros((order + 1, flat.size), dtype=float)
        for k, piece in enumerate(self.pieces):
            mask = which == k
            if np.any(mask):
                c[:, mask], r[:, mask] = piece.derivatives(flat[mask], order)
        shape = (order + 1,) + t.shape
        return c.reshape(shape), r.reshape(shape)
