"""Circle family evaluation and validation of the family hypotheses.

A family {C_t : α ≤ t ≤ β} is admissible when

 (a) the end circles are far apart: |c(α) − c(β)| > r(α) + r(β);
 (b) c and r are piecewise C³, r > 0, t ↦ c(t) is injective and c' ≠ 0;
 (c) no circle is contained in another: |c(t) − c(s)| > |r(t) − r(s)|;
 (d) the centers move faster than the radii: |c'(t)| > |r'(t)|.

`validate_family` checks the four conditions on a sample grid and reports
the worst sample for each of them.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

from dataclasses import dataclass
from enum import Enum

import numpy as np

from scipy.optimize import least_squares

from holocircles.backend.base import BreakpointError, RangeError

LOGGER = logging.getLogger(__name__)

_MIN_SAMPLES = 64
_ROW_BLOCK = 256
_MIN_OFFSET = 4  # grid offset below which (c) is delegated to (d)


class DiscPosition(Enum):
    INTERIOR = 'interior'
    BOUNDARY = 'boundary'
    EXTERIOR = 'exterior'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FamilyJet:
    """c, r and their derivatives at one parameter.

    Derivatives above the requested order are left as `None`.
    """

    t: float
    c0: complex
    r0: float
    c1: complex = None
    r1: float = None
    c2: complex = None
    r2: float = None
    c3: complex = None
    r3: float = None

    @property
    def order(self):
        return sum(x is not None for x in (self.c1, self.c2, self.c3))


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of one of the conditions (a)–(d).

    `margin` is the smallest sampled slack of the strict inequality and
    `witness` the parameter, or pair of parameters, where it was attained.
    """

    name: str
    passed: bool
    margin: float
    witness: tuple
    note: str = ''

    def to_dict(self):
        return {
            'passed': bool(self.passed),
            'margin': float(self.margin),
            'witness': [float(t) for t in self.witness],
            'note': self.note,
        }


@dataclass(frozen=True)
class ValidationReport:
    conditions: dict
    n_samples: int

    @property
    def overall(self):
        return all(v.passed for v in self.conditions.values())

    def __getitem__(self, name):
        return self.conditions[name]

    def failures(self):
        return [v for _, v in sorted(self.conditions.items()) if not v.passed]

    def to_dict(self):
        return {
            'overall': self.overall,
            'n_samples': self.n_samples,
            'conditions': {k: v.to_dict() for k, v in sorted(self.conditions.items())},
        }


def check_range(family, t):
    """Raise `RangeError` unless all of `t` lies in [α, β]."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    bad = t[(t < family.alpha) | (t > family.beta)]
    if bad.size:
        raise RangeError(f't={bad[0]} outside range [{family.alpha}, {family.beta}]')


def eval_family(family, t, order=0, side=None):
    """Evaluate c, r and their first `order` derivatives at `t`.

    At a breakpoint a `side` ('left' or 'right') is required for `order` ≥ 1.

    >>> from holocircles.backend.expression import ExpressionFamily
    >>> jet = eval_family(ExpressionFamily('t', '1', [-1.1, 1.1]), 0.5, order=2)
    >>> jet.c0, jet.c1, jet.c2, jet.r0, jet.r1, jet.c3
    ((0.5+0j), (1+0j), 0j, 1.0, 0.0, None)
    """
    if not 0 <= order <= family.MAX_ORDER:
        raise ValueError(f'order must be between 0 and {family.MAX_ORDER}, got {order}')
    t = float(t)
    check_range(family, t)
    if order >= 1 and side is None and t in family.breakpoints:
        raise BreakpointError(f't={t} is a breakpoint: choose a side for derivatives')
    c, r = family.derivatives(np.array(t), order, side=side)
    fields = {'t': t}
    for k in range(order + 1):
        fields[f'c{k}'] = complex(c[k])
        fields[f'r{k}'] = float(r[k])
    return FamilyJet(**fields)


def point_in_disc(family, t, z, tol=1e-12):
    """Classify `z` against the closed disc D̄_t.

    >>> from holocircles.backend.expression import ExpressionFamily
    >>> family = ExpressionFamily('t', '1', [-1.1, 1.1])
    >>> [str(point_in_disc(family, 0, z)) for z in (0.4j, 1, 3)]
    ['interior', 'boundary', 'exterior']
    """
    if tol <= 0:
        raise ValueError('tolerance must be positive')
    jet = eval_family(family, t)
    gap = abs(complex(z) - jet.c0) - jet.r0
    if gap < -tol:
        return DiscPosition.INTERIOR
    elif gap > tol:
        return DiscPosition.EXTERIOR
    return DiscPosition.BOUNDARY


def _first_derivatives(family, t):
    """c' and r' on `t`, breakpoints evaluated from both sides."""
    c, r = family.derivatives(t, 1)
    ts, dc, dr = [t], [c[1]], [r[1]]
    if family.breakpoints:
        bp = np.asarray(family.breakpoints)
        cl, rl = family.derivatives(bp, 1, side='left')
        ts.append(bp)
        dc.append(cl[1])
        dr.append(rl[1])
    return np.concatenate(ts), np.concatenate(dc), np.concatenate(dr)


def _check_ends(family):
    (ca, cb), (ra, rb) = (x[0] for x in family.derivatives(np.array([family.alpha, family.beta])))
    margin = abs(ca - cb) - (ra + rb)
    return ConditionVerdict('a', margin > 0, margin, (family.alpha, family.beta))


def _check_regularity(family, t, c):
    step = (family.beta - family.alpha) / (t.size - 1)
    r = family.radii(t)
    ts, dc, _ = _first_derivatives(family, t)
    candidates = []

    i = int(np.argmin(r))
    candidates.append((float(r[i]), (float(t[i]),), 'radius'))
    i = int(np.argmin(np.abs(dc)))
    candidates.append((float(abs(dc[i])), (float(ts[i]),), "|c'|"))

    # sampled injectivity: closest pair away from the diagonal, then refined
    best = (np.inf, None)
    for start in range(0, t.size, _ROW_BLOCK):
        rows = np.arange(start, min(start + _ROW_BLOCK, t.size))
        dist = np.abs(c[rows, None] - c[None, :])
        dist[np.abs(rows[:, None] - np.arange(t.size)[None, :]) < _MIN_OFFSET] = np.inf
        k = np.unravel_index(np.argmin(dist), dist.shape)
        if dist[k] < best[0]:
            best = (dist[k], (rows[k[0]], k[1]))
    if best[1] is not None:
        i, j = best[1]
        lower = [max(family.alpha, t[i] - step), max(family.alpha, t[j] - step)]
        upper = [min(family.beta, t[i] + step), min(family.beta, t[j] + step)]

        def residual(x):
            a, b = family.centers(np.asarray(x))
            return [(a - b).real, (a - b).imag]

        def jacobian(x):
            (_, (da, db)), _ = family.derivatives(np.asarray(x), 1)
            return [[da.real, -db.real], [da.imag, -db.imag]]

        # c(t) = c(s) solved from the closest grid pair
        res = least_squares(residual, [t[i], t[j]], jac=jacobian, bounds=(lower, upper),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        dist = float(np.hypot(*res.fun))
        if dist < best[0]:
            ti, tj = sorted(res.x)
        else:
            dist, (ti, tj) = float(best[0]), sorted((t[i], t[j]))
        LOGGER.debug('closest off-diagonal centers at t=%s, s=%s: %s', ti, tj, dist)
        candidates.append((dist, (float(ti), float(tj)), 'injectivity'))
        threshold = 1e-6 * step * float(np.max(np.abs(dc)))
    else:
        threshold = 0.0

    margin, witness, what = min(candidates, key=lambda x: x[0])
    floor = 1e-9 * max(1.0, float(np.max(np.abs(c))))
    passed = all(m > (threshold if kind == 'injectivity' else floor) for m, _, kind in candidates)
    if passed:
        LOGGER.info('condition (b) holds on %d samples (sampled injectivity)', t.size)
    note = 'sampled injectivity' if what == 'injectivity' else f'{what}; sampled injectivity'
    return ConditionVerdict('b', passed, margin, witness, note=note)


def _check_containment(family, t, c, r):
    delta = _MIN_OFFSET * (family.beta - family.alpha) / t.size
    best = (np.inf, None)
    for start in range(0, t.size, _ROW_BLOCK):
        rows = slice(start, min(start + _ROW_BLOCK, t.size))
        slack = np.abs(c[rows, None] - c[None, :]) - np.abs(r[rows, None] - r[None, :])
        slack[np.abs(t[rows, None] - t[None, :]) < delta] = np.inf
        slack[:, :start] = np.inf  # pairs already seen from the other row
        k = np.unravel_index(np.argmin(slack), slack.shape)
        if slack[k] < best[0]:  # strict: the smallest t wins ties
            best = (slack[k], (float(t[start + k[0]]), float(t[k[1]])))
    margin, witness = best
    if witness is None:
        return ConditionVerdict('c', True, np.inf, (), note='no pairs beyond the cutoff')
    return ConditionVerdict('c', margin > 0, margin, witness, note=f'cutoff |t-s| >= {delta:.3g}')


def _check_speed(family, t):
    ts, dc, dr = _first_derivatives(family, t)
    slack = np.abs(dc) - np.abs(dr)
    i = int(np.argmin(slack))
    return ConditionVerdict('d', slack[i] > 0, float(slack[i]), (float(ts[i]),))


def validate_family(family, n_samples=512):
    """Check conditions (a)–(d) on a grid of `n_samples` parameters.

    Condition (c) is checked over pairs farther apart than four grid steps;
    closer pairs are covered by (d).  Breakpoints are added to the grid and
    their derivatives are taken from both sides.
    """
    if n_samples < _MIN_SAMPLES:
        raise ValueError(f'at least {_MIN_SAMPLES} samples are required, got {n_samples}')
    t = family.grid(n_samples)
    c, r = (x[0] for x in family.derivatives(t, 0))
    r = r.real
    conditions = {
        'a': _check_ends(family),
        'b': _check_regularity(family, t, c),
        'c': _check_containment(family, t, c, r),
        'd': _check_speed(family, t),
    }
    report = ValidationReport(conditions, int(n_samples))
    for verdict in report.failures():
        LOGGER.warning('condition (%s) fails: margin %.6g at t=%s', verdict.name,
                       verdict.margin, verdict.witness)
    return report
