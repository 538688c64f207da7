"""Critical set P of the family: sliding points and tangency cases.

The map Z(t, θ) = c(t) + r(t)·e^{iθ} sweeps Ω; its critical values are the
points where the t-velocity of C_t is tangent to C_t.  Each circle carries
exactly two of them, the sliding points

    p±(t) = c(t) − r(t)·(r'(t) ± i·sqrt(|c'(t)|² − r'(t)²)) / conj(c'(t))

and the two branches t ↦ p±(t) form P, the envelope of the family.  Where P
is regular, C_t and P are tangent at p(t) and the tangency is classified by
the curvature radius ρ of P against r:

 - case 1: interior tangency with ρ > r, or exterior tangency;
 - case 2: interior tangency with ρ < r;
 - case 3: interior tangency with ρ = r, which requires c' = 0 and is
   therefore reported as a family degeneracy.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

from collections import namedtuple
from dataclasses import dataclass

import numpy as np
import torch

from scipy.optimize import brentq
from scipy.spatial import cKDTree

from holocircles import jet
from holocircles.family import eval_family
from holocircles.util import HolocirclesError

LOGGER = logging.getLogger(__name__)

_FLAT = 1e-14
_SINGULAR = 1e-6

SingularPoint = namedtuple('SingularPoint', ['t', 'sign', 'z'])


class DiscriminantError(HolocirclesError, ArithmeticError):
    """|c'|² − r'² is not positive: condition (d) fails."""


class SingularPointError(HolocirclesError, ValueError):
    """Tangency requested where the branch is singular."""


def _sliding_jets(c, r, sign):
    """p, p' and p'' of one branch from derivative stacks of c and r.

    The stacks are turned into cubic Taylor polynomials in h around each
    sample, which carry the same derivatives up to order three, and p is
    differentiated twice in h at h = 0.
    """
    c = np.asarray(c, dtype=complex)
    r = np.asarray(r, dtype=float)
    if np.any(np.abs(c[1])**2 - r[1]**2 <= 0):
        raise DiscriminantError('discriminant <= 0: condition (d) fails')
    h = jet.variable(np.zeros(c.shape[1:]))
    center, radius = jet.taylor(c, h), jet.taylor(r, h).real
    dc, dr = jet.taylor(c[1:], h), jet.taylor(r[1:], h).real
    disc = (dc * dc.conj()).real - dr * dr
    p = center - radius * (dr + sign * 1j * torch.sqrt(disc)) / dc.conj()
    return jet.jet(p, h, 2)


def curvature_radius(d1, d2):
    """ρ = |p'|³ / |Im(conj(p') p'')|, infinite on flat samples."""
    speed = np.abs(d1)**3
    cross = np.abs(np.imag(np.conj(d1) * d2))
    with np.errstate(divide='ignore'):
        return np.where(cross < _FLAT * speed, np.inf, speed / cross)


@dataclass(frozen=True, eq=False)
class SlidingBranch:
    """One branch t ↦ p(t) of P, sampled with its first two derivatives."""

    sign: int
    t: np.ndarray
    points: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    @property
    def label(self):
        return '+' if self.sign > 0 else '-'

    @property
    def curvature_radius(self):
        return curvature_radius(self.d1, self.d2)

    def regular(self, tol=_SINGULAR):
        speed = np.abs(self.d1)
        return speed > tol * max(1.0, float(np.max(speed)))


@dataclass(frozen=True, eq=False)
class CriticalSet:
    branches: tuple
    singular: tuple
    self_crossings: tuple

    @property
    def singular_points(self):
        return tuple(sorted(s.t for s in self.singular))

    @property
    def simplicity(self):
        return not self.self_crossings

    def branch(self, sign):
        return self.branches[0] if sign > 0 else self.branches[1]


@dataclass(frozen=True)
class TangencyCase:
    label: str
    tangency: str
    rho: float
    r: float
    degenerate: bool = False


def sliding_points(family, t):
    """Both sliding points (p₊, p₋) of C_t.

    >>> from holocircles.backend.expression import ExpressionFamily
    >>> sliding_points(ExpressionFamily('t', '1', [-1.1, 1.1]), 0.25)
    ((0.25-1j), (0.25+1j))
    """
    jet = eval_family(family, t, order=1)
    disc = abs(jet.c1)**2 - jet.r1**2
    if disc <= 0:
        raise DiscriminantError(f'discriminant <= 0 at t={t} ({disc:.6g})')
    root = 1j * np.sqrt(disc)
    scale = jet.r0 / jet.c1.conjugate()
    return complex(jet.c0 - scale * (jet.r1 + root)), complex(jet.c0 - scale * (jet.r1 - root))


def _branch_jet(family, t, sign):
    c, r = family.derivatives(np.array([float(t)]), 3)
    p, d1, d2 = _sliding_jets(c, r, sign)[:, 0]
    return complex(p), complex(d1), complex(d2), complex(c[0, 0]), float(r[0, 0]), complex(c[1, 0])


def _locate_singular(family, branch, breakpoints):
    found = []
    speed = np.abs(branch.d1)
    scale = max(1.0, float(np.max(speed)))
    slope = np.real(np.conj(branch.d1) * branch.d2)  # half the derivative of |p'|²

    def dslope(s):
        _, d1, d2, *_ = _branch_jet(family, s, branch.sign)
        return (np.conj(d1) * d2).real

    t = branch.t
    for i in np.flatnonzero((slope[:-1] < 0) & (slope[1:] >= 0)):
        if any(t[i] < b < t[i + 1] for b in breakpoints):
            continue
        s = brentq(dslope, t[i], t[i + 1], xtol=1e-14)
        p, d1, *_ = _branch_jet(family, s, branch.sign)
        if abs(d1) < _SINGULAR * scale:
            LOGGER.debug('singular point of branch %s at t=%s', branch.label, s)
            found.append(SingularPoint(float(s), branch.sign, p))
    return found


def _segments(branch, breakpoints, regular):
    keep = regular[:-1] & regular[1:]
    for b in breakpoints:
        keep &= ~((branch.t[:-1] < b) & (branch.t[1:] > b))
    idx = np.flatnonzero(keep)
    return branch.points[idx], branch.points[idx + 1], idx


def _orient(a, b, c):
    return np.imag(np.conj(b - a) * (c - a))


def _self_crossings(branches, breakpoints):
    starts, ends, owner, index = [], [], [], []
    for k, branch in enumerate(branches):
        a, b, idx = _segments(branch, breakpoints, branch.regular())
        starts.append(a)
        ends.append(b)
        owner.append(np.full(idx.size, k))
        index.append(idx)
    a, b = np.concatenate(starts), np.concatenate(ends)
    owner, index = np.concatenate(owner), np.concatenate(index)
    if a.size < 2:
        return ()
    mids = (a + b) / 2
    reach = float(np.max(np.abs(b - a)))
    tree = cKDTree(np.column_stack([mids.real, mids.imag]))
    crossings = []
    for i, j in sorted(tree.query_pairs(reach + 1e-15)):
        if owner[i] == owner[j] and abs(index[i] - index[j]) <= 1:
            continue
        d1, d2 = _orient(a[i], b[i], a[j]), _orient(a[i], b[i], b[j])
        d3, d4 = _orient(a[j], b[j], a[i]), _orient(a[j], b[j], b[i])
        if d1 * d2 < 0 and d3 * d4 < 0:
            s = d1 / (d1 - d2)
            crossings.append(complex(a[j] + s * (b[j] - a[j])))
    if crossings:
        LOGGER.warning('P is not simple: %d self-crossings of regular points', len(crossings))
    return tuple(crossings)


def build_critical_curves(family, n_samples=1024):
    """Sample both branches of P, locate singular points and scan for collisions."""
    t = family.grid(n_samples)
    t = t[~np.isin(t, family.breakpoints)]
    c, r = family.derivatives(t, 3)
    branches = []
    for sign in (+1, -1):
        try:
            p, d1, d2 = _sliding_jets(c, r, sign)
        except DiscriminantError:
            disc = np.abs(c[1])**2 - r[1]**2
            bad = t[np.argmin(disc)]
            raise DiscriminantError(f'discriminant <= 0 at t={bad}') from None
        branches.append(SlidingBranch(sign, t, p, d1, d2))
    singular = sorted((s for b in branches for s in _locate_singular(family, b, family.breakpoints)),
                      key=lambda s: (s.t, -s.sign))
    crossings = _self_crossings(branches, family.breakpoints)
    LOGGER.info('critical set: %d samples per branch, %d singular points, %s', t.size,
                len(singular), 'simple' if not crossings else 'not simple')
    return CriticalSet(tuple(branches), tuple(singular), crossings)


def tangency_case(family, branch, t, tol=1e-9):
    """Classify the tangency of C_t and P at p(t) on `branch` (a branch or a sign)."""
    sign = getattr(branch, 'sign', branch)
    p, d1, d2, c, r, c1 = _branch_jet(family, t, sign)
    speed = abs(d1)
    if speed < _SINGULAR * max(1.0, abs(c1), r):
        raise SingularPointError(f't={t} is a singular point of branch {"+" if sign > 0 else "-"}')
    rho = float(curvature_radius(d1, d2))
    cross = (np.conj(d1) * d2).imag
    side = (np.conj(d1) * (c - p)).imag
    degenerate = abs(side) < tol * speed * r
    if np.isinf(rho):
        return TangencyCase('case1', 'interior', rho, r, degenerate)
    tangency = 'interior' if np.sign(cross) == np.sign(side) else 'exterior'
    if tangency == 'interior' and abs(rho - r) < tol * max(1.0, r):
        degenerate = degenerate or abs(c1) < tol * max(1.0, r)
        LOGGER.warning('forbidden tangency (case 3) at t=%s: rho=%s, r=%s', t, rho, r)
        return TangencyCase('case3_forbidden', tangency, rho, r, degenerate)
    label = 'case2' if tangency == 'interior' and rho < r else 'case1'
    return TangencyCase(label, tangency, rho, r, degenerate)


def critical_values_oracle(family, grid=(256, 256)):
    """Critical values of Z(t, θ) found from the real Jacobian.

    The determinant Im(conj(Z_t)·Z_θ), with Z_t = c' + r'e^{iθ} and
    Z_θ = i·r·e^{iθ}, is scanned for sign changes in θ on every grid row and
    refined by root bracketing; the critical points are returned as values
    of Z.
    """
    n_t, n_theta = grid
    if n_t == 0:
        return np.zeros(0, dtype=complex)
    t = np.linspace(family.alpha, family.beta, n_t)
    t = t[~np.isin(t, family.breakpoints)]
    c, r = family.derivatives(t, 1)
    theta = np.linspace(0, 2 * np.pi, n_theta + 1)
    points = []
    for k in range(t.size):
        c0, c1, r0, r1 = c[0, k], c[1, k], r[0, k], r[1, k]

        def det(th):
            e = np.exp(1j * th)
            return np.imag(np.conj(c1 + r1 * e) * 1j * r0 * e)

        values = det(theta)
        for i in np.flatnonzero(np.sign(values[:-1]) != np.sign(values[1:])):
            th = brentq(det, theta[i], theta[i + 1], xtol=1e-15)
            points.append(c0 + r0 * np.exp(1j * th))
    return np.unique(np.round(np.array(points, dtype=complex), 15))


def polyline_distance(points, z):
    """Distance from `z` to the polyline through `points`."""
    points = np.asarray(points, dtype=complex)
    if points.size == 1:
        return float(abs(points[0] - z))
    a, b = points[:-1], points[1:]
    span = b - a
    length2 = np.abs(span)**2
    with np.errstate(divide='ignore', invalid='ignore'):
        s = np.where(length2 > 0, np.real((z - a) * np.conj(span)) / length2, 0)
    s = np.clip(s, 0, 1)
    return float(np.min(np.abs(a + s * span - z)))


def distance_to_critical(critical, z):
    """Distance from `z` to the sampled branches of P."""
    return min(polyline_distance(b.points, z) for b in critical.branches)
