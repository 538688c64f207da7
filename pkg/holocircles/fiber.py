"""Fiber curves Γ_z over a point z.

For every parameter t the complexified circle X_t is the curve

    (z − c(t)) (w − conj(c(t))) = r(t)²

and for fixed z its points are w(t) = conj(c(t)) + r(t)²/(z − c(t)).  The
fiber Γ_z is this curve restricted to the incidence set I_z of parameters
whose closed disc contains z; at the endpoints of each incidence interval
z lies on C_t and w(t) = conj(z), so every interval gives a closed loop.

Loops are handled on the Riemann sphere.  Samples are stored in the
inverted chart u = 1/(w − a) around a pivot a off the loop (a = conj(z) + 1
unless that is too close to the fiber), in which they stay bounded even
when the loop passes through ∞, that is when z lies on the centers curve.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

from dataclasses import dataclass

import numpy as np

from scipy.optimize import brentq, minimize_scalar
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from holocircles.family import eval_family
from holocircles.util import HolocirclesError

LOGGER = logging.getLogger(__name__)

_GOLDEN_ANGLE = np.pi * (3 - np.sqrt(5))
_PIVOT_CLEARANCE = 1e-3
_PIVOT_ATTEMPTS = 64
_CLOSURE_TOLERANCE = 1e-8
_WINDING_TOLERANCE = 1e-6
_PROBE_BLOCK = 128
_DIAMETER_SAMPLES = 1024
_NORTH = np.array([0.0, 0.0, 1.0])


class IncidenceError(HolocirclesError, ValueError):
    """Incidence set requested for a point outside Ω′."""


class FiberError(HolocirclesError, ArithmeticError):
    """Fiber curve cannot be built to the required accuracy."""


class WindingError(HolocirclesError, ValueError):
    """Winding index undefined for the requested point."""


def sphere_xyz(p, q):
    """Unit sphere coordinates of w = p/q, stereographically projected.

    Taking w as a ratio keeps the pole (q = 0) at the north pole (0, 0, 1).
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    pq = p * np.conj(q)
    ap, aq = np.abs(p)**2, np.abs(q)**2
    norm = ap + aq
    return np.stack([2 * pq.real / norm, 2 * pq.imag / norm, (ap - aq) / norm], axis=-1)


@dataclass(frozen=True)
class SpherePoint:
    """Point of the Riemann sphere: a finite value, or ∞ when `value` is None.

    >>> round(SpherePoint(2j).chordal(SpherePoint.infinity()), 12) == round(2 / 5**0.5, 12)
    True
    >>> SpherePoint.coerce(complex('inf')).is_infinity
    True
    """

    value: complex = None

    @classmethod
    def infinity(cls):
        return cls(None)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, SpherePoint):
            return x
        if x is None:
            return cls(None)
        x = complex(x)
        if not (np.isfinite(x.real) and np.isfinite(x.imag)):
            return cls(None)
        return cls(x)

    @property
    def is_infinity(self):
        return self.value is None

    @property
    def chart(self):
        return 'infinity' if self.is_infinity else 'finite'

    def ratio(self):
        """Homogeneous coordinates (p, q) with w = p/q."""
        return (1, 0) if self.is_infinity else (self.value, 1)

    def xyz(self):
        return sphere_xyz(*self.ratio())

    def chordal(self, other):
        return float(np.linalg.norm(self.xyz() - SpherePoint.coerce(other).xyz()))

    def as_complex(self):
        return complex(np.inf, 0) if self.is_infinity else complex(self.value)

    def __str__(self):
        return '∞' if self.is_infinity else str(self.value)


@dataclass(frozen=True)
class IncidenceSet:
    """Incidence intervals I_1, ..., I_k of a point z, sorted and disjoint."""

    z: complex
    intervals: tuple
    tangencies: tuple = ()

    @property
    def k(self):
        return len(self.intervals)

    @property
    def total_length(self):
        return sum(b - a for a, b in self.intervals)

    def contains(self, t):
        return any(a <= t <= b for a, b in self.intervals)

    def to_dict(self):
        return {
            'z': [self.z.real, self.z.imag],
            'intervals': [[a, b] for a, b in self.intervals],
            'tangencies': list(self.tangencies),
        }


@dataclass(frozen=True)
class SamplingController:
    """Adaptive sampling of loops.

    Parameter steps are halved until every chord is below `chord_fraction`
    of the loop diameter (in the chordal metric of the sphere), with at most
    `max_samples` samples per loop.
    """

    chord_fraction: float = 0.05
    max_samples: int = 4096
    initial_samples: int = 65
    min_chord: float = 1e-12


@dataclass(frozen=True, eq=False)
class Loop:
    """One closed loop of a fiber, sampled in the inverted chart.

    `params` increase along the loop (they are sample indices for loops built
    from points); `u` holds 1/(w − pivot) at each of them, so u = 0 is ∞.
    """

    interval: tuple
    params: np.ndarray
    u: np.ndarray
    pivot: complex
    passes_infinity: bool = False
    z: complex = None

    @classmethod
    def from_points(cls, points, pivot=None):
        """Loop through the finite `points`, closed back to the first one."""
        w = np.asarray(points, dtype=complex)
        if w[0] != w[-1]:
            w = np.append(w, w[0])
        if pivot is None:
            center = np.mean(w)
            base = center + 1 + np.max(np.abs(w - center))
            pivot = _choose_pivot(sphere_xyz(w, np.ones_like(w)), base, scale=base - center)
        params = np.arange(w.size, dtype=float)
        return cls((0.0, float(w.size - 1)), params, 1 / (w - pivot), complex(pivot))

    @property
    def size(self):
        return self.params.size

    @property
    def w(self):
        """Sample values, with complex('inf') at ∞."""
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(self.u == 0, complex(np.inf, 0), self.pivot + 1 / self.u)

    @property
    def charts(self):
        return np.where(self.u == 0, 'infinity', 'finite')

    @property
    def xyz(self):
        return sphere_xyz(self.pivot * self.u + 1, self.u)

    def points(self):
        return [SpherePoint.coerce(w) for w in self.w]

    @property
    def diameter(self):
        """Chordal diameter of the samples on the unit sphere."""
        xyz = self.xyz
        if len(xyz) > _DIAMETER_SAMPLES:
            xyz = xyz[::len(xyz) // _DIAMETER_SAMPLES + 1]
        return float(np.max(pdist(xyz))) if len(xyz) > 1 else 0.0

    def closure_error(self):
        """Chordal distance from both loop ends to conj(z)."""
        if self.z is None:
            return 0.0
        target = SpherePoint(np.conj(self.z)).xyz()
        ends = self.xyz[[0, -1]]
        return float(np.max(np.linalg.norm(ends - target, axis=-1)))

    def signed_area(self):
        """Shoelace area of the samples; only meaningful for finite loops."""
        w = self.w
        if not np.all(np.isfinite(w)):
            raise WindingError('loop passes through ∞')
        w = w - np.mean(w)
        return float(0.5 * np.sum(w.real * np.roll(w.imag, -1) - np.roll(w.real, -1) * w.imag))

    def distance(self, w):
        """Chordal distance from the sphere point `w` to the samples."""
        return float(np.min(np.linalg.norm(self.xyz - SpherePoint.coerce(w).xyz(), axis=-1)))


@dataclass(frozen=True, eq=False)
class FiberCurve:
    z: complex
    incidence: IncidenceSet
    loops: tuple
    pivot: complex
    injective: bool = True

    @property
    def k(self):
        return len(self.loops)

    @property
    def passes_infinity(self):
        return [loop.passes_infinity for loop in self.loops]

    def winding_index(self, w, tol=1e-9):
        """Total index of the fiber at `w`, the sum of the per-loop indices."""
        return sum(winding_index(loop, w, tol) for loop in self.loops)


def _gap(family, t, z):
    c, r = family.derivatives(np.asarray(t, dtype=float), 0)
    return np.abs(z - c[0]) - r[0].real


def incidence_intervals(family, z, resolution=1024, tol=1e-10):
    """Find the parameters whose closed disc contains `z`.

    Sign changes of |z − c(t)| − r(t) on the grid are refined by bracketed
    root finding; local minima that stay positive are refined too, either
    revealing a short interval missed by the grid or, when the minimum is
    below `tol`, a tangential incidence that is reported as a warning.
    """
    if resolution < 256:
        raise ValueError(f'resolution must be at least 256, got {resolution}')
    z = complex(z)
    ends = _gap(family, [family.alpha, family.beta], z)
    if ends[0] <= 0:
        raise IncidenceError(f'z={z} in D̄_α')
    if ends[1] <= 0:
        raise IncidenceError(f'z={z} in D̄_β')

    def gap(s):
        return float(_gap(family, s, z))

    t = family.grid(resolution)
    h = _gap(family, t, z)
    inside = h <= 0
    roots = [brentq(gap, t[i], t[i + 1], xtol=1e-14)
             for i in np.flatnonzero(inside[1:] != inside[:-1])]
    intervals = [(roots[i], roots[i + 1]) for i in range(0, len(roots), 2)]

    tangencies = []
    for i in range(1, t.size - 1):
        if not (0 < h[i] <= h[i - 1] and h[i] <= h[i + 1]):
            continue
        if h[i] > 2 * max(h[i - 1] - h[i], h[i + 1] - h[i]) + tol:
            continue
        res = minimize_scalar(gap, bounds=(t[i - 1], t[i + 1]), method='bounded',
                              options={'xatol': 1e-13})
        if res.fun < 0:
            lo = brentq(gap, t[i - 1], res.x, xtol=1e-14)
            hi = brentq(gap, res.x, t[i + 1], xtol=1e-14)
            LOGGER.debug('short incidence interval [%s, %s] between grid samples', lo, hi)
            intervals.append((lo, hi))
        elif res.fun < tol:
            LOGGER.warning('tangential incidence of z=%s at t=%s (gap %.3g)', z, res.x, res.fun)
            tangencies.append(float(res.x))
    intervals = tuple(sorted((float(a), float(b)) for a, b in intervals))
    LOGGER.debug('I_z for z=%s: %s', z, intervals)
    return IncidenceSet(z, intervals, tuple(tangencies))


def fiber_point(family, t, z):
    """Point w(t) of X_t over `z`, ∞ when z is the center of C_t.

    >>> from holocircles.backend.expression import ExpressionFamily
    >>> fiber_point(ExpressionFamily('t', '1', [-1.1, 1.1]), 0, 0.4j)
    SpherePoint(value=-2.5j)
    """
    jet = eval_family(family, t)
    z = complex(z)
    if z == jet.c0:
        return SpherePoint.infinity()
    return SpherePoint(jet.c0.conjugate() + jet.r0**2 / (z - jet.c0))


def fiber_chart(family, t, z, pivot, side=None):
    """Inverted chart u = 1/(w(t) − pivot) of the fiber and its t-derivative."""
    c, r = family.derivatives(np.asarray(t, dtype=float), 1, side=side)
    n = z - c[0]
    s = np.conj(c[0]) - pivot
    d = s * n + r[0]**2
    dd = np.conj(c[1]) * n - s * c[1] + 2 * r[0] * r[1]
    return n / d, (-c[1] * d - n * dd) / d**2


def _fiber_xyz(family, t, z):
    c, r = family.derivatives(np.asarray(t, dtype=float), 0)
    n = z - c[0]
    return sphere_xyz(np.conj(c[0]) * n + r[0]**2, n)


def _choose_pivot(xyz, base, scale=1.0):
    """First point of a golden-angle spiral around `base` that clears `xyz`."""
    for k in range(_PIVOT_ATTEMPTS):
        candidate = base + scale * 0.25 * k * np.exp(1j * _GOLDEN_ANGLE * k)
        clearance = np.min(np.linalg.norm(xyz - SpherePoint(candidate).xyz(), axis=-1))
        if clearance > _PIVOT_CLEARANCE:
            if k:
                LOGGER.debug('pivot moved to %s after %d attempts', candidate, k)
            return complex(candidate)
    raise FiberError(f'no pivot clears the curve around {base}')


def _sample_interval(family, z, interval, pivot, controller):
    lo, hi = interval
    t = np.linspace(lo, hi, controller.initial_samples)
    inner = [b for b in family.breakpoints if lo < b < hi]
    if inner:
        t = np.union1d(t, inner)
    u = fiber_chart(family, t, z, pivot)[0]
    while True:
        xyz = sphere_xyz(pivot * u + 1, u)
        chords = np.linalg.norm(np.diff(xyz, axis=0), axis=-1)
        reach = np.max(np.linalg.norm(xyz - xyz[0], axis=-1))
        limit = max(controller.chord_fraction * reach, controller.min_chord)
        # chords near ∞ stay below half the distance to it
        pole = np.linalg.norm(xyz - _NORTH, axis=-1)
        near = 0.5 * np.maximum(np.minimum(pole[:-1], pole[1:]), controller.min_chord)
        coarse = chords > np.minimum(limit, near)
        if not np.any(coarse):
            break
        if t.size + np.count_nonzero(coarse) > controller.max_samples:
            LOGGER.warning('loop on [%s, %s] capped at %d samples (chord %.3g > %.3g)',
                           lo, hi, t.size, np.max(chords), limit)
            break
        mids = (t[:-1][coarse] + t[1:][coarse]) / 2
        t = np.concatenate([t, mids])
        u = np.concatenate([u, fiber_chart(family, mids, z, pivot)[0]])
        order = np.argsort(t, kind='stable')
        t, u = t[order], u[order]
    return t, u


def _passes_infinity(family, z, t):
    dist = np.abs(z - family.centers(t))
    i = int(np.argmin(dist))
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
    best = dist[i]
    if hi > lo:
        res = minimize_scalar(lambda s: abs(z - complex(family.centers(s))), bounds=(lo, hi),
                              method='bounded', options={'xatol': 1e-14})
        best = min(best, res.fun)
    return bool(best <= 1e-9 * (1 + abs(z)))


def build_fiber_curve(family, z, sampling=None, resolution=1024, tol=1e-10, incidence=None):
    """Build Γ_z: one adaptively sampled loop per incidence interval."""
    sampling = sampling or SamplingController()
    z = complex(z)
    if incidence is None:
        incidence = incidence_intervals(family, z, resolution, tol)
    base = np.conj(z) + 1
    if not incidence.intervals:
        return FiberCurve(z, incidence, (), base)

    coarse = np.concatenate([np.linspace(a, b, sampling.initial_samples)
                             for a, b in incidence.intervals])
    pivot = _choose_pivot(_fiber_xyz(family, coarse, z), base)

    loops = []
    for interval in incidence.intervals:
        t, u = _sample_interval(family, z, interval, pivot, sampling)
        loop = Loop(interval, t, u, pivot, _passes_infinity(family, z, t), z)
        error = loop.closure_error()
        if error > _CLOSURE_TOLERANCE:
            raise FiberError(f'cannot refine interval endpoints of {interval}: '
                             f'loop misses conj(z) by {error:.3g}')
        loops.append(loop)

    interior = np.concatenate([loop.xyz[1:-1] for loop in loops])
    injective = True
    if len(interior) > 1:
        nearest = cKDTree(interior).query(interior, k=2)[0][:, 1]
        if np.min(nearest) <= 1e-14:
            LOGGER.warning('fiber over z=%s repeats a point (sampled injectivity)', z)
            injective = False
    LOGGER.debug('Γ_z for z=%s: %d loops, %d samples', z, len(loops),
                 sum(loop.size for loop in loops))
    return FiberCurve(z, incidence, tuple(loops), pivot, injective)


def _turns(u, mu):
    """Winding numbers of the closed polyline `u` around each point of `mu`."""
    closed = np.append(u, u[0])
    out = np.empty(mu.size)
    for start in range(0, mu.size, _PROBE_BLOCK):
        q = mu[start:start + _PROBE_BLOCK]
        ratios = (closed[1:, None] - q[None, :]) / (closed[:-1, None] - q[None, :])
        out[start:start + _PROBE_BLOCK] = np.sum(np.angle(ratios), axis=0) / (2 * np.pi)
    return out


def _indices(loop, points):
    """Plane indices of `loop` at the (complex, possibly infinite) `points`.

    Loops that avoid ∞ use the convention n(∞) = 0; loops through ∞ are
    normalised to vanish on the side of their pivot.
    """
    points = np.asarray(points, dtype=complex)
    finite = np.isfinite(points)
    mu = np.zeros(points.shape, dtype=complex)
    with np.errstate(divide='ignore', invalid='ignore'):
        mu[finite] = 1 / (points[finite] - loop.pivot)
    pinned = finite & ~np.isfinite(mu)  # points equal to the pivot
    mu[pinned] = 0
    raw = _turns(loop.u, mu)
    raw[pinned] = 0
    if not loop.passes_infinity:
        raw = raw - _turns(loop.u, np.zeros(1))[0]
    rounded = np.rint(raw)
    if np.any(np.abs(raw - rounded) > _WINDING_TOLERANCE):
        raise WindingError(f'winding sum not integral (deviation {np.max(np.abs(raw - rounded)):.3g})')
    return rounded.astype(int)


def winding_index(loop, w, tol=1e-9):
    """Winding index of `loop` around the sphere point `w`.

    >>> circle = Loop.from_points(np.exp(2j * np.pi * np.arange(64) / 64))
    >>> winding_index(circle, 0), winding_index(circle, 3), winding_index(circle, None)
    (1, 0, 0)
    """
    w = SpherePoint.coerce(w)
    if loop.distance(w) <= tol:
        raise WindingError(f'w={w} within {tol:g} of the loop')
    return int(_indices(loop, [w.as_complex()])[0])


def _probe_points(loops, n):
    k = np.arange(n)
    height = 1 - 2 * (k + 0.5) / n
    ring = np.sqrt(1 - height**2)
    phase = np.exp(1j * _GOLDEN_ANGLE * k)
    probes = [np.array([complex(np.inf, 0)]), ring * phase / (1 - height)]
    for loop in loops:
        if loop.size < 3:
            continue
        picks = np.unique(np.linspace(1, loop.size - 2, min(16, loop.size - 2)).astype(int))
        tangent = np.gradient(loop.u)[picks]
        extent = np.max(np.abs(loop.u - loop.u[0]))
        step = 1e-2 * extent * 1j * tangent / np.abs(tangent)
        for off in (loop.u[picks] + step, loop.u[picks] - step):
            with np.errstate(divide='ignore', invalid='ignore'):
                probes.append(np.where(off == 0, complex(np.inf, 0), loop.pivot + 1 / off))
    probes = np.concatenate(probes)
    return probes[~np.isnan(probes)]


@dataclass(frozen=True, eq=False)
class RegionClassification:
    """Sphere-normalised indices of a set of loops at probe points.

    The first probe is always ∞.  `indices` are shifted so that their minimum
    off the loops is zero, taking the inner side of every finite loop from its
    orientation; probes on a loop get index -1.
    """

    quasi_simple: bool
    probes: np.ndarray
    indices: np.ndarray
    membership: tuple

    @property
    def infinity(self):
        return self.membership[0]


def _side_indices(loops):
    """Totals just inside and just outside each finite loop.

    A finite simple loop has index 0 on its outer side and the sign of its
    area on the inner side; the other loops add their index at one of its
    samples.  Loops through ∞ are left to the probes.
    """
    values = []
    for loop in loops:
        if loop.passes_infinity or loop.size < 3:
            continue
        anchor = loop.w[loop.size // 2]
        try:
            area = loop.signed_area()
            other = sum(int(_indices(o, [anchor])[0]) for o in loops if o is not loop)
        except WindingError as err:
            LOGGER.debug('side indices of a loop skipped: %s', err)
            continue
        if area == 0:
            continue
        values.extend([other, other + int(np.sign(area))])
    return values


def _label(index):
    return {-1: 'on', 0: 'minus', 1: 'plus'}.get(index, f'index {index}')


def classify_regions(loops, probes=512, tol=1e-9, points=None):
    """Total indices of `loops` over a sphere-covering probe sample.

    Generated probes (a Fibonacci sample of the sphere plus points just off
    each side of every loop) that fall within `tol` of a loop are labelled
    'on'; explicit `points` on a loop raise `WindingError`.
    """
    loops = list(loops)
    generated = _probe_points(loops, probes)
    explicit = np.array([SpherePoint.coerce(p).as_complex() for p in points or ()], dtype=complex)
    all_points = np.concatenate([generated, explicit])
    xyz = np.array([SpherePoint.coerce(p).xyz() for p in all_points])

    on = np.zeros(all_points.size, dtype=bool)
    total = np.zeros(all_points.size, dtype=int)
    for loop in loops:
        dist = cKDTree(loop.xyz).query(xyz)[0]
        on |= dist <= tol
    if np.any(on[generated.size:]):
        bad = explicit[on[generated.size:]][0]
        raise WindingError(f'probe {SpherePoint.coerce(bad)} on a loop')
    for loop in loops:
        total[~on] += _indices(loop, all_points[~on])
    sides = np.array(_side_indices(loops) + list(total[~on]), dtype=int)
    floor = int(np.min(sides)) if sides.size else 0
    shifted = np.where(on, -1, total - floor)
    quasi_simple = bool(np.all(sides - floor <= 1))
    membership = tuple(_label(int(i)) for i in shifted)
    if not quasi_simple:
        LOGGER.info('loops are not quasi-simple: index %d found', int(np.max(sides - floor)))
    return RegionClassification(quasi_simple, all_points, shifted, membership)


def infinity_membership(loops, probes=64):
    """Whether ∞ lies in G⁺ ('plus'), in G⁻ ('minus') or on the loops ('on')."""
    return classify_regions(loops, probes).infinity
