"""Cauchy-type integrals over the fiber loops.

On a loop G of Γ_z the function F(z, w(t)) = f_t(z) collects the values of
the extensions at the fixed point z.  The second-power Cauchy-type integral

    Φ(z, w) = ∫_G F(z, ζ) (ζ − w)^{−2} dζ

vanishes identically when F is constant on G, and its vanishing on small
loops in z (a Morera test) is what forces the extensions to glue into a
holomorphic function.

Integrals are computed in the inverted chart u = 1/(ζ − a) of the loop,
where the kernel reads

    (ζ − w)^{−2} dζ = −u' dt / (1 + (a − w)·u)²

and stays bounded through ζ = ∞.  Its exact antiderivative
K = −u / (1 + (a − w)·u) = −1/(ζ − w) is used on the short end pieces of
each parameter interval, where F is frozen; the rest is integrated by
Romberg extrapolation of the trapezoid rule.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from scipy.integrate import romb, trapezoid
from scipy.spatial.distance import pdist

from holocircles.critical import build_critical_curves, polyline_distance
from holocircles.fiber import SpherePoint, build_fiber_curve, fiber_chart, sphere_xyz
from holocircles.util import HolocirclesError

LOGGER = logging.getLogger(__name__)

_MIN_LEVEL = 4
_MAX_LEVEL = 15
_ON_CURVE = 1e-9

MoreraResult = namedtuple('MoreraResult', ['residual', 'scale'])


class KernelError(HolocirclesError, ArithmeticError):
    """Kernel integral undefined or not evaluable."""


class MoreraError(HolocirclesError, ValueError):
    """Morera loop violates its preconditions."""


class FiberParametrization:
    """A loop of Γ_z parametrised by t over its incidence interval."""

    def __init__(self, family, z, interval, pivot):
        self.family = family
        self.z = complex(z)
        self.interval = tuple(interval)
        self.pivot = complex(pivot)
        lo, hi = self.interval
        self.breakpoints = tuple(b for b in family.breakpoints if lo < b < hi)

    def chart(self, t):
        return fiber_chart(self.family, t, self.z, self.pivot)

    def finite(self, t):
        """w(t) and w'(t) in the finite chart."""
        c, r = self.family.derivatives(np.asarray(t, dtype=float), 1)
        n = self.z - c[0]
        if np.any(n == 0):
            raise KernelError('loop passes through ∞: use the inverted chart')
        w = np.conj(c[0]) + r[0]**2 / n
        dw = np.conj(c[1]) + 2 * r[0] * r[1] / n + r[0]**2 * c[1] / n**2
        return w, dw


class FiniteCurve:
    """Closed curve s ↦ w(s) given in the finite chart, e.g. a circle."""

    def __init__(self, func, derivative, interval, pivot):
        self.func = func
        self.derivative = derivative
        self.interval = tuple(interval)
        self.pivot = complex(pivot)
        self.breakpoints = ()

    @classmethod
    def circle(cls, center=0, radius=1):
        def func(s):
            return center + radius * np.exp(1j * np.asarray(s))

        def derivative(s):
            return 1j * radius * np.exp(1j * np.asarray(s))

        return cls(func, derivative, (0, 2 * np.pi), center + 2 * radius)

    def chart(self, s):
        d = self.func(s) - self.pivot
        return 1 / d, -self.derivative(s) / d**2

    def finite(self, s):
        return self.func(s), self.derivative(s)


def _romberg(func, lo, hi, rtol):
    n = 2**_MIN_LEVEL
    t = np.linspace(lo, hi, n + 1)
    values, sizes = func(t)
    prev = romb(values, dx=(hi - lo) / n)
    for _ in range(_MIN_LEVEL, _MAX_LEVEL):
        mids = (t[:-1] + t[1:]) / 2
        more, more_sizes = func(mids)
        t = np.column_stack([t[:-1], mids]).ravel()
        t = np.append(t, hi)
        values = np.append(np.column_stack([values[:-1], more]).ravel(), values[-1])
        sizes = np.append(np.column_stack([sizes[:-1], more_sizes]).ravel(), sizes[-1])
        n *= 2
        cur = romb(values, dx=(hi - lo) / n)
        scale = trapezoid(sizes, t)
        if abs(cur - prev) <= rtol * scale:
            return complex(cur), float(scale)
        prev = cur
    LOGGER.warning('Romberg integration on [%s, %s] stopped at %d samples (change %.3g, scale %.3g)',
                   lo, hi, n + 1, abs(cur - prev), scale)
    return complex(cur), float(scale)


def _check_off_curve(curve, w, tol):
    lo, hi = curve.interval
    u = curve.chart(np.linspace(lo, hi, 513))[0]
    xyz = sphere_xyz(curve.pivot * u + 1, u)
    if np.min(np.linalg.norm(xyz - w.xyz(), axis=-1)) <= tol:
        raise KernelError(f'w={w} on a loop')


def _kernel(curve, density, w, margin, chart, rtol, tol=_ON_CURVE):
    w = SpherePoint.coerce(w)
    if w.is_infinity:
        return 0j, 0.0
    _check_off_curve(curve, w, tol)
    w0 = w.value
    shift = curve.pivot - w0

    if chart == 'inverted':
        def primitive(t):
            u = curve.chart(np.atleast_1d(t))[0]
            return -u / (1 + shift * u)

        def integrand(t):
            u, du = curve.chart(t)
            values = density(t) * (-du / (1 + shift * u)**2)
            return values, np.abs(values)
    elif chart == 'finite':
        def primitive(t):
            return -1 / (curve.finite(np.atleast_1d(t))[0] - w0)

        def integrand(t):
            ww, dw = curve.finite(t)
            values = density(t) * dw / (ww - w0)**2
            return values, np.abs(values)
    else:
        raise ValueError(f'unknown chart {chart!r}')

    lo, hi = curve.interval
    value, scale = 0j, 0.0
    if margin > 0:
        for a, b, anchor in ((lo, lo + margin, lo + margin), (hi - margin, hi, hi - margin)):
            frozen = density(np.array([anchor]))[0]
            jump = complex(primitive(b)[0] - primitive(a)[0])
            value += frozen * jump
            scale += abs(frozen) * abs(jump)
    cuts = [lo + margin, *curve.breakpoints, hi - margin]
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        v, s = _romberg(integrand, a, b, rtol)
        value += v
        scale += s
    return value, scale


def kernel_integral(curve, density, w, margin=0.0, chart='inverted', rtol=1e-10):
    """∫ F(ζ)(ζ − w)^{−2} dζ over a parametrised closed curve.

    `density` maps parameter arrays to the values of F; `margin` is the
    parameter length at each end over which F is frozen.

    >>> circle = FiniteCurve.circle()
    >>> abs(kernel_integral(circle, np.ones_like, 5)) < 1e-12
    True
    >>> round(abs(kernel_integral(circle, lambda s: np.exp(1j * s), 0.5)), 9)
    6.283185307
    """
    return _kernel(curve, density, w, margin, chart, rtol)[0]


def _density(family, f, z, n, defect_tol):
    def density(t):
        return f.extensions(family, t, z, n, defect_tol=defect_tol)
    return density


def phi_and_scale(family, f, z, loops, w, n=256, margin=1e-3, defect_tol=None,
                  chart='inverted', rtol=1e-10):
    """Φ(z, w) over `loops` together with ∫|F||ζ − w|^{−2}|dζ|."""
    z = complex(z)
    value, scale = 0j, 0.0
    density = _density(family, f, z, n, defect_tol)
    for loop in loops:
        curve = FiberParametrization(family, z, loop.interval, loop.pivot)
        lo, hi = loop.interval
        v, s = _kernel(curve, density, w, margin * (hi - lo), chart, rtol)
        value += v
        scale += s
    return value, scale


def phi(family, f, z, loops, w, n=256, margin=1e-3, defect_tol=None, chart='inverted'):
    """Second-power Cauchy-type integral Φ(z, w) over the loops G_z."""
    return phi_and_scale(family, f, z, loops, w, n, margin, defect_tol, chart)[0]


def phi_scale(family, f, z, loops, w, n=256, margin=1e-3, defect_tol=None):
    """Natural magnitude of Φ(z, w): the integral of |F||ζ − w|^{−2}|dζ|."""
    return phi_and_scale(family, f, z, loops, w, n, margin, defect_tol)[1]


@dataclass(frozen=True, eq=False)
class LoopIntegrand:
    """Values F(z, w(t)) = f_t(z) on the usable samples of a loop.

    `weights` are the t-derivatives of the loop in its inverted chart.
    """

    z: complex
    loop: object
    t: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, family, f, z, loop, n=256, margin=1e-3, defect_tol=None):
        lo, hi = loop.interval
        cut = margin * (hi - lo)
        t = loop.params
        if cut > 0:
            t = np.concatenate([[lo + cut], t[(t > lo + cut) & (t < hi - cut)], [hi - cut]])
        if t.size == 0 or hi - lo <= 2 * cut:
            raise KernelError(f'no interior samples on the loop over [{lo}, {hi}]')
        values = f.extensions(family, t, z, n, defect_tol=defect_tol)
        weights = fiber_chart(family, t, z, loop.pivot)[1]
        return cls(complex(z), loop, t, values, weights)


def loop_constancy_defect(family, f, z, loop, n=256, margin=1e-3, defect_tol=None):
    """Oscillation max |f_t(z) − f_s(z)| of the extensions over one loop.

    With `margin` = 0 the interval endpoints are included, which requires
    data that can be evaluated on the circles through z.
    """
    integrand = LoopIntegrand.build(family, f, z, loop, n, margin, defect_tol)
    values = integrand.values
    if values.size < 2:
        return 0.0
    return float(np.max(pdist(np.column_stack([values.real, values.imag]))))


def _check_clear(family, critical, z0, radius):
    if any(polyline_distance(b.points, z0) <= radius for b in critical.branches):
        raise MoreraError(f'loop around z0={z0} of radius {radius} crosses P')
    centers = family.centers(family.grid(1024))
    if polyline_distance(centers, z0) <= radius:
        raise MoreraError(f'loop around z0={z0} of radius {radius} crosses C')


def morera_phi_test(family, f, z0, radius, w, n=64, critical=None, loops_for=None,
                    n_trace=256, margin=1e-3, defect_tol=None):
    """Residual |∮_γ Φ(z, w) dz| over the circle γ = {|z − z0| = radius}.

    `loops_for(z)` selects the loops G_z integrated over (all loops of Γ_z by
    default).  Returns the residual and the scale ∮ ∫|F||ζ − w|^{−2}|dζ||dz|
    it is relative to.
    """
    z0 = complex(z0)
    if critical is None:
        critical = build_critical_curves(family)
    _check_clear(family, critical, z0, radius)
    if loops_for is None:
        def loops_for(z):
            return build_fiber_curve(family, z).loops

    theta = 2 * np.pi * np.arange(n) / n
    points = z0 + radius * np.exp(1j * theta)
    dz = 1j * radius * np.exp(1j * theta) * (2 * np.pi / n)
    total, scale = 0j, 0.0
    for zk, dzk in zip(points, dz):
        value, size = phi_and_scale(family, f, zk, loops_for(zk), w, n_trace, margin, defect_tol)
        total += value * dzk
        scale += size * abs(dzk)
    LOGGER.debug('Morera residual around z0=%s: %.3g (scale %.3g)', z0, abs(total), scale)
    return MoreraResult(abs(total), scale)
