"""Boundary traces of f on the circles and their holomorphic extensions.

The restriction f|C_t is sampled at N equispaced points and transformed to
its Laurent coefficients a_n, −N/2 ≤ n < N/2:

    f(c + r·e^{iθ}) = Σ a_n e^{inθ}

The trace extends holomorphically into D_t exactly when a_n = 0 for n < 0,
and the extension is then f_t(z) = Σ_{n≥0} a_n ((z − c)/r)^n.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

from dataclasses import dataclass

import numpy as np

from scipy import fft

from holocircles.family import check_range
from holocircles.util import HolocirclesError, is_power_of_two

LOGGER = logging.getLogger(__name__)

_MIN_TRACE_SAMPLES = 16


class TraceError(HolocirclesError, ValueError):
    """Trace cannot be sampled."""


class ExtensionError(HolocirclesError, ValueError):
    """Extension cannot be evaluated where requested."""


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Samples of f on one circle and their Laurent coefficients.

    `coefficients[k]` holds a_n for n = k − N/2, so `coefficients[N // 2]`
    is a_0.
    """

    t: float
    center: complex
    radius: float
    values: np.ndarray
    coefficients: np.ndarray

    @property
    def n_samples(self):
        return self.values.size

    @property
    def orders(self):
        half = self.n_samples // 2
        return np.arange(-half, half)

    def coefficient(self, n):
        half = self.n_samples // 2
        if not -half <= n < half:
            raise IndexError(f'coefficient a_{n} not available with N={self.n_samples}')
        return complex(self.coefficients[n + half])

    def points(self):
        theta = 2 * np.pi * np.arange(self.n_samples) / self.n_samples
        return self.center + self.radius * np.exp(1j * theta)


def _check_samples(n):
    if not (is_power_of_two(n) and n >= _MIN_TRACE_SAMPLES):
        raise TraceError(f'N must be a power of two >= {_MIN_TRACE_SAMPLES}, got {n}')


def _circle_values(f, centers, radii, n):
    theta = 2 * np.pi * np.arange(n) / n
    points = centers[:, None] + radii[:, None] * np.exp(1j * theta)[None, :]
    if not f.covers(points):
        raise TraceError(f'{f.description} does not cover the sampled circles')
    return f(points)


def sample_traces(f, family, ts, n=256):
    """Sample the traces of `f` on the circles C_t for every t in `ts`."""
    _check_samples(n)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    check_range(family, ts)
    c, r = (x[0] for x in family.derivatives(ts, 0))
    values = _circle_values(f, c, r.real, n)
    coefficients = fft.fftshift(fft.fft(values, axis=1) / n, axes=1)
    return [BoundaryTrace(float(t), complex(ci), float(ri), v, a)
            for t, ci, ri, v, a in zip(ts, c, r.real, values, coefficients)]


def sample_trace(f, family, t, n=256):
    """Sample the trace of `f` on C_t at `n` equispaced points.

    >>> from holocircles.backend.expression import ExpressionFamily
    >>> from holocircles.backend.function import PolyFunction
    >>> trace = sample_trace(PolyFunction([(0, 1, 1)]), ExpressionFamily('t', '1', [-1, 1]), 0.5, 16)
    >>> round(trace.coefficient(0).real, 12), round(trace.coefficient(-1).real, 12)
    (0.5, 1.0)
    """
    return sample_traces(f, family, [t], n)[0]


def extendibility_defect(trace):
    """Largest negative-order Laurent coefficient, max_{n<0} |a_n|."""
    half = trace.n_samples // 2
    return float(np.max(np.abs(trace.coefficients[:half])))


def _power_series(coefficients, rho):
    # Horner over a_{N/2 - 1}, ..., a_0
    half = coefficients.shape[-1] // 2
    acc = np.zeros(np.broadcast(coefficients[..., 0], rho).shape, dtype=complex)
    for k in range(coefficients.shape[-1] - 1, half - 1, -1):
        acc = acc * rho + coefficients[..., k]
    return acc


def evaluate_extension(trace, z):
    """Evaluate the holomorphic extension f_t at `z` strictly inside C_t."""
    z = np.asarray(z, dtype=complex)
    rho = (z - trace.center) / trace.radius
    if np.any(np.abs(rho) >= 1):
        raise ExtensionError(f'z on or outside C_t (t={trace.t})')
    value = _power_series(trace.coefficients, rho)
    return complex(value) if value.ndim == 0 else value


def extension_values(f, family, ts, z, n=256, defect_tol=None):
    """Return f_t(z) for each t in `ts`.

    When `defect_tol` is given, traces whose extendibility defect exceeds it
    are rejected with `ExtensionError`.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    _check_samples(n)
    check_range(family, ts)
    c, r = (x[0] for x in family.derivatives(ts, 0))
    rho = (complex(z) - c) / r.real
    if np.any(np.abs(rho) >= 1):
        bad = ts[np.abs(rho) >= 1][0]
        raise ExtensionError(f'z={complex(z)} on or outside C_t (t={bad})')
    values = _circle_values(f, c, r.real, n)
    coefficients = fft.fftshift(fft.fft(values, axis=1) / n, axes=1)
    if defect_tol is not None:
        defects = np.max(np.abs(coefficients[:, :n // 2]), axis=1)
        if np.any(defects > defect_tol):
            k = int(np.argmax(defects))
            raise ExtensionError(f'extendibility defect {defects[k]:.3g} at t={ts[k]} '
                                 f'above {defect_tol:g}')
    return _power_series(coefficients, rho)


def consistency_defect(f, family, z, n_t=64, n=256, tol=1e-6):
    """Largest disagreement |f_t(z) − f_s(z)| among the discs containing `z`.

    Only parameters with z at least `tol` inside C_t are used.
    """
    z = complex(z)
    ts = family.grid(n_t)
    c, r = (x[0] for x in family.derivatives(ts, 0))
    inside = np.abs(z - c) < r.real - tol
    if np.count_nonzero(inside) < 2:
        raise ExtensionError(f'z={z} is covered by fewer than two discs')
    values = f.extensions(family, ts[inside], z, n)
    spread = np.abs(values[:, None] - values[None, :])
    i, j = np.unravel_index(np.argmax(spread), spread.shape)
    LOGGER.debug('largest extension mismatch at z=%s between t=%s and s=%s', z,
                 ts[inside][i], ts[inside][j])
    return float(spread[i, j])
