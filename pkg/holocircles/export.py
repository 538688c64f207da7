"""CSV, JSON and SVG emission of intermediate artifacts.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import csv
import json
import logging

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

LOGGER = logging.getLogger(__name__)

_CLIP = 1e3
_SVG_METADATA = {'Date': None, 'Creator': None}

plt.rcParams['svg.hashsalt'] = 'holocircles'


def write_json(obj, path):
    """Write `obj` as sorted, indented JSON."""
    with open(path, 'w') as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write('\n')
    LOGGER.info('wrote %s', path)


def write_loops_csv(fiber, path):
    """One row per loop sample: loop, t, w_re, w_im, chart."""
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(['loop', 't', 'w_re', 'w_im', 'chart'])
        for k, loop in enumerate(fiber.loops):
            for t, w, chart in zip(loop.params, loop.w, loop.charts):
                writer.writerow([k, repr(float(t)), repr(float(w.real)), repr(float(w.imag)), chart])
    LOGGER.info('wrote %s', path)


def write_branches_csv(critical, path, cases=None):
    """One row per sample of P: t, p_re, p_im, rho, case, branch.

    `cases` maps (sign, index) to a tangency label; unlabelled samples get
    an empty case.
    """
    cases = cases or {}
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(['t', 'p_re', 'p_im', 'rho', 'case', 'branch'])
        for branch in critical.branches:
            rho = branch.curvature_radius
            for i, (t, p) in enumerate(zip(branch.t, branch.points)):
                writer.writerow([repr(float(t)), repr(float(p.real)), repr(float(p.imag)),
                                 repr(float(rho[i])), cases.get((branch.sign, i), ''),
                                 branch.label])
    LOGGER.info('wrote %s', path)


def _finite_path(w):
    """Loop samples with far-away points replaced by gaps."""
    w = np.array(w, dtype=complex)
    far = ~np.isfinite(w) | (np.abs(w) > _CLIP)
    w[far] = np.nan
    return w


def _plot_loops(ax, loops, z=None):
    for k, loop in enumerate(loops):
        w = _finite_path(loop.w)
        ax.plot(w.real, w.imag, lw=1, label=f'loop {k}' + (' (∞)' if loop.passes_infinity else ''))
    if z is not None:
        ax.plot([z.real], [-z.imag], 'k+', ms=8, label='conj(z)')
    ax.set_aspect('equal', adjustable='datalim')
    ax.grid(True, alpha=0.3)


def _save(fig, path):
    fig.savefig(path, format='svg', metadata=_SVG_METADATA)
    plt.close(fig)
    LOGGER.info('wrote %s', path)


def fiber_svg(fiber, path):
    """Plot the loops of Γ_z in the w-plane."""
    fig, ax = plt.subplots(figsize=(6, 6))
    _plot_loops(ax, fiber.loops, fiber.z)
    ax.set_title(f'Γ_z, z = {fiber.z:.6g}')
    ax.set_xlabel('Re w')
    ax.set_ylabel('Im w')
    if fiber.loops:
        ax.legend(fontsize=8)
    _save(fig, path)


def critical_svg(family, critical, path, line=None, n_circles=16):
    """Plot a few circles of the family, the centers curve C and both branches of P."""
    fig, ax = plt.subplots(figsize=(7, 6))
    theta = np.linspace(0, 2 * np.pi, 257)
    t = family.grid(n_circles, with_breakpoints=False)
    for c, r in zip(family.centers(t), family.radii(t)):
        w = c + r * np.exp(1j * theta)
        ax.plot(w.real, w.imag, color='0.8', lw=0.6)
    centers = family.centers(family.grid(512))
    ax.plot(centers.real, centers.imag, 'k--', lw=1, label='C')
    for branch in critical.branches:
        ax.plot(branch.points.real, branch.points.imag, lw=1.2, label=f'P{branch.label}')
    for point in critical.singular:
        ax.plot([point.z.real], [point.z.imag], 'rx', ms=8)
    if line is not None:
        s = np.array([c.s for c in line.crossings_P + line.crossings_C])
        span = np.linspace(s.min() - 0.5, s.max() + 0.5, 2) if s.size else np.array([-1.0, 1.0])
        z = line.point(span)
        ax.plot(z.real, z.imag, 'm-', lw=1, label='L')
    ax.set_aspect('equal', adjustable='datalim')
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(family.description)
    _save(fig, path)


def filmstrip_svg(trace, path, frames=8):
    """Loops of the stations along a continuation path, one panel per station."""
    stations = trace.stations
    picks = np.unique(np.linspace(0, len(stations) - 1, min(frames, len(stations))).astype(int))
    cols = min(4, picks.size)
    rows = -(-picks.size // cols)
    fig, axes = plt.subplots(rows, cols, figsize=(3 * cols, 3 * rows), squeeze=False)
    for ax in axes.ravel()[picks.size:]:
        ax.set_axis_off()
    for ax, k in zip(axes.ravel(), picks):
        st = stations[k]
        _plot_loops(ax, st.loops, st.z)
        ax.set_title(f's={st.s:.4g}', fontsize=9)
        ax.tick_params(labelsize=7)
    fig.tight_layout()
    _save(fig, path)
