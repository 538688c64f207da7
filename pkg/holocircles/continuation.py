"""Continuation of fiber loops along paths in the z-plane.

A straight line L separating C_α from C_β meets the centers curve C an odd
number of times.  Walking along L, the loops of Γ_z deform continuously
except where z crosses P (a loop is created or annihilated, or splits or
merges) or C (a loop passes through ∞, flipping the side of the loop on
which ∞ lies).  Loops related by deformation or splitting form equivalence
classes, and exactly one class sees an odd number of passes through ∞;
its loops make up the curves G_z.

Loops at consecutive stations are matched through their incidence
intervals: a loop is the image of one interval, and intervals of the same
loop overlap across a small step.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from scipy.cluster.hierarchy import DisjointSet
from scipy.optimize import brentq
from scipy.spatial.distance import directed_hausdorff

from holocircles.critical import SingularPointError, _branch_jet, build_critical_curves, tangency_case
from holocircles.family import eval_family
from holocircles.fiber import build_fiber_curve, infinity_membership
from holocircles.util import HolocirclesError, json_complex

LOGGER = logging.getLogger(__name__)

_MAX_ATTEMPTS = 1000
_BAND_FRACTION = 0.1

Crossing = namedtuple('Crossing', ['kind', 's', 'z', 't', 'branch', 'case', 'margin'])


class SeparationError(HolocirclesError, ValueError):
    """No admissible separating line."""


class ContinuationError(HolocirclesError, RuntimeError):
    """Loop tracking failed."""


@dataclass(frozen=True, eq=False)
class SeparatingLine:
    """Line base + s·direction crossing P and C transversally."""

    base: complex
    direction: complex
    crossings_P: tuple
    crossings_C: tuple
    band_halfwidth: float
    attempts: int = 0

    def point(self, s):
        return self.base + s * self.direction

    def coordinate(self, z):
        return float((np.conj(self.direction) * (z - self.base)).real)

    def offset(self, z):
        return float((np.conj(self.direction) * (z - self.base)).imag)

    @property
    def margin(self):
        return min((c.margin for c in self.crossings_P + self.crossings_C), default=np.inf)

    def to_dict(self):
        def crossing(c):
            return {'z': json_complex(c.z), 's': c.s, 't': c.t, 'branch': c.branch,
                    'case': c.case, 'margin': c.margin}
        return {
            'base': json_complex(self.base),
            'direction': json_complex(self.direction),
            'crossings_P': [crossing(c) for c in self.crossings_P],
            'crossings_C': [crossing(c) for c in self.crossings_C],
            'band_halfwidth': self.band_halfwidth,
            'attempts': self.attempts,
        }


def _crossings(family, critical, base, direction, s_range=None):
    """Transversal crossings of the line base + s·direction with P and C."""
    rot = np.conj(direction)
    found = []

    def side(x):
        return np.imag(rot * (x - base))

    def locate(t, values, scalar, kind, branch=None):
        change = np.sign(values[:-1]) * np.sign(values[1:]) < 0
        change |= (values[1:] == 0) & (values[:-1] != 0)
        for i in np.flatnonzero(change):
            if any(t[i] < b < t[i + 1] for b in family.breakpoints):
                continue
            u = brentq(lambda x: side(scalar(x)[0]), t[i], t[i + 1], xtol=1e-14)
            z, velocity = scalar(u)
            s = float(np.real(rot * (z - base)))
            if s_range is not None and not s_range[0] <= s <= s_range[1]:
                continue
            margin = abs(np.imag(rot * velocity / abs(velocity)))
            case = None
            if kind == 'P':
                try:
                    case = tangency_case(family, branch, u).label
                except SingularPointError:
                    case = 'singular'
            found.append(Crossing(kind, s, complex(z), float(u), branch, case, float(margin)))

    for branch in critical.branches:
        def on_branch(x, sign=branch.sign):
            p, d1, *_ = _branch_jet(family, x, sign)
            return p, d1
        locate(branch.t, side(branch.points), on_branch, 'P', branch.sign)

    t = family.grid(len(critical.branches[0].t))
    centers = family.centers(t)

    def on_centers(x):
        jet = eval_family(family, x, order=1, side='right')
        return jet.c0, jet.c1
    locate(t, side(centers), on_centers, 'C')
    found.sort(key=lambda c: c.s)
    return ([c for c in found if c.kind == 'P'], [c for c in found if c.kind == 'C'])


def _admissible(family, critical, base, direction, min_margin, clearance):
    """Crossings of a candidate line, or a reason why it is not admissible."""
    rot = np.conj(direction)
    (ca, cb), (ra, rb) = (x[0] for x in family.derivatives(np.array([family.alpha, family.beta])))
    oa, ob = np.imag(rot * (ca - base)), np.imag(rot * (cb - base))
    if not (oa * ob < 0 and abs(oa) > ra and abs(ob) > rb):
        return None, 'does not separate C_α and C_β', 0.0
    for point in critical.singular:
        if abs(np.imag(rot * (point.z - base))) <= clearance:
            return None, f'passes the singular point of P at t={point.t}', 0.0
    on_p, on_c = _crossings(family, critical, base, direction)
    worst = min((c.margin for c in on_p + on_c), default=np.inf)
    if worst <= min_margin:
        return None, 'non-transversal crossing', worst
    if any(c.case in ('singular', 'case3_forbidden') for c in on_p):
        return None, 'crosses P at a singular point', worst
    if len(on_c) % 2 == 0:
        return None, f'even number ({len(on_c)}) of crossings with C', worst
    halfwidth = _BAND_FRACTION * min(abs(oa) - ra, abs(ob) - rb)
    return (tuple(on_p), tuple(on_c), halfwidth), None, worst


def choose_separating_line(family, critical=None, seed=0, min_margin=1e-3, clearance=1e-3,
                           max_attempts=_MAX_ATTEMPTS):
    """Separate C_α and C_β by a line meeting P and C only transversally.

    The first candidate is the line orthogonal to c(β) − c(α) through the
    middle of the gap between the end circles; further candidates tilt and
    shift it with a generator seeded by `seed`.
    """
    if critical is None:
        critical = build_critical_curves(family)
    (ca, cb), (ra, rb) = (x[0] for x in family.derivatives(np.array([family.alpha, family.beta])))
    gap = abs(cb - ca) - ra - rb
    if gap <= 0:
        raise SeparationError(f'no separating line: end circles are not disjoint (gap {gap:.6g})')
    axis = (cb - ca) / abs(cb - ca)
    base0 = ca + axis * (ra + gap / 2)
    rng = np.random.default_rng(seed)
    worst = []
    for attempt in range(max_attempts):
        if attempt == 0:
            tilt, shift = 0.0, 0.0
        else:
            tilt, shift = rng.uniform(-0.25, 0.25), rng.uniform(-0.4, 0.4) * gap
        base = complex(base0 + shift * axis)
        direction = complex(1j * axis * np.exp(1j * tilt))
        found, reason, margin = _admissible(family, critical, base, direction, min_margin, clearance)
        if found is not None:
            on_p, on_c, halfwidth = found
            LOGGER.info('separating line through %s, direction %s (attempt %d): '
                        '%d crossings with P, %d with C', base, direction, attempt,
                        len(on_p), len(on_c))
            return SeparatingLine(base, direction, on_p, on_c, halfwidth, attempt)
        LOGGER.debug('line attempt %d rejected: %s', attempt, reason)
        worst.append((margin, reason))
    best = max(worst, key=lambda x: x[0])
    raise SeparationError(f'no valid perturbation after {max_attempts} attempts '
                          f'(best margin {best[0]:.3g}: {best[1]})')


def line_path(line, overshoot=None):
    """Path along `line` across all its crossings, from high to low coordinate."""
    s = [c.s for c in line.crossings_P + line.crossings_C]
    lo, hi = min(s), max(s)
    if overshoot is None:
        overshoot = 0.05 * max(hi - lo, 1.0)
    return (line.point(hi + overshoot), line.point(lo - overshoot))


@dataclass(frozen=True)
class StepController:
    """Step control along the path; a rejected step is halved down to `min_step`."""

    initial_step: float = 0.05
    min_step: float = 1e-4
    growth: float = 1.5


@dataclass(frozen=True, eq=False)
class Station:
    s: float
    z: complex
    fiber: object
    infinity: tuple

    @property
    def loops(self):
        return self.fiber.loops


Event = namedtuple('Event', ['kind', 's', 'z', 'station', 'loops', 'cause'])


@dataclass(frozen=True, eq=False)
class ContinuationTrace:
    path: tuple
    stations: tuple
    correspondences: tuple
    events: tuple
    links: tuple
    crossings: tuple

    @property
    def band_edges(self):
        """Indices of the first and last stations carrying loops."""
        busy = [i for i, st in enumerate(self.stations) if st.loops]
        return (busy[0], busy[-1]) if busy else None

    def station_at(self, z, tol=1e-12):
        for i, st in enumerate(self.stations):
            if abs(st.z - complex(z)) <= tol:
                return i
        raise ContinuationError(f'z={complex(z)} is not a station of the trace')

    def to_dict(self):
        stations = []
        for st in self.stations:
            stations.append({
                's': st.s,
                'z': json_complex(st.z),
                'loops': [{'interval': list(loop.interval), 'infinity': inf,
                           'diameter': loop.diameter}
                          for loop, inf in zip(st.loops, st.infinity)],
            })
        events = [{'kind': e.kind, 's': e.s, 'z': json_complex(e.z), 'station': e.station,
                   'loops': [list(x) for x in e.loops], 'cause': e.cause} for e in self.events]
        return {
            'path': [json_complex(z) for z in self.path],
            'stations': stations,
            'correspondences': [[[i, j] for i, j in m] for m in self.correspondences],
            'events': events,
        }


def _path_crossings(family, critical, path):
    out, offset = [], 0.0
    for a, b in zip(path[:-1], path[1:]):
        length = abs(b - a)
        direction = (b - a) / length
        on_p, on_c = _crossings(family, critical, a, direction, (0.0, length))
        out.extend(c._replace(s=c.s + offset) for c in on_p + on_c)
        offset += length
    return sorted(out, key=lambda c: c.s)


def _path_point(path, s):
    for a, b in zip(path[:-1], path[1:]):
        length = abs(b - a)
        if s <= length:
            return a + (b - a) * (s / length)
        s -= length
    return path[-1]


def _components(prev, cur):
    """Connected components of the interval-overlap graph of two stations."""
    edges = [(i, j) for i, a in enumerate(prev.loops) for j, b in enumerate(cur.loops)
             if max(a.interval[0], b.interval[0]) <= min(a.interval[1], b.interval[1])]
    ds = DisjointSet([('p', i) for i in range(len(prev.loops))]
                     + [('c', j) for j in range(len(cur.loops))])
    for i, j in edges:
        ds.merge(('p', i), ('c', j))
    comps = []
    for subset in sorted(ds.subsets(), key=lambda x: sorted(x)):
        comps.append((sorted(i for k, i in subset if k == 'p'),
                      sorted(j for k, j in subset if k == 'c')))
    return edges, comps


_TOPOLOGY = {(0, 1): 'CREATE', (1, 0): 'ANNIHILATE', (1, 2): 'SPLIT', (2, 1): 'MERGE'}


def _compare(prev, cur, k_prev, k_cur, window):
    """Events between two stations, or None when the step must be refined."""
    edges, comps = _components(prev, cur)
    on_p = [c for c in window if c.kind == 'P']
    on_c = [c for c in window if c.kind == 'C']
    events = []
    for left, right in comps:
        shape = (len(left), len(right))
        ids = [(k_prev, i) for i in left] + [(k_cur, j) for j in right]
        if shape == (1, 1):
            i, j = left[0], right[0]
            if prev.infinity[i] != cur.infinity[j]:
                if not on_c:
                    return None
                c = on_c[0]
                events.append(Event('CROSS_INFINITY', c.s, c.z, k_cur, ids,
                                    {'crossing': 'C', 't': c.t}))
        elif shape in _TOPOLOGY:
            if not on_p:
                return None
            c = on_p[0]
            events.append(Event(_TOPOLOGY[shape], c.s, c.z, k_cur, ids,
                                {'crossing': 'P', 't': c.t, 'branch': c.branch, 'case': c.case}))
        else:
            return None
    if len(events) > 1:
        return None
    return edges, events


def _hausdorff(a, b):
    return max(directed_hausdorff(a.xyz, b.xyz)[0], directed_hausdorff(b.xyz, a.xyz)[0])


def track_loops(family, path, critical=None, step=None, sampling=None, resolution=1024):
    """Track the loops of Γ_z along the polyline `path`.

    Stations are placed along the path with a step that is halved whenever
    loops cannot be matched, more than one event happens in a step, or an
    event is not explained by a crossing of P or C inside the step.
    """
    step = step or StepController()
    critical = critical or build_critical_curves(family)
    path = tuple(complex(z) for z in path)
    if len(path) < 2:
        raise ContinuationError('path needs at least two points')
    total = sum(abs(b - a) for a, b in zip(path[:-1], path[1:]))
    crossings = _path_crossings(family, critical, path)
    nudge = step.min_step / 4

    def station(s):
        for _ in range(8):
            if not any(abs(c.s - s) < nudge for c in crossings):
                z = _path_point(path, s)
                fiber = build_fiber_curve(family, z, sampling, resolution)
                if not any(fiber.passes_infinity):
                    break
            LOGGER.debug('station at s=%s sits on P or C, nudged', s)
            s = s + 2 * nudge if s + 2 * nudge <= total else s - 2 * nudge
        else:
            raise ContinuationError(f'no regular station near s={s:.6g}')
        infinity = tuple(infinity_membership([loop]) for loop in fiber.loops)
        return Station(float(s), complex(z), fiber, infinity)

    stations = [station(0.0)]
    correspondences, events, links = [], [], []
    h = step.initial_step
    while stations[-1].s < total:
        prev = stations[-1]
        cur = station(min(prev.s + h, total))
        if cur.s <= prev.s:
            raise ContinuationError(f'path stalled at s={prev.s:.6g} (z={prev.z})')
        tol = 1e-9 * (1 + total)
        window = [c for c in crossings if prev.s - tol < c.s <= cur.s + tol]
        outcome = _compare(prev, cur, len(stations) - 1, len(stations), window)
        if outcome is None:
            h /= 2
            if h < step.min_step:
                raise ContinuationError(
                    f'ambiguous matching between s={prev.s:.6g} (z={prev.z}, {len(prev.loops)} loops) '
                    f'and s={cur.s:.6g} (z={cur.z}, {len(cur.loops)} loops)')
            LOGGER.debug('step halved to %s at s=%s', h, prev.s)
            continue
        edges, found = outcome
        k = len(stations)
        for i, j in edges:
            links.append(((k - 1, i), (k, j)))
            LOGGER.debug('loop %d -> %d at s=%s (Hausdorff %.3g)', i, j, cur.s,
                         _hausdorff(prev.loops[i], cur.loops[j]))
        for event in found:
            log = LOGGER.warning if event.kind == 'MERGE' else LOGGER.info
            log('%s at z=%s (s=%.6g)', event.kind, event.z, event.s)
        events.extend(found)
        correspondences.append(tuple(edges))
        stations.append(cur)
        h = min(h * step.growth, step.initial_step)

    LOGGER.info('tracked %d stations, %d events', len(stations), len(events))
    return ContinuationTrace(path, tuple(stations), tuple(correspondences), tuple(events),
                             tuple(links), tuple(crossings))


@dataclass(frozen=True)
class LoopClasses:
    classes: tuple
    parity: tuple
    selected: int

    def members(self, index=None):
        return self.classes[self.selected if index is None else index]


def loop_classes(trace):
    """Equivalence classes of the tracked loops and the one with odd ∞-parity."""
    ds = DisjointSet()
    for k, st in enumerate(trace.stations):
        for i in range(len(st.loops)):
            ds.add((k, i))
    for a, b in trace.links:
        ds.merge(a, b)
    for event in trace.events:
        if event.kind in ('SPLIT', 'MERGE'):
            for other in event.loops[1:]:
                ds.merge(event.loops[0], other)
    classes = tuple(tuple(sorted(subset)) for subset in sorted(ds.subsets(), key=min))
    parity = []
    for members in classes:
        owned = set(members)
        parity.append(sum(1 for e in trace.events
                          if e.kind == 'CROSS_INFINITY' and owned.intersection(e.loops)))
    odd = [i for i, n in enumerate(parity) if n % 2 == 1]
    if len(odd) != 1:
        summary = ', '.join(f'{len(m)} loops/{n} passes' for m, n in zip(classes, parity))
        raise ContinuationError(f'expected exactly one class with an odd number of passes '
                                f'through ∞, found {len(odd)} ({summary or "no loops"})')
    return LoopClasses(classes, tuple(parity), odd[0])


def select_G(trace, classes, z):
    """Loops of the selected class at the station `z`."""
    k = trace.station_at(z)
    members = set(classes.members())
    return [loop for i, loop in enumerate(trace.stations[k].loops) if (k, i) in members]


def is_contracted(loops, tol=0.05):
    """Whether all of `loops` have shrunk to (nearly) a point of the sphere."""
    return bool(loops) and all(loop.diameter < tol for loop in loops)
