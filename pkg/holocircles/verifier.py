"""End-to-end verification of the circle-analyticity chain.

The pipeline validates the family, sweeps the hypothesis (every trace
extends holomorphically into its disc), runs the CR-integral machinery
along a separating line and finally tests the conclusion directly with a
∂̄ residual over Ω.  Stages run in order:

    validation → hypothesis → critical → separation → continuation
               → machinery → conclusion

A failing gate stops the chain; the verdict is a function of the recorded
measurements and the configured tolerances only.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import json
import logging

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from scipy.integrate import romb, trapezoid

from holocircles.backend.function import DomainError
from holocircles.boundary import (ExtensionError, consistency_defect, extendibility_defect,
                                  sample_traces)
from holocircles.continuation import (StepController, choose_separating_line, is_contracted,
                                      line_path, loop_classes, select_G, track_loops)
from holocircles.critical import build_critical_curves, distance_to_critical, polyline_distance
from holocircles.family import validate_family
from holocircles.fiber import build_fiber_curve, classify_regions
from holocircles.integral import loop_constancy_defect, morera_phi_test, phi_and_scale
from holocircles.util import HolocirclesError, is_power_of_two, json_complex, json_real

LOGGER = logging.getLogger(__name__)

CONSISTENT = 'consistent-with-holomorphic'
HYPOTHESIS_FAILS = 'hypothesis-fails'
MACHINERY_FAILS = 'machinery-fails'

STAGES = ('validation', 'hypothesis', 'critical', 'separation', 'continuation',
          'machinery', 'conclusion')

_ASSUMPTIONS = (
    'the sets V+ and V- are sampled, their connectivity is assumed and not verified',
)


class ConfigError(HolocirclesError, ValueError):
    """Invalid verification configuration."""


class StageError(HolocirclesError, RuntimeError):
    """Hard error inside one stage of the pipeline."""

    def __init__(self, stage, message):
        super().__init__(f'{stage}: {message}')
        self.stage = stage


@dataclass(frozen=True)
class VerificationConfig:
    """Sampling parameters and tolerances of `run_verification`.

    Tolerances on Φ and on the Morera residuals are relative to the natural
    scale of the integrals; the others are absolute.
    """

    n_trace: int = 256
    t_samples: int = 64
    validation_samples: int = 512
    grid_resolution: int = 32
    fiber_resolution: int = 1024
    extendibility_tol: float = 1e-8
    consistency_tol: float = 1e-7
    phi_tol: float = 1e-5
    morera_tol: float = 1e-4
    dbar_tol: float = 1e-6
    step: float = 0.05
    min_step: float = 1e-4
    stations_sampled: int = 20
    phi_samples: int = 50
    morera_loops: int = 5
    morera_points: int = 32
    margin: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if not (is_power_of_two(self.n_trace) and self.n_trace >= 16):
            raise ConfigError(f'n_trace must be a power of two >= 16, got {self.n_trace}')
        for field in fields(self):
            value = getattr(self, field.name)
            if field.name.endswith('_tol') and not value > 0:
                raise ConfigError(f'{field.name} must be positive, got {value}')
        if not 0 < self.min_step <= self.step:
            raise ConfigError(f'need 0 < min_step <= step, got {self.min_step} and {self.step}')
        if not 0 <= self.margin < 0.5:
            raise ConfigError(f'margin must be in [0, 0.5), got {self.margin}')
        for name in ('t_samples', 'grid_resolution', 'stations_sampled', 'phi_samples',
                     'morera_loops', 'morera_points'):
            if getattr(self, name) < 1:
                raise ConfigError(f'{name} must be at least 1, got {getattr(self, name)}')
        if self.validation_samples < 64:
            raise ConfigError(f'validation_samples must be at least 64, '
                              f'got {self.validation_samples}')

    @classmethod
    def from_dict(cls, options):
        known = {f.name: f.type for f in fields(cls)}
        unknown = sorted(set(options) - set(known))
        if unknown:
            raise ConfigError(f'unknown configuration keys: {", ".join(unknown)}')
        values = {}
        for key, value in options.items():
            try:
                values[key] = (int if known[key] in (int, 'int') else float)(value)
            except (TypeError, ValueError):
                raise ConfigError(f'{key}: cannot use {value!r}') from None
        return cls(**values)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, 'r') as fh:
                options = json.load(fh)
        except json.JSONDecodeError as err:
            raise ConfigError(f'{path}: {err}') from None
        if not isinstance(options, dict):
            raise ConfigError(f'{path}: expected a JSON object')
        return cls.from_dict(options)

    def override(self, **options):
        return replace(self, **{k: v for k, v in options.items() if v is not None})


@dataclass(frozen=True)
class VerdictReport:
    family: str
    function: str
    validation: dict
    hypothesis: dict
    machinery: dict
    conclusion: dict
    verdict: str
    witness: dict
    config: dict
    assumptions: tuple = _ASSUMPTIONS

    @property
    def exit_code(self):
        return {CONSISTENT: 0, HYPOTHESIS_FAILS: 2, MACHINERY_FAILS: 3}[self.verdict]

    def to_dict(self):
        out = asdict(self)
        out['assumptions'] = list(self.assumptions)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _square_integrals(f, corners, h, richardson):
    # counter-clockwise sides of each square, sampled at m points each
    m = 5 if richardson else 2
    s = np.linspace(0, 1, m)
    steps = h * np.array([1, 1j, -1, -1j])
    starts = corners[:, None] + np.cumsum(np.concatenate([[0], steps[:-1]]))[None, :]
    points = starts[..., None] + s[None, None, :] * steps[None, :, None]
    if not f.covers(points):
        raise DomainError(f'{f.description} does not cover the ∂̄ mesh')
    values = f(points)
    rule = romb if richardson else trapezoid
    per_side = rule(values, dx=1 / (m - 1), axis=-1)
    return np.sum(per_side * steps[None, :], axis=-1)


def dbar_residual(f, region, h, inside=None, richardson=False):
    """Largest |∮ f dz| / h² over the squares of side `h` tiling `region`.

    `region` is (x0, x1, y0, y1); with `inside` given, only squares whose
    four corners it accepts are used.  Each side is integrated by the
    trapezoid rule or, with `richardson`, by Romberg extrapolation on five
    points.  For smooth f the residual approximates 2|∂f/∂z̄|.

    >>> from holocircles.backend.function import PolyFunction
    >>> round(dbar_residual(PolyFunction([(0, 1, 1)]), (0, 1, 0, 1), 0.25), 10)
    2.0
    """
    x0, x1, y0, y1 = (float(v) for v in region)
    if not (h > 0 and x1 - x0 >= h and y1 - y0 >= h):
        raise ValueError(f'mesh h={h} does not fit region {region}')
    nx, ny = int(np.floor((x1 - x0) / h + 1e-9)), int(np.floor((y1 - y0) / h + 1e-9))
    xx, yy = np.meshgrid(x0 + h * np.arange(nx), y0 + h * np.arange(ny), indexing='ij')
    corners = (xx + 1j * yy).ravel()
    if inside is not None:
        keep = np.ones(corners.size, dtype=bool)
        for offset in (0, h, h + 1j * h, 1j * h):
            keep &= inside(corners + offset)
        corners = corners[keep]
    if corners.size == 0:
        raise ValueError(f'no mesh square of side {h} inside the region')
    residuals = np.abs(_square_integrals(f, corners, h, richardson)) / h**2
    k = int(np.argmax(residuals))
    LOGGER.debug('∂̄ residual %.3g on the square at %s (%d squares)', residuals[k],
                 corners[k], corners.size)
    return float(residuals[k])


def _in_omega(family, n_samples, clearance):
    t = family.grid(n_samples)
    c, r = (x[0] for x in family.derivatives(t, 0))

    def inside(z):
        z = np.asarray(z, dtype=complex)
        gaps = np.abs(z[..., None] - c) - r.real
        return np.min(gaps, axis=-1) < -clearance
    return inside, c, r.real


def _validation_stage(family, config):
    report = validate_family(family, config.validation_samples)
    return report.to_dict(), report.overall


def _hypothesis_stage(family, f, config):
    ts = family.grid(config.t_samples)
    traces = sample_traces(f, family, ts, config.n_trace)
    defects = np.array([extendibility_defect(tr) for tr in traces])
    k = int(np.argmax(defects))
    passed = bool(defects[k] <= config.extendibility_tol)
    LOGGER.info('hypothesis sweep: max extendibility defect %.3g at t=%s', defects[k], ts[k])
    return {
        'max_extendibility_defect': float(defects[k]),
        'witness_t': float(ts[k]),
        'n_t': int(ts.size),
        'passed': passed,
    }


def _pick(items, n):
    if len(items) <= n:
        return list(items)
    return [items[i] for i in np.unique(np.linspace(0, len(items) - 1, n).round().astype(int))]


def _overlaps(a, b):
    return max(a[0], b[0]) <= min(a[1], b[1])


def _loops_near(family, trace, classes, config):
    """Loops G_z for points off the stations, matched at the nearest station."""
    zs = np.array([st.z for st in trace.stations])

    def loops_for(z):
        k = int(np.argmin(np.abs(zs - z)))
        selected = select_G(trace, classes, zs[k])
        fiber = build_fiber_curve(family, z, resolution=config.fiber_resolution)
        return [loop for loop in fiber.loops
                if any(_overlaps(loop.interval, g.interval) for g in selected)]
    return loops_for


def _phi_samples(family, f, z, loops, config, count, rng):
    regions = classify_regions(loops, probes=64)
    finite = np.isfinite(regions.probes)
    clear = np.array([min(loop.distance(w) for loop in loops) > 1e-2 if ok else False
                      for w, ok in zip(regions.probes, finite)])
    out = []
    for side in ('plus', 'minus'):
        choices = np.flatnonzero(clear & (np.array(regions.membership) == side))
        if choices.size == 0:
            continue
        for i in rng.choice(choices, size=min(count, choices.size), replace=False):
            w = complex(regions.probes[i])
            value, scale = phi_and_scale(family, f, z, loops, w, config.n_trace, config.margin)
            out.append((side, w, abs(value) / scale if scale > 0 else abs(value)))
    return out, regions.quasi_simple


def _machinery_stage(family, f, config, critical, line, trace, classes):
    rng = np.random.default_rng(config.seed)
    usable = []
    for k, st in enumerate(trace.stations):
        loops = select_G(trace, classes, st.z)
        if loops and not is_contracted(loops):
            usable.append((k, st, loops))
    if not usable:
        raise HolocirclesError('no station carries non-contracted loops of the selected class')
    sampled = _pick(usable, config.stations_sampled)

    constancy, consistency, phis, quasi_simple = [], [], [], True
    per_station = max(1, -(-config.phi_samples // (2 * len(sampled))))
    for k, st, loops in sampled:
        defect = max(loop_constancy_defect(family, f, st.z, loop, config.n_trace, config.margin)
                     for loop in loops)
        constancy.append((defect, st.z))
        try:
            consistency.append((consistency_defect(f, family, st.z, n=config.n_trace), st.z))
        except ExtensionError as err:
            LOGGER.warning('consistency check skipped at z=%s: %s', st.z, err)
        found, simple = _phi_samples(family, f, st.z, loops, config, per_station, rng)
        quasi_simple = quasi_simple and bool(simple)
        phis.extend((rel, st.z, w, side) for side, w, rel in found)
    phis = phis[:config.phi_samples]

    # small circles around stations, clear of P, C and the end circles
    loops_for = _loops_near(family, trace, classes, config)
    centers = family.centers(family.grid(1024))
    candidates = []
    for k, st, loops in usable:
        clearance = min(distance_to_critical(critical, st.z), polyline_distance(centers, st.z))
        candidates.append((clearance, k, st))
    candidates.sort(key=lambda x: (-x[0], x[1]))
    morera = []
    for clearance, k, st in _pick(sorted(candidates[:4 * config.morera_loops],
                                         key=lambda x: x[1]), config.morera_loops):
        radius = 0.5 * clearance
        w = _morera_target(loops_for(st.z), rng)
        if w is None:
            LOGGER.warning('Morera test skipped at z=%s: no clear target point', st.z)
            continue
        result = morera_phi_test(family, f, st.z, radius, w, config.morera_points,
                                 critical=critical, loops_for=loops_for,
                                 n_trace=config.n_trace, margin=config.margin)
        rel = result.residual / result.scale if result.scale > 0 else result.residual
        morera.append((rel, st.z, radius, w))

    parity = classes.parity[classes.selected]
    contraction = [trace.stations[i].loops for i in trace.band_edges] if trace.band_edges else []
    measures = {
        'stations': len(trace.stations),
        'stations_sampled': len(sampled),
        'events': _event_counts(trace),
        'crossings_C': len(line.crossings_C),
        'crossings_P': len(line.crossings_P),
        'selected_class_parity': int(parity),
        'classes': len(classes.classes),
        'quasi_simple': bool(quasi_simple),
        'edge_diameters': [max((loop.diameter for loop in loops), default=0.0)
                           for loops in contraction],
        'max_loop_constancy_defect': max(d for d, _ in constancy),
        'max_consistency_defect': max((d for d, _ in consistency), default=0.0),
        'max_phi_relative': max((p[0] for p in phis), default=0.0),
        'phi_samples': len(phis),
        'phi_sides': sorted({p[3] for p in phis}),
        'max_morera_relative': max((m[0] for m in morera), default=0.0),
        'morera_loops': [{'z0': json_complex(z0), 'radius': radius, 'w': json_complex(w),
                          'relative_residual': rel} for rel, z0, radius, w in morera],
    }
    checks = {
        'loop_constancy': measures['max_loop_constancy_defect'] <= config.consistency_tol,
        'consistency': measures['max_consistency_defect'] <= config.consistency_tol,
        'phi': bool(measures['max_phi_relative'] <= config.phi_tol),
        'morera': bool(measures['max_morera_relative'] <= config.morera_tol),
        'parity': parity % 2 == 1,
        'quasi_simple': quasi_simple,
    }
    measures['checks'] = checks
    measures['passed'] = all(checks.values())
    witness = None
    if not measures['passed']:
        failed = sorted(k for k, ok in checks.items() if not ok)
        witness = {'stage': 'machinery', 'checks': failed}
        if 'loop_constancy' in failed:
            worst = max(constancy, key=lambda x: x[0])
            witness['z'] = json_complex(worst[1])
    return measures, witness


def _morera_target(loops, rng):
    if not loops:
        return None
    regions = classify_regions(loops, probes=64)
    choices = [i for i, (w, side) in enumerate(zip(regions.probes, regions.membership))
               if side in ('plus', 'minus') and np.isfinite(w)
               and min(loop.distance(w) for loop in loops) > 0.05]
    if not choices:
        return None
    return complex(regions.probes[rng.choice(choices)])


def _event_counts(trace):
    counts = {}
    for event in trace.events:
        counts[event.kind] = counts.get(event.kind, 0) + 1
    return dict(sorted(counts.items()))


def _conclusion_stage(family, f, config):
    inside, c, r = _in_omega(family, config.validation_samples, 1e-9)
    region = (float(np.min(c.real - r)), float(np.max(c.real + r)),
              float(np.min(c.imag - r)), float(np.max(c.imag + r)))
    h = max(region[1] - region[0], region[3] - region[2]) / config.grid_resolution
    residual = dbar_residual(f, region, h, inside=inside, richardson=True)
    LOGGER.info('∂̄ residual over Ω: %.3g (h=%.3g)', residual, h)
    return {'dbar_residual': residual, 'h': h, 'region': list(region),
            'passed': residual <= config.dbar_tol}


def _run(stage, func, *args):
    LOGGER.info('stage %s', stage)
    try:
        return func(*args)
    except HolocirclesError as err:
        raise StageError(stage, str(err)) from err


def run_verification(family, f, config=None):
    """Run the verification chain of `f` against `family` and return the verdict."""
    config = config or VerificationConfig()
    common = dict(family=family.description, function=f.description,
                  config={k: json_real(v) if isinstance(v, float) else v
                          for k, v in sorted(asdict(config).items())})
    empty = {'hypothesis': {}, 'machinery': {}, 'conclusion': {}}

    validation, valid = _run('validation', _validation_stage, family, config)
    if not valid:
        failed = sorted(k for k, v in validation['conditions'].items() if not v['passed'])
        return VerdictReport(validation=validation, verdict=MACHINERY_FAILS,
                             witness={'stage': 'validation', 'conditions': failed},
                             **empty, **common)

    hypothesis = _run('hypothesis', _hypothesis_stage, family, f, config)
    if not hypothesis['passed']:
        conclusion = _run('conclusion', _conclusion_stage, family, f, config)
        witness = {'stage': 'hypothesis', 't': hypothesis['witness_t'],
                   'defect': hypothesis['max_extendibility_defect']}
        return VerdictReport(validation=validation, hypothesis=hypothesis, machinery={},
                             conclusion=conclusion, verdict=HYPOTHESIS_FAILS, witness=witness,
                             **common)

    critical = _run('critical', build_critical_curves, family)
    line = _run('separation', choose_separating_line, family, critical, config.seed)
    step = StepController(config.step, config.min_step)

    def continuation():
        trace = track_loops(family, line_path(line), critical, step,
                            resolution=config.fiber_resolution)
        return trace, loop_classes(trace)
    trace, classes = _run('continuation', continuation)
    machinery, witness = _run('machinery', _machinery_stage, family, f, config, critical, line,
                              trace, classes)
    conclusion = _run('conclusion', _conclusion_stage, family, f, config)

    if witness is not None:
        verdict = MACHINERY_FAILS
    elif not conclusion['passed']:
        verdict = MACHINERY_FAILS
        witness = {'stage': 'conclusion', 'dbar_residual': conclusion['dbar_residual']}
    else:
        verdict, witness = CONSISTENT, {}
    LOGGER.info('verdict: %s', verdict)
    return VerdictReport(validation=validation, hypothesis=hypothesis, machinery=machinery,
                         conclusion=conclusion, verdict=verdict, witness=witness, **common)
