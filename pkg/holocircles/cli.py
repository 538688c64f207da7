"""holocircles – numerical checks of analyticity from holomorphic extensions into circles.

Usage:
  holocircles [options] list
  holocircles [options] validate --family <spec> [--samples <n>] [--out <file>]
  holocircles [options] extension --family <spec> --function <spec> --t <t> [-N <n>] [--z <z>]
  holocircles [options] fiber --family <spec> --z <z> [--svg <file>] [--csv <file>]
  holocircles [options] critical --family <spec> [--out <file>] [--svg <file>]
  holocircles [options] continuation --family <spec> [--seed <s>] [--out <file>] [--svg <file>]
  holocircles [options] verify --family <spec> --function <spec> [--config <file>] [--seed <s>] [--out <file>]
  holocircles --help
  holocircles --version

Data options:
  --family <spec>             Circle family: JSON file or bundled:<name>
  --function <spec>           Boundary data: JSON file or bundled:<name>
  --t <t>                     Circle parameter
  --z <z>                     Point of the plane, as RE,IM or a Python literal
  -N <n>                      Samples per circle (power of two) [default: 256]
  --samples <n>               Parameter samples for the family checks [default: 512]
  --seed <s>                  Seed of the separating line search
  --config <file>             Verification configuration (JSON)

Output options:
  --out <file>                Write the JSON or CSV result to a file
  --svg <file>                Also plot the result to an SVG file
  --csv <file>                Also write the sampled loops to a CSV file

Other interface options:
  -v, --verbose               Output additional information
  -g, --debug                 Show debug information on stderr
  --version                   Display the version number
  --help                      Show this message

Exit status:
  0 when checks pass or the verdict is consistent-with-holomorphic, 2 when the
  hypothesis fails, 3 when the family validation or the machinery fails, and
  1 on errors.

Examples:
  holocircles list --verbose
  holocircles validate --family bundled:linear
  holocircles fiber --family bundled:linear --z 0,0.4 --svg fiber.svg
  holocircles verify --family bundled:linear --function bundled:exp --out verdict.json

Copyright (C) 2026  holocircles contributors

SPDX-License-Identifier: GPL-3.0-or-later

This program is distributed in the hope that it will be useful, but WITHOUT ANY
WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A
PARTICULAR PURPOSE.  See the GNU General Public License for more details.
"""

import json
import logging
import sys

from docopt import docopt

from holocircles import export
from holocircles.backend import load_family, load_function, read_spec
from holocircles.boundary import extendibility_defect, extension_values, sample_trace
from holocircles.bundled import FAMILIES, FUNCTIONS
from holocircles.continuation import (choose_separating_line, line_path, loop_classes,
                                      track_loops)
from holocircles.critical import build_critical_curves, tangency_case, SingularPointError
from holocircles.family import validate_family
from holocircles.fiber import build_fiber_curve, classify_regions
from holocircles.util import HolocirclesError, complex_from_str, json_complex
from holocircles.verifier import VerificationConfig, run_verification
from holocircles.version import __version__

# conversion from CLI arg to internal option; only explicitly set options are
# forwarded
_PARSE_ARG = {
    '--family': lambda x: load_family(read_spec(x, 'families')),
    '--function': lambda x: load_function(read_spec(x, 'functions')),
    '--t': float,
    '--z': complex_from_str,
    '-N': int,
    '--samples': int,
    '--seed': int,
    '--config': VerificationConfig.from_file,

    '--out': str,
    '--svg': str,
    '--csv': str,
    '--verbose': bool,
    '--debug': bool,
}

LOGGER = logging.getLogger(__name__)


def _emit(obj, out=None):
    if out:
        export.write_json(obj, out)
    else:
        print(json.dumps(obj, indent=2, sort_keys=True))


def _list_bundled(verbose=False, **opts):
    for title, catalogue in (('Families', FAMILIES), ('Functions', FUNCTIONS)):
        print(f'{title}:')
        names = sorted(catalogue)
        for i, name in enumerate(names):
            spec = catalogue[name]
            branch = '└──' if i == len(names) - 1 else '├──'
            print(f'{branch} bundled:{name}: {spec.get("description", spec["kind"])}')
            if verbose:
                print(f'    {json.dumps(spec, sort_keys=True)}')
        print('')
    return 0


def _validate(family, samples, out=None, **opts):
    report = validate_family(family, samples)
    _emit(report.to_dict(), out)
    return 0 if report.overall else 3


def _extension(family, function, t, n, z=None, **opts):
    trace = sample_trace(function, family, t, n)
    result = {
        't': t,
        'center': json_complex(trace.center),
        'radius': trace.radius,
        'extendibility_defect': extendibility_defect(trace),
        'coefficients': {str(k): json_complex(trace.coefficient(k))
                         for k in range(-4, 5) if -n // 2 <= k < n // 2},
    }
    if z is not None:
        result['z'] = json_complex(z)
        result['value'] = json_complex(extension_values(function, family, [t], z, n)[0])
    _emit(result)
    return 0


def _fiber(family, z, svg=None, csv=None, **opts):
    fiber = build_fiber_curve(family, z)
    regions = classify_regions(fiber.loops) if fiber.loops else None
    result = {
        'z': json_complex(z),
        'incidence': fiber.incidence.to_dict(),
        'loops': [{'interval': list(loop.interval), 'samples': loop.size,
                   'passes_infinity': loop.passes_infinity, 'diameter': loop.diameter}
                  for loop in fiber.loops],
        'injective': fiber.injective,
        'quasi_simple': regions.quasi_simple if regions else None,
        'infinity': regions.infinity if regions else None,
    }
    _emit(result)
    if svg:
        export.fiber_svg(fiber, svg)
    if csv:
        export.write_loops_csv(fiber, csv)
    return 0


def _critical(family, out=None, svg=None, **opts):
    critical = build_critical_curves(family)
    cases = {}
    for branch in critical.branches:
        for i, t in enumerate(branch.t):
            try:
                cases[(branch.sign, i)] = tangency_case(family, branch, t).label
            except SingularPointError:
                cases[(branch.sign, i)] = 'singular'
    if out:
        export.write_branches_csv(critical, out, cases)
    else:
        _emit({
            'singular': [{'t': s.t, 'branch': '+' if s.sign > 0 else '-', 'z': json_complex(s.z)}
                         for s in critical.singular],
            'simple': critical.simplicity,
            'self_crossings': [json_complex(z) for z in critical.self_crossings],
            'cases': {label: sum(1 for v in cases.values() if v == label)
                      for label in sorted(set(cases.values()))},
        })
    if svg:
        export.critical_svg(family, critical, svg)
    return 0


def _continuation(family, seed=0, out=None, svg=None, **opts):
    critical = build_critical_curves(family)
    line = choose_separating_line(family, critical, seed)
    trace = track_loops(family, line_path(line), critical)
    classes = loop_classes(trace)
    result = trace.to_dict()
    result['line'] = line.to_dict()
    result['classes'] = {
        'members': [[list(m) for m in members] for members in classes.classes],
        'parity': list(classes.parity),
        'selected': classes.selected,
    }
    _emit(result, out)
    if svg:
        export.filmstrip_svg(trace, svg)
    return 0


def _verify(family, function, config=None, seed=None, out=None, **opts):
    config = (config or VerificationConfig()).override(seed=seed)
    report = run_verification(family, function, config)
    if out:
        with open(out, 'w') as fh:
            fh.write(report.to_json())
            fh.write('\n')
    else:
        print(report.to_json())
    LOGGER.info('verdict: %s', report.verdict)
    return report.exit_code


def _make_opts(args):
    opts = {}
    for arg, val in args.items():
        if val is not None and arg in _PARSE_ARG:
            opt = arg.lstrip('-').replace('-', '_').lower()
            opts[opt] = _PARSE_ARG[arg](val)
    return opts


def _gen_version():
    extra = None
    try:
        from holocircles.extraversion import __extraversion__
        if not __extraversion__:
            raise ValueError()
        if __extraversion__['editable']:
            extra = ['editable']
        elif __extraversion__['dist_name'] and __extraversion__['dist_package']:
            extra = [__extraversion__['dist_name'], __extraversion__['dist_package']]
        else:
            extra = [__extraversion__['commit'][:12]]
            if __extraversion__['dirty']:
                extra[0] += '-dirty'
    except:
        return 'holocircles v{}'.format(__version__)
    return 'holocircles v{} ({})'.format(__version__, '; '.join(extra))


_COMMANDS = {
    'list': _list_bundled,
    'validate': _validate,
    'extension': _extension,
    'fiber': _fiber,
    'critical': _critical,
    'continuation': _continuation,
    'verify': _verify,
}


def main(argv=None):
    args = docopt(__doc__, argv=argv)

    if args['--version']:
        print(_gen_version())
        sys.exit(0)

    if args['--debug']:
        args['--verbose'] = True
        logging.basicConfig(level=logging.DEBUG, format='[%(levelname)s] %(name)s: %(message)s')
        LOGGER.debug('running %s', _gen_version())
    elif args['--verbose']:
        logging.basicConfig(level=logging.INFO, format='%(levelname)s: %(message)s')
    else:
        logging.basicConfig(level=logging.WARNING, format='%(levelname)s: %(message)s')
        sys.tracebacklimit = 0

    command = next(name for name in _COMMANDS if args[name])
    try:
        opts = _make_opts(args)
        status = _COMMANDS[command](**opts)
    except (HolocirclesError, OSError, ValueError) as err:
        LOGGER.error('%s: %s', command, err)
        sys.exit(1)
    except:
        LOGGER.exception('Unexpected error in %s', command)
        sys.exit(1)
    sys.exit(status)


if __name__ == '__main__':
    main()
