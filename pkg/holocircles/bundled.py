"""Bundled circle families and boundary data.

Entries are JSON descriptions, loadable with `holocircles.backend` and
reachable from the command line as `bundled:<name>`.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import math

_TURN = 3 + 0.75 * math.pi

FAMILIES = {
    'linear': {
        'kind': 'expr', 'c': 't', 'r': '1', 't_range': [-1.1, 1.1],
        'description': 'unit circles centered on the real segment [-1.1, 1.1]',
    },
    'strip': {
        'kind': 'expr', 'c': 't', 'r': '1', 't_range': [-2.1, 2.1],
        'description': 'unit circles sweeping the strip |Im z| < 1',
    },
    'cone': {
        'kind': 'expr', 'c': 't', 'r': '1 + 0.3*t', 't_range': [-1.5, 1.5],
        'description': 'circles on the real axis with radii 1 + 0.3t',
    },
    'arc': {
        'kind': 'expr', 'c': '2*exp(i*t)', 'r': '1', 't_range': [0, math.pi],
        'description': 'unit circles centered on the upper half of |z| = 2',
    },
    'hairpin': {
        'kind': 'piecewise',
        'pieces': [
            {'c': '3 - t', 'r': '1', 't_range': [0, 3]},
            {'c': '0.75*i - 0.75*i*exp(-i*(t - 3)/0.75)', 'r': '1', 't_range': [3, _TURN]},
            {'c': f'(t - {_TURN!r}) + 1.5*i', 'r': '1', 't_range': [_TURN, _TURN + 5]},
        ],
        'description': 'unit circles along a hairpin with arms 1.5 apart',
    },
}

FUNCTIONS = {
    'square': {'kind': 'poly', 'terms': [{'m': 2, 'n': 0, 're': 1}]},
    'cubic': {'kind': 'poly', 'terms': [{'m': 3, 'n': 0, 're': 1}, {'m': 1, 'n': 0, 're': -2}]},
    'exp': {'kind': 'exp'},
    'reciprocal': {'kind': 'reciprocal', 'a_re': 3, 'a_im': 0},
    'conjugate': {'kind': 'poly', 'terms': [{'m': 0, 'n': 1, 're': 1}]},
    'modulus2': {'kind': 'poly', 'terms': [{'m': 1, 'n': 1, 're': 1}]},
    'one': {'kind': 'poly', 'terms': [{'m': 0, 'n': 0, 're': 1}]},
}

CATALOGUES = {
    'families': FAMILIES,
    'functions': FUNCTIONS,
}
