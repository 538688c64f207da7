"""Circle family and boundary data backends.

Families and functions are described by small JSON documents whose `kind`
selects the backend class.  Generic code – including the holocircles CLI –
builds them without knowing the concrete classes:

    from holocircles.backend import load_family, load_function
    family = load_family({'kind': 'expr', 'c': 't', 'r': '1', 't_range': [-1.1, 1.1]})
    f = load_function({'kind': 'exp'})

Specs can also be read from files, or from the bundled catalogue with the
`bundled:<name>` notation:

    family = load_family(read_spec('bundled:hairpin', catalogue='families'))

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import json
import logging

import holocircles.backend.expression
import holocircles.backend.function
import holocircles.backend.sampled

from holocircles.backend.base import BaseFamily, BaseFunction, find_all_subclasses
from holocircles.util import HolocirclesError

LOGGER = logging.getLogger(__name__)


class SpecError(HolocirclesError, ValueError):
    """Unreadable or inconsistent family or function description."""


def _load(base, spec):
    if not isinstance(spec, dict) or 'kind' not in spec:
        raise SpecError('expected a JSON object with a "kind" field')
    for cls in sorted(find_all_subclasses(base), key=lambda x: x.__name__):
        if cls.KIND == spec['kind']:
            try:
                obj = cls.from_spec(spec)
            except (KeyError, TypeError) as err:
                raise SpecError(f'incomplete {spec["kind"]!r} description: {err}') from None
            LOGGER.debug('instanced %s for kind=%s', cls.__name__, spec['kind'])
            return obj
    raise SpecError(f'unknown kind {spec["kind"]!r}')


def load_family(spec):
    """Instantiate the circle family described by `spec`."""
    return _load(BaseFamily, spec)


def load_function(spec):
    """Instantiate the boundary data described by `spec`."""
    return _load(BaseFunction, spec)


def read_spec(source, catalogue=None):
    """Read a JSON description from a file, or from the bundled catalogue.

    `source` is either a path or `bundled:<name>`, the latter looked up in the
    `catalogue` ('families' or 'functions') of `holocircles.bundled`.
    """
    if source.startswith('bundled:'):
        from holocircles.bundled import CATALOGUES
        name = source.split(':', 1)[1]
        try:
            return dict(CATALOGUES[catalogue][name])
        except KeyError:
            raise SpecError(f'no bundled {catalogue or "spec"} named {name!r}') from None
    try:
        with open(source, 'r') as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise SpecError(f'{source}: {err}') from None


__all__ = [
    'load_family',
    'load_function',
    'read_spec',
]
