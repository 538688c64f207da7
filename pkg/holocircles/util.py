"""Assorted utilities used by the numerical modules and the CLI.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import logging
import math

from ast import literal_eval

LOGGER = logging.getLogger(__name__)


class HolocirclesError(Exception):
    """Base class of all errors raised by holocircles."""


def is_power_of_two(n):
    """Check that `n` is a positive integral power of two.

    >>> is_power_of_two(256)
    True
    >>> is_power_of_two(96)
    False
    >>> is_power_of_two(0)
    False
    """
    return isinstance(n, int) and n > 0 and n & (n - 1) == 0


def complex_from_str(x):
    """Parse a complex number given as `RE,IM` or as a Python literal.

    >>> complex_from_str('0,0.4')
    0.4j
    >>> complex_from_str('1.5, -2')
    (1.5-2j)
    >>> complex_from_str('2+1j')
    (2+1j)
    >>> complex_from_str('3')
    (3+0j)

    >>> complex_from_str('1,2,3')
    Traceback (most recent call last):
        ...
    ValueError: Cannot parse complex number: 1,2,3
    >>> complex_from_str('i')
    Traceback (most recent call last):
        ...
    ValueError: Cannot parse complex number: i
    """
    parts = x.split(',')
    try:
        if len(parts) == 2:
            re, im = (literal_eval(p.strip()) for p in parts)
            if isinstance(re, complex) or isinstance(im, complex):
                raise ValueError()
            return complex(re, im)
        elif len(parts) == 1:
            return complex(literal_eval(x.strip()))
    except (ValueError, SyntaxError, TypeError):
        pass
    raise ValueError(f'Cannot parse complex number: {x}')


def json_real(x):
    """Encode a real number for strict JSON, spelling out non-finite values.

    >>> json_real(0.5)
    0.5
    >>> json_real(float('inf'))
    'inf'
    """
    x = float(x)
    if math.isfinite(x):
        return x
    return repr(x)


def json_complex(z):
    """Encode a complex number as a `[re, im]` pair.

    >>> json_complex(1 - 2j)
    [1.0, -2.0]
    """
    z = complex(z)
    return [json_real(z.real), json_real(z.imag)]
