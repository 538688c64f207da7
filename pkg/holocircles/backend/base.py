"""Base circle family and function APIs.

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import numpy as np

from holocircles.util import HolocirclesError


class RangeError(HolocirclesError, ValueError):
    """Parameter outside the family range."""


class BreakpointError(HolocirclesError, ValueError):
    """Derivative requested at a breakpoint without choosing a side."""


class BackendError(HolocirclesError, ArithmeticError):
    """A backend cannot evaluate what was asked of it."""


class BaseFamily:
    """Base circle family API.

    A family is the map t ↦ (c(t), r(t)) on a closed interval [α, β], with
    c complex and r positive.  All families are expected to implement this
    API so that the numerical modules can stay unaware of how the circles are
    described.

    Example usage:

        family = load_family({'kind': 'expr', 'c': 't', 'r': '1',
                              't_range': [-1.1, 1.1]})
        c, r = family.derivatives(np.linspace(*family.t_range, 64), order=1)
        print(abs(c[1]) > abs(r[1]))

    Subclasses declare the JSON `KIND` they are built from; `load_family`
    finds them through `find_all_subclasses`.
    """

    KIND = None
    MAX_ORDER = 3

    def __init__(self, t_range, breakpoints=(), description=None):
        alpha, beta = (float(x) for x in t_range)
        if not alpha < beta:
            raise RangeError(f'empty parameter range [{alpha}, {beta}]')
        self._t_range = (alpha, beta)
        self._breakpoints = tuple(sorted(float(b) for b in breakpoints))
        self._description = description

    @classmethod
    def from_spec(cls, spec):
        """Build a family from its decoded JSON description."""
        raise NotImplementedError()

    def to_spec(self):
        """Return the JSON description of the family."""
        raise NotImplementedError()

    def derivatives(self, t, order=0, side=None):
        """Evaluate c, r and their derivatives.

        Returns a `(c, r)` pair of arrays of shape `(order + 1,) + shape(t)`,
        holding c, c', ..., c⁽ᵒʳᵈᵉʳ⁾ and the same for r.  At a breakpoint the
        one-sided derivatives are returned, from the left if `side` is 'left'
        and from the right otherwise.
        """
        raise NotImplementedError()

    @property
    def t_range(self):
        """Closed parameter interval (α, β)."""
        return self._t_range

    @property
    def alpha(self):
        return self._t_range[0]

    @property
    def beta(self):
        return self._t_range[1]

    @property
    def breakpoints(self):
        """Sorted parameters where c or r fail to be C³, excluding α and β."""
        return self._breakpoints

    @property
    def description(self):
        """Human readable description of the family."""
        return self._description or f'{type(self).__name__} on [{self.alpha}, {self.beta}]'

    def centers(self, t):
        return self.derivatives(np.asarray(t, dtype=float), 0)[0][0]

    def radii(self, t):
        return self.derivatives(np.asarray(t, dtype=float), 0)[1][0].real

    def grid(self, n, with_breakpoints=True):
        """Uniform parameter grid over [α, β], breakpoints merged in."""
        t = np.linspace(self.alpha, self.beta, n)
        if with_breakpoints and self._breakpoints:
            t = np.union1d(t, self._breakpoints)
        return t


class BaseFunction:
    """Base boundary-data API.

    A function is a complex valued f defined on (a region covering) the
    closure of Ω.  Only point evaluation is required from subclasses;
    `extensions` defaults to sampling f on the circles and extending the
    traces, and can be overridden to feed per-circle data directly.
    """

    KIND = None
    holomorphic = False

    @classmethod
    def from_spec(cls, spec):
        """Build a function from its decoded JSON description."""
        raise NotImplementedError()

    def to_spec(self):
        """Return the JSON description of the function."""
        raise NotImplementedError()

    def __call__(self, z):
        """Evaluate f at the (array of) points `z`."""
        raise NotImplementedError()

    def covers(self, z):
        """Check that f is defined at all of the points `z`."""
        return True

    def extensions(self, family, ts, z, n_samples=256, defect_tol=None):
        """Return f_t(z) for each t in `ts`, f_t being the extension into D_t."""
        from holocircles.boundary import extension_values
        return extension_values(self, family, ts, z, n_samples, defect_tol=defect_tol)

    @property
    def description(self):
        """Human readable description of the function."""
        return type(self).__name__


def find_all_subclasses(cls):
    """Recursively find loaded subclasses of `cls`.

    Returns a set of subclasses of `cls`.
    """
    sub = set(cls.__subclasses__())
    return sub.union([s for c in cls.__subclasses__() for s in find_all_subclasses(c)])
