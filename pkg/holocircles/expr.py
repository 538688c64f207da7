"""Expression mini-grammar for closed-form circle families.

Expressions are written in the parameter `t` with the usual arithmetic
operators, integral powers (`**` or `^`), the functions `sin`, `cos`, `exp`
and `sqrt`, the constants `pi` and `e`, and complex constants either as
Python literals (`2j`) or through the imaginary unit `i` (also `j`).

Parsing goes through Python's own `ast` module; only a small whitelist of
nodes is accepted.  The checked tree is evaluated on torch tensors, and
derivatives come from `holocircles.jet`.

>>> np.allclose(Expression('2*exp(i*t)').derivatives(0.0, order=2), [2, 2j, -2])
True
>>> Expression('t^2 - 3').derivatives(2.0, order=1).real.tolist()
[1.0, 4.0]

>>> Expression('t + x')
Traceback (most recent call last):
    ...
holocircles.expr.ExpressionError: unknown name 'x' in 't + x'
>>> Expression('t ** t')
Traceback (most recent call last):
    ...
holocircles.expr.ExpressionError: only constant integral exponents are supported in 't ** t'

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import ast
import logging
import math
import operator

import numpy as np
import torch

from holocircles import jet
from holocircles.util import HolocirclesError

LOGGER = logging.getLogger(__name__)

_CONSTANTS = {
    'pi': math.pi,
    'e': math.e,
    'i': 1j,
    'j': 1j,
}
_FUNCTIONS = {
    'sin': torch.sin,
    'cos': torch.cos,
    'exp': torch.exp,
    'sqrt': torch.sqrt,
}
_BINARY = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_UNARY = {
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


class ExpressionError(HolocirclesError, ValueError):
    """Malformed or unsupported expression."""


class Expression:
    """Closed-form expression in `t`, differentiable to any order."""

    def __init__(self, text):
        self.text = str(text)
        try:
            tree = ast.parse(self.text.replace('^', '**'), mode='eval')
        except SyntaxError as err:
            raise ExpressionError(f'cannot parse {self.text!r}: {err.msg}') from None
        self._body = tree.body
        self._check(self._body)

    def _check(self, node):
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exponent = node.right
                if isinstance(exponent, ast.UnaryOp) and isinstance(exponent.op, ast.USub):
                    exponent = exponent.operand
                if not (isinstance(exponent, ast.Constant) and type(exponent.value) is int):
                    raise ExpressionError(
                        f'only constant integral exponents are supported in {self.text!r}')
            elif type(node.op) not in _BINARY:
                raise ExpressionError(f'unsupported operator in {self.text!r}')
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARY:
                raise ExpressionError(f'unsupported operator in {self.text!r}')
            self._check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                raise ExpressionError(f'unknown function in {self.text!r}')
            if len(node.args) != 1 or node.keywords:
                raise ExpressionError(f'functions take exactly one argument in {self.text!r}')
            self._check(node.args[0])
        elif isinstance(node, ast.Name):
            if node.id != 't' and node.id not in _CONSTANTS:
                raise ExpressionError(f'unknown name {node.id!r} in {self.text!r}')
        elif isinstance(node, ast.Constant):
            if type(node.value) not in (int, float, complex):
                raise ExpressionError(f'unsupported constant in {self.text!r}')
        else:
            raise ExpressionError(f'unsupported syntax in {self.text!r}')

    def _eval(self, node, t):
        if isinstance(node, ast.BinOp):
            left = self._eval(node.left, t)
            if isinstance(node.op, ast.Pow):
                return left ** ast.literal_eval(node.right)
            return _BINARY[type(node.op)](left, self._eval(node.right, t))
        elif isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, t))
        elif isinstance(node, ast.Call):
            return _FUNCTIONS[node.func.id](self._eval(node.args[0], t))
        elif isinstance(node, ast.Name):
            if node.id == 't':
                return t
            return jet.constant(_CONSTANTS[node.id])
        return jet.constant(node.value)

    def evaluate(self, t):
        """Evaluate on the leaf tensor `t`, keeping the autograd graph."""
        return self._eval(self._body, t)

    def derivatives(self, t, order):
        """Return f(t), f'(t), ..., f⁽ᵒʳᵈᵉʳ⁾(t) stacked along the first axis."""
        x = jet.variable(t, requires_grad=order > 0)
        return jet.jet(self.evaluate(x), x, order)

    def is_real(self, t):
        """Check that the expression is real valued on the samples `t`."""
        values = self.derivatives(t, 0)[0]
        return bool(np.all(np.abs(values.imag) <= 1e-12 * (1 + np.abs(values.real))))

    def __repr__(self):
        return f'Expression({self.text!r})'
