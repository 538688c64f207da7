"""Derivative jets through torch autograd.

A jet here is the stack f(t), f'(t), ..., f⁽ⁿ⁾(t) of a function at one or
many real parameter values, stored along the first axis of a numpy array
whose other axes follow the shape of t.  Functions are evaluated on a
float64 leaf tensor and differentiated with nested `autograd.grad` calls;
complex valued functions are differentiated through their real and
imaginary parts.

>>> t = variable(0.5)
>>> jet(t**3 + 2 * t, t, 3).real.tolist()
[1.125, 2.75, 3.0, 6.0]
>>> h = variable(0.0)
>>> np.allclose(jet(taylor([1, 2j, -4], h), h, 2), [1, 2j, -4])
True

Copyright (C) 2026  holocircles contributors
SPDX-License-Identifier: GPL-3.0-or-later
"""

import math

import numpy as np
import torch

from torch import autograd


def variable(t, requires_grad=True):
    """Leaf tensor for the real parameter `t`."""
    return torch.tensor(np.asarray(t, dtype=float), dtype=torch.float64,
                        requires_grad=requires_grad)


def constant(value):
    dtype = torch.complex128 if isinstance(value, complex) else torch.float64
    return torch.tensor(value, dtype=dtype)


def derivative(y, x):
    """Elementwise dy/dx of a tensor `y` computed from the leaf `x`."""
    if not y.requires_grad:
        return torch.zeros_like(y)
    parts = (y.real, y.imag) if y.is_complex() else (y,)
    grads = []
    for part in parts:
        g, = autograd.grad(part, x, grad_outputs=torch.ones_like(part),
                           create_graph=True, allow_unused=True)
        grads.append(torch.zeros_like(x) if g is None else g)
    return torch.complex(*grads) if y.is_complex() else grads[0]


def jet(y, x, order):
    """Stack y, y', ..., y⁽ᵒʳᵈᵉʳ⁾ as a complex numpy array shaped like `x`."""
    levels = [y + torch.zeros_like(x)]
    for _ in range(order):
        levels.append(derivative(levels[-1], x))
    shape = tuple(x.shape)
    return np.stack([np.broadcast_to(level.detach().resolve_conj().numpy().astype(complex), shape)
                     for level in levels])


def taylor(stack, h):
    """Taylor polynomial Σ f⁽ᵏ⁾ hᵏ/k! of the derivative `stack`, as a tensor in `h`."""
    out = torch.zeros_like(h, dtype=torch.complex128)
    for k, coefficient in enumerate(np.asarray(stack, dtype=complex)):
        out = out + torch.from_numpy(np.ascontiguousarray(coefficient)) * h**k / math.factorial(k)
    return out
