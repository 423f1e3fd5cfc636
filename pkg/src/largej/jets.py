"""Truncated derivative jets for matrix-valued functions of one variable.

A Jet carries a value and its first `order` derivatives; products follow
Leibniz with binomial weights, inverses and square roots are computed by
recursion.  The channel reduction propagates order-3 jets from the radial
profiles down to the 2x2 channel functions, so first derivatives of the
final channel entries are exact to rounding (no finite differences inside
the reduction).
"""

from __future__ import annotations

from math import comb
from typing import Sequence

import numpy as np

__all__ = ["Jet", "jet_of_inverse_r", "jet_const", "jet_var"]


class Jet:
    """Value plus derivatives [f, f', f'', ...] of a scalar or ndarray."""

    __slots__ = ("c",)

    def __init__(self, comps: Sequence):
        self.c = list(comps)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def value(self):
        return self.c[0]

    def d(self, k: int = 1) -> "Jet":
        """Derivative jet (drops k orders of validity)."""
        if k > self.order:
            raise ValueError("jet order exhausted")
        return Jet(self.c[k:])

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: order + 1])

    def __add__(self, other):
        if not isinstance(other, Jet):
            out = [c for c in self.c]
            out[0] = out[0] + other
            return Jet(out)
        n = min(self.order, other.order)
        return Jet([self.c[k] + other.c[k] for k in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return Jet([-c for c in self.c])

    def __sub__(self, other):
        if isinstance(other, Jet):
            return self + (-other)
        out = [c for c in self.c]
        out[0] = out[0] - other
        return Jet(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Scalar multiple (other is a plain number or constant array)."""
        if isinstance(other, Jet):
            n = min(self.order, other.order)
            return Jet(
                [
                    sum(comb(k, i) * self.c[i] * other.c[k - i] for i in range(k + 1))
                    for k in range(n + 1)
                ]
            )
        return Jet([c * other for c in self.c])

    __rmul__ = __mul__

    def __matmul__(self, other: "Jet") -> "Jet":
        n = min(self.order, other.order)
        return Jet(
            [
                sum(comb(k, i) * (self.c[i] @ other.c[k - i]) for i in range(k + 1))
                for k in range(n + 1)
            ]
        )

    def matinv(self) -> "Jet":
        """Jet of the matrix inverse."""
        a0inv = np.linalg.inv(self.c[0])
        out = [a0inv]
        for k in range(1, self.order + 1):
            acc = sum(comb(k, i) * (self.c[i] @ out[k - i]) for i in range(1, k + 1))
            out.append(-a0inv @ acc)
        return Jet(out)

    def sqrt_elementwise(self) -> "Jet":
        """Jet of elementwise sqrt (for diagonal vectors), entries must be > 0."""
        s0 = np.sqrt(self.c[0])
        out = [s0]
        for k in range(1, self.order + 1):
            acc = sum(comb(k, i) * out[i] * out[k - i] for i in range(1, k))
            out.append((self.c[k] - acc) / (2.0 * s0))
        return Jet(out)

    def reciprocal_elementwise(self) -> "Jet":
        """Jet of elementwise 1/x."""
        r0 = 1.0 / self.c[0]
        out = [r0]
        for k in range(1, self.order + 1):
            acc = sum(comb(k, i) * self.c[i] * out[k - i] for i in range(1, k + 1))
            out.append(-r0 * acc)
        return Jet(out)

    def transpose(self) -> "Jet":
        return Jet([c.T for c in self.c])

    def __getitem__(self, idx) -> "Jet":
        return Jet([c[idx] for c in self.c])


def jet_const(value, order: int = 3) -> Jet:
    zero = np.zeros_like(value) if isinstance(value, np.ndarray) else 0.0
    return Jet([value] + [zero] * order)


def jet_var(r: float, order: int = 3) -> Jet:
    """Jet of the identity function f(r) = r."""
    comps = [r, 1.0] + [0.0] * max(0, order - 1)
    return Jet(comps[: order + 1])


def jet_of_inverse_r(r: float, order: int = 3) -> Jet:
    """Jet of 1/r: derivatives (-1)^k k! / r^(k+1)."""
    comps = []
    fact = 1.0
    for k in range(order + 1):
        if k:
            fact *= k
        comps.append(((-1.0) ** k) * fact / r ** (k + 1))
    return Jet(comps)
