"""Clebsch-Gordan coefficients in the Condon-Shortley phase convention.

Quantum numbers may be integers, half-integers (as floats like 1.5) or
Fractions; internally everything is handled as doubled integers so no
floating comparison is ever needed.

Two evaluation paths:

* closed-form tables for j2 in {0, 1/2, 1}, stable for arbitrarily large j1
  (plain products of numbers of order j1, no factorials);
* the exact Racah sum with big-integer arithmetic for everything else.

Both paths are cross-checked in the test suite against an independent
oracle that diagonalizes J^2 in the product basis.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidQuantumNumberError

__all__ = ["clebsch_gordan"]


def _twice(x, name: str) -> int:
    """Return 2*x as an exact int, rejecting non-half-integers."""
    if isinstance(x, Fraction):
        t = 2 * x
        if t.denominator != 1:
            raise InvalidQuantumNumberError(f"{name}={x} is not a half-integer")
        return int(t)
    t = 2.0 * float(x)
    r = round(t)
    if abs(t - r) > 1e-9:
        raise InvalidQuantumNumberError(f"{name}={x} is not a half-integer")
    return int(r)


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


def _racah_exact(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    """Racah's closed sum evaluated in exact integer arithmetic.

    All arguments are doubled; every factorial argument below is an exact
    integer because the parity constraints have already been checked.
    """
    # Triangle deltas, halved back to plain integers.
    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tj2 + tJ) // 2
    c = (-tj1 + tj2 + tJ) // 2
    d = (tj1 + tj2 + tJ) // 2 + 1

    k_min = max(0, (tj2 - tJ - tm1) // 2, (tj1 - tJ + tm2) // 2)
    k_max = min(a, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    if k_min > k_max:
        return 0.0

    s = Fraction(0)
    for k in range(k_min, k_max + 1):
        denom = (
            _fact(k)
            * _fact(a - k)
            * _fact((tj1 - tm1) // 2 - k)
            * _fact((tj2 + tm2) // 2 - k)
            * _fact((tJ - tj2 + tm1) // 2 + k)
            * _fact((tJ - tj1 - tm2) // 2 + k)
        )
        s += Fraction(-1 if k % 2 else 1, denom)
    if s == 0:
        return 0.0

    norm = Fraction(
        (tJ + 1) * _fact(a) * _fact(b) * _fact(c), _fact(d)
    ) * Fraction(
        _fact((tJ + tM) // 2)
        * _fact((tJ - tM) // 2)
        * _fact((tj1 + tm1) // 2)
        * _fact((tj1 - tm1) // 2)
        * _fact((tj2 + tm2) // 2)
        * _fact((tj2 - tm2) // 2),
        1,
    )
    csq = s * s * norm
    sign = 1.0 if s > 0 else -1.0
    return sign * math.sqrt(float(csq))


def _table_spin_half(tj1: int, tm1: int, tm2: int, tJ: int, tM: int) -> float:
    """<j1 m1 1/2 m2 | J M> for J = j1 +- 1/2."""
    denom = tj1 + 1  # 2*j1 + 1
    if tJ == tj1 + 1:
        if tm2 > 0:
            return math.sqrt((tj1 + tM + 1) / (2 * denom))
        return math.sqrt((tj1 - tM + 1) / (2 * denom))
    if tJ == tj1 - 1:
        if tm2 > 0:
            return -math.sqrt((tj1 - tM + 1) / (2 * denom))
        return math.sqrt((tj1 + tM + 1) / (2 * denom))
    return 0.0


def _table_spin_one(tj1: int, tm1: int, tm2: int, tJ: int, tM: int) -> float:
    """<j1 m1 1 m2 | J M> for J = j1, j1 +- 1; arguments doubled."""
    j = tj1 / 2.0
    m = tM / 2.0
    if tJ == tj1 + 2:
        if tm2 == 2:
            return math.sqrt((j + m) * (j + m + 1) / ((2 * j + 1) * (2 * j + 2)))
        if tm2 == 0:
            return math.sqrt((j - m + 1) * (j + m + 1) / ((2 * j + 1) * (j + 1)))
        return math.sqrt((j - m) * (j - m + 1) / ((2 * j + 1) * (2 * j + 2)))
    if tJ == tj1:
        if tm2 == 2:
            return -math.sqrt((j + m) * (j - m + 1) / (2 * j * (j + 1)))
        if tm2 == 0:
            return m / math.sqrt(j * (j + 1))
        return math.sqrt((j - m) * (j + m + 1) / (2 * j * (j + 1)))
    if tJ == tj1 - 2:
        if tm2 == 2:
            return math.sqrt((j - m) * (j - m + 1) / (2 * j * (2 * j + 1)))
        if tm2 == 0:
            return -math.sqrt((j - m) * (j + m) / (j * (2 * j + 1)))
        return math.sqrt((j + m) * (j + m + 1) / (2 * j * (2 * j + 1)))
    return 0.0


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """Return <j1 m1 j2 m2 | J M> (Condon-Shortley convention).

    Zero when M != m1 + m2 or when (j1, j2, J) violates the triangle rule;
    raises InvalidQuantumNumberError for malformed quantum numbers.
    """
    tj1, tm1 = _twice(j1, "j1"), _twice(m1, "m1")
    tj2, tm2 = _twice(j2, "j2"), _twice(m2, "m2")
    tJ, tM = _twice(J, "J"), _twice(M, "M")

    for tj, tm, nm in ((tj1, tm1, "j1"), (tj2, tm2, "j2"), (tJ, tM, "J")):
        if tj < 0:
            raise InvalidQuantumNumberError(f"{nm} is negative")
        if abs(tm) > tj:
            raise InvalidQuantumNumberError(f"|m| > j for {nm}")
        if (tj - tm) % 2 != 0:
            raise InvalidQuantumNumberError(f"m not compatible with j for {nm}")

    if tM != tm1 + tm2:
        return 0.0
    if tJ > tj1 + tj2 or tJ < abs(tj1 - tj2):
        return 0.0
    if (tj1 + tj2 + tJ) % 2 != 0:
        return 0.0

    if tj2 == 0:
        return 1.0
    if tj1 == 0:
        return 1.0
    if tj2 <= 2 and tj1 >= tj2:
        if tj2 == 1:
            return _table_spin_half(tj1, tm1, tm2, tJ, tM)
        return _table_spin_one(tj1, tm1, tm2, tJ, tM)
    if tj1 <= 2 and tj2 > tj1:
        # reorder: <j1 m1 j2 m2|JM> = (-1)^(j1+j2-J) <j2 m2 j1 m1|JM>
        sign = -1.0 if ((tj1 + tj2 - tJ) // 2) % 2 else 1.0
        return sign * clebsch_gordan(j2, m2, j1, m1, J, M)
    return _racah_exact(tj1, tm1, tj2, tm2, tJ, tM)
