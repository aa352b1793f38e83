"""Polygamma functions for GAMMA/LGAMMA derivative rules.

Upward recurrence to x >= 6 + n, then the Bernoulli asymptotic series.
"""

from __future__ import annotations

import math
from fractions import Fraction

# B_2, B_4, ..., B_20
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330),
]
_B = [float(b) for b in _BERNOULLI]


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def polygamma(n: int, x: float) -> float:
    """n-th derivative of the digamma function at real x."""
    if n < 0:
        raise ValueError("polygamma order must be >= 0")
    if _is_nonpositive_integer(x):
        raise ValueError(f"polygamma pole at {x}")
    x = float(x)
    sign = -1.0 if n % 2 == 0 else 1.0  # (-1)^(n+1)
    nfact = math.factorial(n)
    shift = 0.0
    threshold = 6.0 + n
    while x < threshold:
        # psi^(n)(x) = psi^(n)(x+1) - (-1)^n n! / x^(n+1)
        shift -= (-sign) * nfact / x ** (n + 1)
        x += 1.0
    if n == 0:
        s = math.log(x) - 0.5 / x
        x2 = x * x
        p = x2
        for k, b in enumerate(_B, start=1):
            s -= b / (2 * k * p)
            p *= x2
        return s + shift
    s = math.factorial(n - 1) / x ** n + nfact / (2.0 * x ** (n + 1))
    p = x ** (n + 2)
    x2 = x * x
    for k, b in enumerate(_B, start=1):
        s += b * math.factorial(2 * k + n - 1) / (math.factorial(2 * k) * p)
        p *= x2
    return sign * s + shift


def digamma(x: float) -> float:
    return polygamma(0, x)
