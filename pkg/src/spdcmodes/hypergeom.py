"""Terminating multivariable hypergeometric series (Lauricella F_A, Appell F2)."""

from __future__ import annotations

import itertools
import math

from .errors import DomainError
from .modes import pochhammer


def _nonpositive_int(b) -> int:
    if not (float(b) == round(float(b)) and b <= 0):
        raise DomainError(f"upper parameter must be a non-positive integer for a terminating series, got {b!r}")
    return int(-round(float(b)))


def lauricella_fa(a: float, bs, cs, xs) -> float:
    """Lauricella ``F_A^(n)(a; b_1..b_n; c_1..c_n; x_1..x_n)`` for non-positive integer ``b_j``.

    The series truncates at ``k_j <= -b_j``; the finite sum is accumulated with
    :func:`math.fsum` so the result is correctly rounded with respect to the
    individual terms.
    """
    if not (len(bs) == len(cs) == len(xs)):
        raise DomainError("bs, cs and xs must have equal length")
    orders = [_nonpositive_int(b) for b in bs]
    per_var = []
    for b, c, x, n in zip(bs, cs, xs, orders):
        factors = []
        for k in range(n + 1):
            den = pochhammer(c, k) * math.factorial(k)
            if den == 0.0:
                raise DomainError(f"lower parameter {c!r} is a pole of the series")
            factors.append(pochhammer(b, k) * x**k / den)
        per_var.append(factors)
    rising_a = [pochhammer(a, k) for k in range(sum(orders) + 1)]
    terms = []
    for ks in itertools.product(*(range(n + 1) for n in orders)):
        t = rising_a[sum(ks)]
        for factors, k in zip(per_var, ks):
            t *= factors[k]
        terms.append(t)
    return math.fsum(terms)


def lauricella_fa3(a, b1, b2, b3, c1, c2, c3, x1, x2, x3) -> float:
    return lauricella_fa(a, (b1, b2, b3), (c1, c2, c3), (x1, x2, x3))


def appell_f2(a, b1, b2, c1, c2, x, y) -> float:
    """Second Appell function, terminating case."""
    return lauricella_fa(a, (b1, b2), (c1, c2), (x, y))
