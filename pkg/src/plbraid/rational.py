"""Exact rational scalars.

All decision-making arithmetic in this package runs over arbitrary-precision
rationals; no floating point ever enters a predicate.  gmpy2.mpq is used when
available (it is much faster), with fractions.Fraction as a fallback.
"""

from __future__ import annotations

import random

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rat

ZERO = Rat(0)
ONE = Rat(1)


def rat(value, denom=None) -> Rat:
    """Coerce to an exact rational.  Floats are rejected on purpose."""
    if isinstance(value, float):
        raise TypeError("refusing to build an exact rational from a float")
    if denom is not None:
        if isinstance(denom, float):
            raise TypeError("refusing to build an exact rational from a float")
        if denom == 0:
            raise ZeroDivisionError("rational with zero denominator")
        return Rat(value, denom)
    return Rat(value)


def parse_rat(token: str) -> Rat:
    """Parse "p/q" or "p" with an arbitrary-precision integer p and q > 0."""
    token = token.strip()
    if "/" in token:
        num, _, den = token.partition("/")
        d = int(den)
        if d == 0:
            raise ValueError("rational token %r has zero denominator" % token)
        return Rat(int(num), d)
    return Rat(int(token))


def rat_str(q) -> str:
    """Canonical "p/q" token (always with an explicit denominator)."""
    q = Rat(q)
    return "%d/%d" % (q.numerator, q.denominator)


def sign(q) -> int:
    if q > 0:
        return 1
    if q < 0:
        return -1
    return 0


def random_rat(rng: random.Random, lo=-1, hi=1, denom_bound: int = 64) -> Rat:
    """A random rational in [lo, hi] with denominator at most denom_bound."""
    lo, hi = Rat(lo), Rat(hi)
    den = rng.randint(1, denom_bound)
    num = rng.randint(0, den)
    return lo + (hi - lo) * Rat(num, den)


def snap_rat(q, denom_bound: int):
    """Best rational approximation to q with denominator <= denom_bound.

    Standard continued-fraction convergent/semiconvergent walk; exact.
    """
    q = Rat(q)
    if q.denominator <= denom_bound:
        return q
    # Continued fraction expansion with convergents p/q.
    p0, q0, p1, q1 = 0, 1, 1, 0
    n, d = q.numerator, q.denominator
    while True:
        a = n // d
        p2, q2 = a * p1 + p0, a * q1 + q0
        if q2 > denom_bound:
            break
        p0, q0, p1, q1 = p1, q1, p2, q2
        n, d = d, n - a * d
        if d == 0:
            break
    if d == 0:
        return Rat(p1, q1)
    # Best semiconvergent with denominator within the bound.
    k = (denom_bound - q0) // q1
    cand = [Rat(p1, q1)]
    if k > 0:
        cand.append(Rat(k * p1 + p0, k * q1 + q0))
    return min(cand, key=lambda c: abs(c - q))
