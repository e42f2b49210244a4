"""Integer and rational number-theoretic helpers.

Contents: the Jacobi symbol, Dedekind sums via the definitional sawtooth sum,
sign/inverse utilities, and expansions of a rational number into the
negative-reciprocal continued fraction shape ``x = -1/(m_n - 1/(... - 1/m_1))``
used to convert rational surgery coefficients into integer chains.

Worked example::

    >>> from fractions import Fraction
    >>> from artifact.numtheory import neg_continued_fraction, cf_value
    >>> neg_continued_fraction(Fraction(2, 3))
    [2, -1]
    >>> cf_value([2, -1])
    Fraction(2, 3)
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import NonCoprime


def sn(x):
    """Sign of a number: -1, 0 or 1."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def modinv(a, m):
    """Inverse of ``a`` modulo ``m``; raises ValueError if not invertible."""
    try:
        return pow(a, -1, m)
    except ValueError as exc:
        raise ValueError(f"{a} is not invertible modulo {m}") from exc


def jacobi(d, r):
    """Jacobi symbol ``(d/r)`` for odd positive ``r``; 0 when gcd(d, r) > 1."""
    if r <= 0 or r % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive lower argument")
    d %= r
    result = 1
    while d:
        while d % 2 == 0:
            d //= 2
            if r % 8 in (3, 5):
                result = -result
        d, r = r, d
        if d % 4 == 3 and r % 4 == 3:
            result = -result
        d %= r
    return result if r == 1 else 0


def _sawtooth(x):
    """((x)) = 0 at integers, else x - floor(x) - 1/2."""
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(0)
    return x - math.floor(x) - Fraction(1, 2)


def dedekind_sum(b, a):
    """Dedekind sum ``s(b, a)``, odd in both arguments.

    For ``a > 0`` this is the definitional sawtooth sum
    ``sum_{i=1}^{a-1} ((i/a)) ((i*b/a))``; for ``a < 0`` it extends by
    oddness, ``s(b, -a) = -s(b, a)``, which is the convention under which
    the closed form ``3 s(1, a) = 1/(2a) + (a - 3 sn(a))/4`` holds for
    negative ``a`` as well.
    """
    if a == 0:
        raise ValueError("modulus of a Dedekind sum must be nonzero")
    if math.gcd(a, b) != 1:
        raise NonCoprime(f"dedekind_sum needs gcd({b}, {a}) = 1")
    n = abs(a)
    total = Fraction(0)
    for i in range(1, n):
        total += _sawtooth(Fraction(i, n)) * _sawtooth(Fraction(i * b, n))
    return total if a > 0 else -total


def _continued_fraction(x, pick):
    x = Fraction(x)
    if x == 0:
        raise ValueError("cannot expand zero")
    t = Fraction(-1, 1) / x
    out = []
    while True:
        if t.denominator == 1:
            out.append(int(t))
            break
        m = pick(t)
        out.append(m)
        t = 1 / (m - t)
    out.reverse()
    return out


def neg_continued_fraction(x):
    """Integers ``[m_1, ..., m_n]`` with ``x = -1/(m_n - 1/(... - 1/m_1))``.

    Uses ceiling rounding at each step, so the intermediate denominators
    strictly decrease and the expansion terminates.
    """
    return _continued_fraction(x, math.ceil)


def floor_continued_fraction(x):
    """Same shape as :func:`neg_continued_fraction` but with floor rounding.

    Produces a genuinely different integer chain for most inputs, which makes
    it useful for presentation-independence checks.
    """
    return _continued_fraction(x, math.floor)


def cf_value(ms):
    """Back-substitute a chain ``[m_1, ..., m_n]`` into its rational value."""
    if not ms:
        raise ValueError("empty chain")
    inner = Fraction(ms[0])
    for m in ms[1:]:
        inner = Fraction(m) - 1 / inner
    return Fraction(-1, 1) / inner
