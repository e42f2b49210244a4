"""The Laplace-transform operator and the combinatorial kernels built on it.

The operator ``L_{d;n}`` acts linearly on Laurent polynomials in a formal
color variable ``n`` by ``q^(n*a) -> q^(-a^2/d)``.  At a root of unity the
same operator picks up a divisibility rule: writing ``c = gcd(d, r)``, a
monomial ``q^(n*a)`` maps to zero unless ``c | a``, and otherwise to a power
of the smaller root ``zeta = xi^c``.

Also here: the alternating binomial kernels ``Y_c(k, b)`` and ``Y(k, a)`` and
the hypergeometric-style partial sum ``S_N``, all exact.

Worked example::

    >>> from artifact.laplace import y_c
    >>> print(y_c(0, 2, 1))      # 1 - q^b at b=2
    1 - q^2
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .cyclotomic import CycElem, QuadMonomialSum, ev
from .errors import PoleHit
from .numtheory import modinv
from .qring import (
    ONE,
    QFraction,
    QLaurent,
    pochhammer,
    q_power,
    qbinom,
)

__all__ = [
    "QuadMonomialSum",
    "laplace_formal",
    "laplace_at_root",
    "y_c",
    "y_habiro",
    "y_habiro_frac",
    "s_n_value",
]


def _linear_exponents(f):
    """Validate that f has no quadratic part and integer linear exponents."""
    out = []
    for alpha, beta, gamma, coeff in f.terms:
        if alpha != 0:
            raise ValueError(
                "quadratic exponent must be split off as a framing factor"
            )
        if beta.denominator != 1:
            raise ValueError("the operator acts on integer powers of q^n")
        out.append((int(beta), gamma, coeff))
    return out


def laplace_formal(f, d):
    """Formal transform: ``q^(n*a) -> q^(-a^2/d)``, extended linearly.

    ``d`` may be any nonzero rational; output exponent denominators divide
    four times the numerator of ``d``.
    """
    d = Fraction(d)
    if d == 0:
        raise ValueError("kernel parameter must be nonzero")
    out = QLaurent.zero()
    for a, gamma, coeff in _linear_exponents(f):
        out = out + coeff * q_power(gamma - Fraction(a * a, 1) / d)
    return out


def laplace_at_root(f, d, r):
    """Root-of-unity transform (the weighted color sum divided by gauss_sum).

    For each monomial ``q^(n*a)``: zero when ``c = gcd(d, r)`` does not
    divide ``a``; otherwise ``zeta^(-a_1^2 d_1^*)`` with ``zeta = xi^c``,
    ``a = c a_1``, ``d = c d_1`` and ``d_1 d_1^* = 1 mod r/c``, multiplied by
    the evaluated coefficient.
    """
    if not isinstance(d, int) or d == 0:
        raise ValueError("kernel parameter must be a nonzero integer")
    c = gcd(abs(d), r)
    r1 = r // c
    d1 = (d // c) % r1 if r1 > 1 else 0
    d1_star = modinv(d1, r1) if r1 > 1 else 0
    total = CycElem.zero(r)
    for a, gamma, coeff in _linear_exponents(f):
        if a % c != 0:
            continue
        a1 = a // c
        if r1 > 1:
            zeta_pow = CycElem.root_power(r1, -a1 * a1 * d1_star).embed(r)
        else:
            zeta_pow = CycElem.one(r)
        total = total + ev(coeff * q_power(gamma), r) * zeta_pow
    return total


def y_c(k, b, c):
    """Alternating binomial kernel ``Y_c(k, b)``.

    ``(-1)^k * sum_{n=-floor(k/c)}^{floor((k+1)/c)} (-1)^n
    qbinom(2k+1, k+n*c) * q^(c*b*n^2)`` — the summation range keeps the lower
    binomial index inside ``[0, 2k+1]``.
    """
    if k < 0 or c <= 0:
        raise ValueError("need k >= 0 and c > 0")
    total = QLaurent.zero()
    for n in range(-(k // c), (k + 1) // c + 1):
        term = qbinom(2 * k + 1, k + n * c) * q_power(c * b * n * n)
        total = total + (term if n % 2 == 0 else -term)
    return total if k % 2 == 0 else -total


def y_habiro_frac(k, a):
    """``sum_{j=0}^{2k+1} (-1)^j qbinom(2k+1, j) q^((j-k)^2 / a)``.

    ``a`` may be any nonzero rational, which the Euler-number evaluations of
    fibered spaces need; for positive integer ``a`` this is a Laurent
    polynomial in ``q^(1/a)``.
    """
    a = Fraction(a)
    if a == 0:
        raise ValueError("kernel parameter must be nonzero")
    total = QLaurent.zero()
    for j in range(2 * k + 2):
        term = qbinom(2 * k + 1, j) * q_power(Fraction((j - k) ** 2, 1) / a)
        total = total + (term if j % 2 == 0 else -term)
    return total


def y_habiro(k, a):
    """Kernel ``Y(k, a)`` for a positive integer ``a``."""
    if not isinstance(a, int) or a <= 0:
        raise ValueError("need a positive integer")
    return y_habiro_frac(k, a)


def s_n_value(N, c, b, r, as_root):
    """The finite tail sum ``S_N``, exactly.

    ``S_N = 1 + sum_{n>=1} (-1)^(n(c+1)) q^(N c n) (q^(-N); q)_{cn} /
    (q^(N+1); q)_{cn} * (1 + q^(cn)) * q^(c b n^2)``; terms vanish once
    ``cn > N``.  The sign factor is invisible for odd gap ``c``; it is forced
    by the exact binomial-ratio identity
    ``(-1)^n (qbinom(2k+1, k+nc) + qbinom(2k+1, k+1+nc)) / qbinom(2k+1, k)
    = (-1)^(n(c+1)) q^(Nm) (1+q^m) (q^(-N))_m / (q^(N+1))_m`` with
    ``m = nc, N = k+1``, which is what makes the kernel relation
    ``Y_c(k,b) = (-1)^k qbinom(2k+1,k) S_{k+1}`` hold.

    With ``as_root`` false, returns the exact rational function as a
    :class:`QFraction` (``r`` is ignored); with ``as_root`` true, evaluates
    numerator and denominator at ``xi_r``, raising :class:`PoleHit` when the
    denominator Pochhammer vanishes there.
    """
    if N <= 0 or c <= 0:
        raise ValueError("need N > 0 and c > 0")
    n_max = N // c
    den = pochhammer(q_power(N + 1), 1, c * n_max)
    num = den  # the leading 1 over the common denominator
    for n in range(1, n_max + 1):
        tail = pochhammer(q_power(N + 1 + c * n), 1, c * (n_max - n))
        sign = -1 if (n * (c + 1)) % 2 else 1
        term = (
            q_power(N * c * n)
            * pochhammer(q_power(-N), 1, c * n)
            * (ONE + q_power(c * n))
            * q_power(c * b * n * n)
            * tail
            * sign
        )
        num = num + term
    frac = QFraction(num, (den,)) if n_max > 0 else QFraction(ONE)
    if not as_root:
        return frac
    den_val = ev(frac.den, r)
    if den_val.is_zero():
        raise PoleHit(
            f"S_N denominator vanishes at order {r}; parameters outside range"
        )
    return ev(frac.num, r) * den_val.inv()
