"""Exact Laurent polynomials in fractional powers of ``q``.

The base object is :class:`QLaurent`, a sparse Laurent polynomial in ``v``
where ``v = q^(1/D)`` for a per-object positive integer ``D`` (the *scale*).
Exponents are integers relative to the scale, so ``q^(3/2)`` is stored as
``v^3`` at scale 2.  Coefficients are exact (``int`` or ``Fraction``).

On top of it live the standard balanced q-objects:

* ``qint(n)``   -- the balanced q-integer  q^(n/2) - q^(-n/2)
* ``qnum(n)``   -- the quantum number, qint(n)/qint(1)
* ``qfact(n)``  -- the balanced q-factorial, a product of qint's
* ``qbinom``    -- the balanced Gaussian binomial, a Laurent polynomial for
  every integer ``n`` and nonnegative ``k``
* ``pochhammer`` -- finite q-Pochhammer products with arbitrary rational step
* ``div_exact`` -- exact division, raising :class:`NonDivisible` otherwise

:class:`QFraction` is a thin fraction field wrapper that keeps its denominator
in *factored* form, which is what the truncated expansions downstream need:
their denominators are products of small cyclotomic-like factors that must be
evaluated factor by factor at roots of unity.

Worked example::

    >>> from artifact.qring import qint, qbinom, div_exact
    >>> qbinom(4, 2).to_text()
    '1; -2:1, -1:1, 0:2, 1:1, 2:1'
    >>> div_exact(qint(4), qint(2)).to_text()
    '1; -1:1, 1:1'
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import gcd

from ._backend import laurent_mul
from .errors import NonDivisible

Coeff = "int | Fraction"


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def _lcm(a, b):
    return a * b // gcd(a, b)


class QLaurent:
    """Sparse exact Laurent polynomial in ``q^(1/scale)``."""

    __slots__ = ("_scale", "_terms", "_minimal")

    def __init__(self, terms=None, scale=1, _trusted=False):
        if scale <= 0:
            raise ValueError("scale must be a positive integer")
        if terms is None:
            terms = {}
        if _trusted:
            self._terms = terms
        else:
            clean = {}
            for e, c in terms.items():
                c = _norm_coeff(c)
                if c:
                    clean[int(e)] = c
            self._terms = clean
        self._scale = scale
        self._minimal = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def const(cls, c):
        c = _norm_coeff(c)
        return cls({0: c} if c else {}, 1, _trusted=True)

    @classmethod
    def from_frac_terms(cls, items):
        """Build from an iterable of ``(exponent, coeff)`` with Fraction exponents."""
        scale = 1
        pairs = []
        for e, c in items:
            e = Fraction(e)
            pairs.append((e, c))
            scale = _lcm(scale, e.denominator)
        terms = {}
        for e, c in pairs:
            k = int(e * scale)
            prev = terms.get(k)
            terms[k] = c if prev is None else prev + c
        return cls(terms, scale)

    @classmethod
    def zero(cls):
        return ZERO

    @classmethod
    def one(cls):
        return ONE

    # -- basic views ---------------------------------------------------------

    @property
    def scale(self):
        return self._scale

    def terms_dict(self):
        return dict(self._terms)

    def is_zero(self):
        return not self._terms

    def is_monomial(self):
        return len(self._terms) == 1

    def monomial(self):
        """Return ``(coefficient, exponent)`` with a Fraction exponent."""
        if len(self._terms) != 1:
            raise ValueError("not a monomial")
        ((e, c),) = self._terms.items()
        return c, Fraction(e, self._scale)

    def is_constant(self):
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_value(self):
        if not self._terms:
            return 0
        if len(self._terms) == 1 and 0 in self._terms:
            return self._terms[0]
        raise ValueError("not a constant")

    def coeff_of(self, exponent):
        """Coefficient of ``q^exponent`` (exponent may be a Fraction)."""
        e = Fraction(exponent) * self._scale
        if e.denominator != 1:
            return 0
        return self._terms.get(int(e), 0)

    def exponent_range(self):
        """(lowest, highest) exponent of ``q`` as Fractions; None for zero."""
        if not self._terms:
            return None
        lo = min(self._terms)
        hi = max(self._terms)
        return Fraction(lo, self._scale), Fraction(hi, self._scale)

    def frac_items(self):
        """Iterate ``(Fraction exponent, coeff)`` pairs, unordered."""
        s = self._scale
        for e, c in self._terms.items():
            yield Fraction(e, s), c

    # -- normalization -------------------------------------------------------

    def _minimized(self):
        """Cached (scale, sorted terms tuple) with the scale made minimal."""
        m = self._minimal
        if m is not None:
            return m
        if not self._terms:
            m = (1, ())
        else:
            g = self._scale
            for e in self._terms:
                g = gcd(g, abs(e))
                if g == 1:
                    break
            if g > 1:
                scale = self._scale // g
                items = tuple(
                    sorted((e // g, _norm_coeff(c)) for e, c in self._terms.items())
                )
            else:
                scale = self._scale
                items = tuple(
                    sorted((e, _norm_coeff(c)) for e, c in self._terms.items())
                )
            m = (scale, items)
        self._minimal = m
        return m

    def min_scale(self):
        """Equivalent polynomial with the smallest possible scale."""
        scale, items = self._minimized()
        return QLaurent(dict(items), scale, _trusted=True)

    def _rescaled_terms(self, new_scale):
        f = new_scale // self._scale
        if f == 1:
            return self._terms
        return {e * f: c for e, c in self._terms.items()}

    @staticmethod
    def _aligned(f, g):
        s = _lcm(f._scale, g._scale)
        return s, f._rescaled_terms(s), g._rescaled_terms(s)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, QLaurent):
            return x
        if isinstance(x, (int, Fraction)):
            return QLaurent.const(x)
        return NotImplemented

    def __add__(self, other):
        other = QLaurent._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        s, a, b = QLaurent._aligned(self, other)
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for e, c in b.items():
            n = out.get(e, 0) + c
            if n:
                out[e] = n
            else:
                out.pop(e, None)
        return QLaurent(out, s, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent(
            {e: -c for e, c in self._terms.items()}, self._scale, _trusted=True
        )

    def __sub__(self, other):
        other = QLaurent._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = QLaurent._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = QLaurent._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._terms or not other._terms:
            return ZERO
        s, a, b = QLaurent._aligned(self, other)
        return QLaurent(laurent_mul(a, b), s, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            c, e = self.monomial()  # raises for non-monomials
            if isinstance(c, int):
                inv = Fraction(1, c)
            else:
                inv = 1 / c
            base = q_mono(-e, inv)
            return base ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        other = QLaurent._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._minimized() == other._minimized()

    def __hash__(self):
        return hash(self._minimized())

    # -- substitutions -------------------------------------------------------

    def substitute_power(self, s):
        """Apply the ring map ``q -> q^s`` for a nonzero rational ``s``."""
        s = Fraction(s)
        if s == 0:
            raise ValueError("substitution power must be nonzero")
        return QLaurent.from_frac_terms(
            (Fraction(e, self._scale) * s, c) for e, c in self._terms.items()
        )

    def evaluate_root(self, value):
        """Evaluate with ``q^(1/scale) = value`` (exact rational arithmetic)."""
        total = Fraction(0)
        for e, c in self._terms.items():
            total += Fraction(c) * Fraction(value) ** e
        return total

    # -- serialization -------------------------------------------------------

    def to_text(self):
        scale, items = self._minimized()
        body = ", ".join(f"{e}:{c}" for e, c in items)
        return f"{scale}; {body}" if body else f"{scale};"

    @classmethod
    def from_text(cls, text):
        head, _, body = text.partition(";")
        scale = int(head.strip())
        terms = {}
        body = body.strip()
        if body:
            for chunk in body.split(","):
                e, _, c = chunk.partition(":")
                terms[int(e.strip())] = _parse_coeff(c.strip())
        return cls(terms, scale)

    def to_json(self):
        scale, items = self._minimized()
        return {"denom_scale": scale, "terms": [[e, str(c)] for e, c in items]}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        terms = {int(e): _parse_coeff(str(c)) for e, c in data["terms"]}
        return cls(terms, int(data["denom_scale"]))

    def __repr__(self):
        return f"QLaurent({self.to_text()!r})"

    def __str__(self):
        scale, items = self._minimized()
        if not items:
            return "0"
        parts = []
        for e, c in items:
            ex = Fraction(e, scale)
            if ex == 0:
                parts.append(f"{c}")
            else:
                p = "q" if ex == 1 else f"q^{ex}"
                if c == 1:
                    parts.append(p)
                elif c == -1:
                    parts.append(f"-{p}")
                else:
                    parts.append(f"{c}*{p}")
        return " + ".join(parts).replace("+ -", "- ")


def _parse_coeff(text):
    if "/" in text:
        return Fraction(text)
    return int(text)


ZERO = QLaurent({}, 1, _trusted=True)
ONE = QLaurent({0: 1}, 1, _trusted=True)


# ---------------------------------------------------------------------------
# convenience constructors
# ---------------------------------------------------------------------------


def q_power(e):
    """The monomial ``q^e`` for an integer or Fraction exponent."""
    e = Fraction(e)
    return QLaurent({e.numerator: 1}, e.denominator, _trusted=True)


def q_mono(e, c):
    """The monomial ``c * q^e``."""
    c = _norm_coeff(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
    if not c:
        return ZERO
    e = Fraction(e)
    return QLaurent({e.numerator: c}, e.denominator, _trusted=True)


# ---------------------------------------------------------------------------
# balanced q-combinatorics
# ---------------------------------------------------------------------------

_qint_cache = {}


def qint(n):
    """The balanced q-integer ``q^(n/2) - q^(-n/2)``."""
    f = _qint_cache.get(n)
    if f is None:
        if n == 0:
            f = ZERO
        else:
            f = QLaurent({n: 1, -n: -1}, 2)
        _qint_cache[n] = f
    return f


def qnum(n):
    """The quantum number ``[n] = qint(n)/qint(1)``, computed directly."""
    if n < 0:
        return -qnum(-n)
    return QLaurent({n - 1 - 2 * i: 1 for i in range(n)}, 2)


_qfact_cache = {0: ONE}


def qfact(n):
    """Balanced q-factorial ``qint(1) * qint(2) * ... * qint(n)``."""
    if n < 0:
        raise ValueError("q-factorial needs n >= 0")
    f = _qfact_cache.get(n)
    if f is None:
        f = qfact(n - 1) * qint(n)
        _qfact_cache[n] = f
    return f


_qbinom_cache = {}


def qbinom(n, k):
    """Balanced Gaussian binomial, defined for every integer ``n``.

    For ``0 <= n < k`` it vanishes; for negative ``n`` it follows the usual
    reflection ``qbinom(-m, k) = (-1)^k qbinom(m + k - 1, k)`` automatically,
    because it is computed as the exact product
    ``prod_{i=1..k} qint(n - k + i) / qint(i)``.
    """
    if k < 0:
        return ZERO
    key = (n, k)
    f = _qbinom_cache.get(key)
    if f is None:
        if k == 0:
            f = ONE
        else:
            f = div_exact(qbinom(n, k - 1) * qint(n - k + 1), qint(k))
        _qbinom_cache[key] = f
    return f


def gauss_binom(m, j):
    """One-sided Gaussian binomial in ``q`` (no negative powers for m >= j >= 0)."""
    return qbinom(m, j) * q_power(Fraction(j * (m - j), 2))


def pochhammer(first, step_exponent, m):
    """``prod_{i=0..m-1} (1 - first * q^(i*step_exponent))``.

    ``first`` must be a monomial (or a constant); ``step_exponent`` may be any
    rational number.  ``m`` must be a nonnegative integer.
    """
    if m < 0:
        raise ValueError("pochhammer length must be >= 0")
    first = QLaurent._coerce(first)
    if first is NotImplemented:
        raise TypeError("first must be a QLaurent monomial or a number")
    if not first.is_zero() and not first.is_monomial():
        raise ValueError("pochhammer start must be a monomial")
    step = Fraction(step_exponent)
    out = ONE
    for i in range(m):
        out = out * (ONE - first * q_power(step * i))
        if out.is_zero():
            break
    return out


def curly_fact_ratio(k):
    """``qint(k+1) * qint(k+2) * ... * qint(2k+1)`` (a factorial quotient)."""
    out = ONE
    for i in range(k + 1, 2 * k + 2):
        out = out * qint(i)
    return out


def habiro_divisor(k):
    """``curly_fact_ratio(k) / qint(1)`` — exact for every ``k >= 0``."""
    if k == 0:
        return ONE
    return div_exact(curly_fact_ratio(k), qint(1))


def substitute_power(f, s):
    """Module-level alias for :meth:`QLaurent.substitute_power`."""
    return QLaurent._coerce(f).substitute_power(s)


# ---------------------------------------------------------------------------
# exact division
# ---------------------------------------------------------------------------


def div_exact(f, g):
    """Exact quotient ``f / g``; raises :class:`NonDivisible` otherwise."""
    f = QLaurent._coerce(f)
    g = QLaurent._coerce(g)
    if g.is_zero():
        raise NonDivisible("division by the zero polynomial")
    if f.is_zero():
        return ZERO
    if g.is_monomial():
        c, e = g.monomial()
        inv = Fraction(1, c) if isinstance(c, int) else 1 / c
        return f * q_mono(-e, inv)
    s, a, b = QLaurent._aligned(f, g)
    lo_a, hi_a = min(a), max(a)
    lo_b, hi_b = min(b), max(b)
    da = hi_a - lo_a
    db = hi_b - lo_b
    if da < db:
        raise NonDivisible("degree of divisor exceeds degree of dividend")
    num = [Fraction(a.get(lo_a + i, 0)) for i in range(da + 1)]
    den = [Fraction(b.get(lo_b + i, 0)) for i in range(db + 1)]
    lead = den[db]
    qlen = da - db + 1
    quot = [Fraction(0)] * qlen
    for i in range(da, db - 1, -1):
        c = num[i]
        if c:
            c = c / lead
            quot[i - db] = c
            for j in range(db + 1):
                num[i - db + j] -= c * den[j]
    if any(num[:db]):
        raise NonDivisible("nonzero remainder")
    terms = {}
    off = lo_a - lo_b
    for i, c in enumerate(quot):
        if c:
            terms[off + i] = _norm_coeff(c)
    return QLaurent(terms, s)


# ---------------------------------------------------------------------------
# fraction field with factored denominators
# ---------------------------------------------------------------------------


class QFraction:
    """A quotient ``num / prod(den_factors)`` of exact Laurent polynomials.

    The denominator is kept factored because downstream evaluations need it
    factor by factor; the product is cached on first use.
    """

    __slots__ = ("num", "den_factors", "_den")

    def __init__(self, num, den_factors=()):
        self.num = QLaurent._coerce(num)
        factors = []
        for d in den_factors:
            d = QLaurent._coerce(d)
            if d.is_zero():
                raise ZeroDivisionError("zero denominator factor")
            if d != ONE:
                factors.append(d)
        self.den_factors = tuple(factors)
        self._den = None

    @classmethod
    def coerce(cls, x):
        if isinstance(x, QFraction):
            return x
        return cls(x, ())

    @property
    def den(self):
        d = self._den
        if d is None:
            d = ONE
            for f in self.den_factors:
                d = d * f
            self._den = d
        return d

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        other = QFraction.coerce(other)
        if not self.den_factors:
            return QFraction(self.num * other.den + other.num, other.den_factors)
        if not other.den_factors:
            return QFraction(self.num + other.num * self.den, self.den_factors)
        return QFraction(
            self.num * other.den + other.num * self.den,
            self.den_factors + other.den_factors,
        )

    __radd__ = __add__

    def __neg__(self):
        return QFraction(-self.num, self.den_factors)

    def __sub__(self, other):
        return self + (-QFraction.coerce(other))

    def __rsub__(self, other):
        return QFraction.coerce(other) + (-self)

    def __mul__(self, other):
        other = QFraction.coerce(other)
        return QFraction(self.num * other.num, self.den_factors + other.den_factors)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QFraction.coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero fraction")
        return QFraction(self.num * other.den, self.den_factors + (other.num,))

    def __eq__(self, other):
        other = QFraction.coerce(other)
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash(self.simplified_pair())

    def substitute_power(self, s):
        return QFraction(
            self.num.substitute_power(s),
            tuple(d.substitute_power(s) for d in self.den_factors),
        )

    def as_laurent(self):
        """Exact polynomial value; raises :class:`NonDivisible` if not exact."""
        return div_exact(self.num, self.den)

    def simplified(self):
        """Strip denominator factors that divide the numerator exactly."""
        num = self.num
        kept = []
        for d in self.den_factors:
            try:
                num = div_exact(num, d)
            except NonDivisible:
                kept.append(d)
        return QFraction(num, tuple(kept))

    def simplified_pair(self):
        s = self.simplified()
        return s.num, s.den

    def to_json(self):
        return {
            "num": self.num.to_json(),
            "den_factors": [d.to_json() for d in self.den_factors],
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            QLaurent.from_json(data["num"]),
            tuple(QLaurent.from_json(d) for d in data["den_factors"]),
        )

    def __repr__(self):
        if not self.den_factors:
            return f"QFraction({self.num.to_text()!r})"
        dens = ", ".join(d.to_text() for d in self.den_factors)
        return f"QFraction({self.num.to_text()!r} / [{dens}])"
