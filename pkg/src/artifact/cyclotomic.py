"""Exact arithmetic in the cyclotomic field Q(xi_r) for odd r.

Elements are stored in the power basis ``1, xi, ..., xi^(phi(r)-1)`` of
``Q[x]/Phi_r(x)`` with exact rational coefficients, so equality is coefficient
equality and membership in Z[xi] is a coefficient inspection.

The module also houses the evaluation map :func:`ev` (replace ``q`` by
``xi``, with fractional powers resolved through an inverse modulo r), the
root-of-unity summation :func:`xi_sum` over odd colors in ``(0, 2r)``, the
Gauss sums :func:`gauss_sum`, the divisibility test in Z[xi], and the gapped
Pochhammer products :func:`tilde_pochhammer`.

Worked example::

    >>> from artifact.cyclotomic import gauss_sum
    >>> gauss_sum(1, 3).to_text()        # 2 + xi^2
    '3; 2, -1'

(the coefficient vector is reduced modulo Phi_3 = 1 + x + x^2).
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import gcd

from ._backend import cyc_mul, poly_mod_reduce
from .errors import NonCoprime, NonCoprimeDenominator
from .numtheory import modinv
from .qring import ONE, QLaurent, q_power


def phi(n):
    """Euler totient."""
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


# ---------------------------------------------------------------------------
# cyclotomic polynomials and reduction data
# ---------------------------------------------------------------------------

_cyclo_cache = {}


def cyclotomic_poly(n):
    """Coefficients of Phi_n, ascending, as a tuple of ints (monic)."""
    f = _cyclo_cache.get(n)
    if f is not None:
        return f
    # start from x^n - 1 and divide off Phi_d for the proper divisors d
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _int_poly_div_exact(poly, list(cyclotomic_poly(d)))
    f = tuple(poly)
    _cyclo_cache[n] = f
    return f


def _int_poly_div_exact(num, den):
    """Exact division of integer polynomials (dense, ascending)."""
    num = list(num)
    dn, dd = len(num) - 1, len(den) - 1
    out = [0] * (dn - dd + 1)
    for i in range(dn, dd - 1, -1):
        c = num[i]
        if c:
            assert c % den[dd] == 0
            c //= den[dd]
            out[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    assert not any(num[:dd]), "non-exact cyclotomic division"
    return out


_field_cache = {}


def _field_data(r):
    """(degree, reduction rows) for Q[x]/Phi_r.

    ``rows[i]`` is the power-basis vector of ``x^(degree+i)``; enough rows are
    precomputed to reduce both products of two reduced elements and raw
    exponents up to ``r - 1``.
    """
    data = _field_cache.get(r)
    if data is not None:
        return data
    coeffs = cyclotomic_poly(r)
    deg = len(coeffs) - 1
    count = max(deg - 1, r - deg, 0)
    rows = []
    if count > 0:
        base = [-c for c in coeffs[:deg]]  # x^deg = -(lower part)
        rows.append(base)
        for _ in range(1, count):
            prev = rows[-1]
            shifted = [0] + prev[:-1]
            top = prev[-1]
            if top:
                shifted = [s + top * b for s, b in zip(shifted, base)]
            rows.append(shifted)
    data = (deg, rows)
    _field_cache[r] = data
    return data


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


class CycElem:
    """An element of Q(xi_r) in the power basis mod Phi_r."""

    __slots__ = ("r", "coeffs")

    def __init__(self, r, coeffs):
        if r <= 0 or r % 2 == 0:
            raise ValueError("order must be an odd positive integer")
        deg, _ = _field_data(r)
        coeffs = [_norm(c if isinstance(c, (int, Fraction)) else Fraction(c)) for c in coeffs]
        if len(coeffs) != deg:
            raise ValueError(f"need exactly {deg} coefficients for order {r}")
        self.r = r
        self.coeffs = tuple(coeffs)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, r):
        deg, _ = _field_data(r)
        return cls(r, [0] * deg)

    @classmethod
    def one(cls, r):
        return cls.from_int(r, 1)

    @classmethod
    def from_int(cls, r, n):
        deg, _ = _field_data(r)
        return cls(r, [n] + [0] * (deg - 1))

    @classmethod
    def root_power(cls, r, e):
        """xi^e as an element (e arbitrary integer)."""
        vec = [0] * r
        vec[e % r] = 1
        return cls.from_power_vector(r, vec)

    @classmethod
    def from_power_vector(cls, r, vec):
        """Reduce a coefficient vector over exponents ``0..r-1`` to the basis."""
        if len(vec) > r:
            raise ValueError("power vector longer than the order")
        deg, rows = _field_data(r)
        return cls(r, poly_mod_reduce(list(vec), rows, deg))

    # -- views ---------------------------------------------------------------

    def power_vector(self):
        """Basis coefficients padded with zeros up to length r."""
        return list(self.coeffs) + [0] * (self.r - len(self.coeffs))

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ValueError("not a rational element")
        return Fraction(self.coeffs[0]) if self.coeffs else Fraction(0)

    def is_integral(self):
        """True iff the element lies in Z[xi]."""
        return all(isinstance(c, int) for c in self.coeffs)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycElem):
            if other.r != self.r:
                raise ValueError("mixed cyclotomic orders")
            return other
        if isinstance(other, (int, Fraction)):
            return CycElem.from_int(self.r, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycElem(self.r, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.r, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycElem(self.r, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElem(self.r, [c * other for c in self.coeffs])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        deg, rows = _field_data(self.r)
        return CycElem(self.r, cyc_mul(list(self.coeffs), list(o.coeffs), rows, deg))

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        out = CycElem.one(self.r)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.r, self.coeffs))

    # -- field / Galois structure -------------------------------------------

    def inv(self):
        """Multiplicative inverse (Phi_r is irreducible, so this is a field)."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(xi)")
        mod = [Fraction(c) for c in cyclotomic_poly(self.r)]
        r0, r1 = mod, [Fraction(c) for c in self.coeffs]
        _strip(r1)
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, rem = _pdivmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
            _strip(r1)
        c = r1[0]
        deg, rows = _field_data(self.r)
        u = [x / c for x in s1]
        u = poly_mod_reduce(u, rows, deg)
        return CycElem(self.r, u)

    def galois(self, c):
        """The automorphism xi -> xi^c for gcd(c, r) = 1."""
        if gcd(c, self.r) != 1:
            raise ValueError("galois exponent must be coprime to the order")
        vec = [0] * self.r
        for i, a in enumerate(self.coeffs):
            if a:
                vec[(i * c) % self.r] += a
        return CycElem.from_power_vector(self.r, vec)

    def conj(self):
        """Complex conjugation, xi -> xi^(r-1)."""
        return self.galois(self.r - 1)

    def embed(self, new_r):
        """View this element inside Q(xi_R) for r | R via xi_r = xi_R^(R/r)."""
        if new_r == self.r:
            return self
        if new_r % self.r != 0:
            raise ValueError("embedding target order must be a multiple")
        k = new_r // self.r
        vec = [0] * new_r
        for i, a in enumerate(self.coeffs):
            if a:
                vec[(i * k) % new_r] += a
        return CycElem.from_power_vector(new_r, vec)

    # -- serialization -------------------------------------------------------

    def to_text(self):
        return f"{self.r}; " + ", ".join(str(c) for c in self.coeffs)

    @classmethod
    def from_text(cls, text):
        head, _, body = text.partition(";")
        r = int(head.strip())
        parts = [p.strip() for p in body.split(",")] if body.strip() else []
        coeffs = [Fraction(p) if "/" in p else int(p) for p in parts]
        return cls(r, coeffs)

    def to_json(self):
        return {"order": self.r, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = [
            Fraction(c) if "/" in c else int(c) for c in (str(x) for x in data["coeffs"])
        ]
        return cls(int(data["order"]), coeffs)

    def __repr__(self):
        return f"CycElem({self.to_text()!r})"


# -- dense rational polynomial helpers (ascending coefficient lists) --------


def _strip(p):
    while p and not p[-1]:
        p.pop()
    return p


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _strip(out)


def _psub(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return _strip(out)


def _pdivmod(num, den):
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [], _strip(num)
    lead = den[dd]
    out = [Fraction(0)] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            c = c / lead
            out[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    return _strip(out), _strip(num[:dd])


# ---------------------------------------------------------------------------
# evaluation map and summations
# ---------------------------------------------------------------------------


def ev(f, r):
    """Evaluate a QLaurent at xi_r, resolving ``q^(1/h)`` to ``xi^b``, hb=1 mod r.

    Raises :class:`NonCoprimeDenominator` when the minimized fractional-power
    denominator shares a factor with r.
    """
    if not isinstance(f, QLaurent):
        f = QLaurent._coerce(f)
    m = f.min_scale()
    h = m.scale
    if gcd(h, r) != 1:
        raise NonCoprimeDenominator(
            f"power denominator {h} shares a factor with the order {r}"
        )
    b = 1 if h == 1 else modinv(h, r)
    vec = [0] * r
    for e, c in m.terms_dict().items():
        vec[(e * b) % r] += c
    return CycElem.from_power_vector(r, vec)


class QuadMonomialSum:
    """A finite sum of monomials ``coeff * q^(alpha*n^2 + beta*n + gamma)``.

    ``n`` is the symbolic color variable of the root-of-unity summation; the
    structured (alpha, beta, gamma) storage keeps the summation closed-form
    checkable instead of hiding the exponents in a callback.
    """

    __slots__ = ("terms",)

    def __init__(self, terms):
        clean = []
        for alpha, beta, gamma, coeff in terms:
            coeff = QLaurent._coerce(coeff)
            if not coeff.is_zero():
                clean.append((Fraction(alpha), Fraction(beta), Fraction(gamma), coeff))
        self.terms = tuple(clean)

    @classmethod
    def single(cls, alpha, beta, gamma, coeff=ONE):
        return cls([(alpha, beta, gamma, coeff)])

    def __add__(self, other):
        return QuadMonomialSum(self.terms + other.terms)

    def scaled(self, factor):
        return QuadMonomialSum(
            [(a, b, g, c * factor) for a, b, g, c in self.terms]
        )

    def evaluate_at(self, n):
        """The QLaurent value at integer color n."""
        out = QLaurent.zero()
        for alpha, beta, gamma, coeff in self.terms:
            out = out + coeff * q_power(alpha * n * n + beta * n + gamma)
        return out

    def __repr__(self):
        return f"QuadMonomialSum({list(self.terms)!r})"


def xi_sum(f, r):
    """Sum ``ev(f(n), r)`` over the odd colors ``0 < n < 2r``."""
    total = CycElem.zero(r)
    for n in range(1, 2 * r, 2):
        total = total + ev(f.evaluate_at(n), r)
    return total


_gauss_cache = {}


def gauss_sum(d, r):
    """The Gauss sum ``sum over odd n in (0,2r) of xi^(d(n^2-1)/4)``."""
    if r <= 0 or r % 2 == 0:
        raise ValueError("order must be an odd positive integer")
    key = (d % r, r)
    g = _gauss_cache.get(key)
    if g is None:
        vec = [0] * r
        for n in range(1, 2 * r, 2):
            e = (d * ((n * n - 1) // 4)) % r
            vec[e] += 1
        g = CycElem.from_power_vector(r, vec)
        _gauss_cache[key] = g
    return g


def gauss_sum_frac(x, r):
    """Gauss sum with a rational kernel: reduce ``x`` to an integer mod r.

    Requires the denominator of ``x`` to be invertible mod r; raises
    :class:`NonCoprime` otherwise.
    """
    x = Fraction(x)
    if gcd(x.denominator, r) != 1:
        raise NonCoprime(
            f"kernel denominator {x.denominator} shares a factor with {r}"
        )
    d = (x.numerator * modinv(x.denominator, r)) % r
    return gauss_sum(d, r)


def divides(x, y, want_quotient=False):
    """Test divisibility x/y in Z[xi]; inputs must lie in Z[xi]."""
    if not isinstance(x, CycElem) or not isinstance(y, CycElem):
        raise TypeError("divides needs CycElem arguments")
    if not x.is_integral() or not y.is_integral():
        raise ValueError("divides is a Z[xi] test; inputs must be integral")
    if y.is_zero():
        raise ZeroDivisionError("division by zero in Z[xi]")
    q = x * y.inv()
    ok = q.is_integral()
    if want_quotient:
        return ok, (q if ok else None)
    return ok


def tilde_pochhammer(l, m, c, r):
    """``prod_{j=l}^{l+m-1, c does not divide j} (1 - xi^j)``."""
    out = CycElem.one(r)
    for j in range(l, l + m):
        if j % c != 0:
            out = out * (CycElem.one(r) - CycElem.root_power(r, j))
    return out
