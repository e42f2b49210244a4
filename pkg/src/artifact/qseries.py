"""Exact verification of two basic-hypergeometric transformation identities.

Two engines live here:

* ``andrews_check`` evaluates both sides of the finite Bailey-pair
  transformation (a multi-sum identity between a single sum over ``n`` and a
  nested sum over ``n_1 <= ... <= n_k``) at exact rational parameter values,
  using the special pair supplied by ``bailey_special``.  All sums terminate
  because of the ``(q^{-N}; q)_n`` factor, so the comparison is exact
  ``Fraction`` arithmetic.

* ``watson_check`` verifies the very-well-poised transformation between a
  ``2p+4``-parameter series and a nested ``p-1``-fold sum, under the parameter
  specialization used to produce the slope coefficient tables: the leading
  parameter is pinned to ``t^{-2k-1}``, a block of parameters carries powers of
  a primitive ``a``-th root of unity ``w``, and the remaining parameters
  diverge.  Diverging parameters are handled by term rewriting with the four
  standard limit rules (never numerically), after which both sides are finite
  sums over ``(Q[w]/Phi_a(w))[t^{+-1/2}]`` and are compared exactly, up to an
  explicitly reported monomial unit.

The division-free strategy: each side is assembled as ``numerator /
denominator`` where the denominator is a product of binomial factors
``1 - P t^j``; the verdict cross-multiplies, so no ring division is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _iproduct
from typing import Dict, List, Optional, Sequence, Tuple

from functools import lru_cache
from math import gcd

from .cyclotomic import _field_data
from .errors import ArtifactError, PoleHit, UnresolvedLimit, ValidationError
from .qring import QLaurent, q_mono, q_power

__all__ = [
    "INFINITY",
    "HypergeometricSpec",
    "AndrewsReport",
    "WatsonReport",
    "bailey_special",
    "andrews_check",
    "watson_check",
    "watson_spec",
    "watson_display_sum",
    "watson_display_check",
    "watson_nested_sum",
]

# ---------------------------------------------------------------------------
# Bailey pair
# ---------------------------------------------------------------------------


def bailey_special(n: int) -> Tuple[QLaurent, QLaurent]:
    """The (alpha_n, beta_n) pair with unit base parameter.

    alpha_0 = 1, alpha_n = (-1)^n q^{n(n-1)/2} (1 + q^n) for n >= 1;
    beta_0 = 1, beta_n = 0 for n >= 1.
    """
    if n < 0:
        raise ValueError("index must be nonnegative")
    if n == 0:
        return (QLaurent.one(), QLaurent.one())
    alpha = q_mono(Fraction(n * (n - 1), 2), (-1) ** n) * (
        QLaurent.one() + q_power(n)
    )
    return (alpha, QLaurent.zero())


def _alpha_special_value(n: int, q: Fraction) -> Fraction:
    if n == 0:
        return Fraction(1)
    return Fraction((-1) ** n) * q ** (n * (n - 1) // 2) * (1 + q**n)


def _poch_value(x: Fraction, q: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for j in range(n):
        out *= 1 - x * q**j
    return out


@dataclass(frozen=True)
class AndrewsReport:
    equal: bool
    residual: Fraction
    lhs: Fraction
    rhs: Fraction


def andrews_check(
    k: int,
    N: int,
    b: Sequence[Fraction],
    c: Sequence[Fraction],
    q: Fraction,
    beta_override=None,
) -> AndrewsReport:
    """Compare both sides of the Bailey-pair transformation exactly.

    ``b`` and ``c`` are the ``k`` auxiliary parameter values (exact rationals;
    pass powers of ``q`` for monomial specializations).  ``beta_override`` may
    replace the special pair's beta sequence (used as a negative control).
    Raises PoleHit when a denominator factor vanishes at the chosen point.
    """
    if k < 1 or N < 1:
        raise ValueError("k and N must be positive")
    if len(b) != k or len(c) != k:
        raise ValueError("need exactly k values for b and for c")
    q = Fraction(q)
    b = [Fraction(x) for x in b]
    c = [Fraction(x) for x in c]
    if q == 0 or any(x == 0 for x in b + c):
        raise PoleHit("parameters must be nonzero")

    def poch(x: Fraction, n: int) -> Fraction:
        return _poch_value(x, q, n)

    def check_nonzero(val: Fraction, what: str) -> Fraction:
        if val == 0:
            raise PoleHit(f"denominator factor {what} vanishes at this point")
        return val

    beta = beta_override or (lambda n: Fraction(1) if n == 0 else Fraction(0))

    # Single-sum side: terminates at n = N because of (q^{-N}; q)_n.
    lhs = Fraction(0)
    for n in range(N + 1):
        term = Fraction((-1) ** n) * _alpha_special_value(n, q)
        term *= q ** (-(n * (n - 1) // 2) + k * n + N * n)
        term *= poch(q**-N, n)
        term /= check_nonzero(poch(q ** (N + 1), n), "(q^{N+1})_n")
        for i in range(k):
            term *= poch(b[i], n) / b[i] ** n
            term *= poch(c[i], n) / c[i] ** n
            term /= check_nonzero(poch(q / b[i], n), "(q/b_i)_n")
            term /= check_nonzero(poch(q / c[i], n), "(q/c_i)_n")
        lhs += term

    # Nested-sum side.
    pref = poch(q, N) * poch(q / (b[k - 1] * c[k - 1]), N)
    pref /= check_nonzero(poch(q / b[k - 1], N), "(q/b_k)_N")
    pref /= check_nonzero(poch(q / c[k - 1], N), "(q/c_k)_N")

    rhs = Fraction(0)
    # chains 0 <= n_1 <= ... <= n_k <= N
    for chain in _monotone_chains(k, N):
        term = beta(chain[0])
        if term == 0:
            continue
        nk = chain[-1]
        term *= q**nk * poch(q**-N, nk) * poch(b[k - 1], nk) * poch(c[k - 1], nk)
        term /= check_nonzero(
            poch(q**-N * b[k - 1] * c[k - 1], nk), "(q^{-N} b_k c_k)_n"
        )
        for i in range(k - 1):
            ni, nip1 = chain[i], chain[i + 1]
            term *= q**ni
            term *= poch(b[i], ni) / b[i] ** ni
            term *= poch(c[i], ni) / c[i] ** ni
            term *= poch(q / (b[i] * c[i]), nip1 - ni)
            term /= check_nonzero(poch(q, nip1 - ni), "(q)_{n_{i+1}-n_i}")
            term /= check_nonzero(poch(q / b[i], nip1), "(q/b_i)_{n_{i+1}}")
            term /= check_nonzero(poch(q / c[i], nip1), "(q/c_i)_{n_{i+1}}")
        rhs += term
    rhs *= pref

    residual = lhs - rhs
    return AndrewsReport(residual == 0, residual, lhs, rhs)


def _monotone_chains(k: int, N: int):
    """All tuples (n_1, ..., n_k) with 0 <= n_1 <= ... <= n_k <= N."""
    if k == 1:
        for n in range(N + 1):
            yield (n,)
        return
    for rest in _monotone_chains(k - 1, N):
        for n in range(rest[-1], N + 1):
            yield rest + (n,)


# ---------------------------------------------------------------------------
# Coefficient ring (Q[w]/Phi_a)[t^{+-1/2}]
# ---------------------------------------------------------------------------


def _wvec_mul(a: int, va: Tuple[Fraction, ...], vb: Tuple[Fraction, ...]):
    deg, rows = _field_data(a)
    conv = [Fraction(0)] * (2 * deg - 1)
    for i, x in enumerate(va):
        if x == 0:
            continue
        for j, y in enumerate(vb):
            if y == 0:
                continue
            conv[i + j] += x * y
    out = conv[:deg]
    for extra in range(deg, len(conv)):
        coeff = conv[extra]
        if coeff == 0:
            continue
        row = rows[extra - deg]
        for pos in range(deg):
            out[pos] += coeff * row[pos]
    return tuple(out)


def _wvec_of_power(a: int, e: int) -> Tuple[Fraction, ...]:
    """w^e in the power basis of Q[w]/Phi_a (uses w^a = 1)."""
    deg, rows = _field_data(a)
    e %= a
    out = [Fraction(0)] * deg
    if e < deg:
        out[e] = Fraction(1)
    else:
        row = rows[e - deg]
        out = [Fraction(x) for x in row]
    return tuple(out)


class WT:
    """Laurent polynomial in t^(1/2) over Q[w]/Phi_a(w).

    Exponents are stored doubled (``texp2``) so half-integer powers of ``t``
    stay exact integers.
    """

    __slots__ = ("a", "terms")

    def __init__(self, a: int, terms: Dict[int, Tuple[Fraction, ...]]):
        self.a = a
        self.terms = {e: v for e, v in terms.items() if any(x != 0 for x in v)}

    @classmethod
    def zero(cls, a: int) -> "WT":
        return cls(a, {})

    @classmethod
    def one(cls, a: int) -> "WT":
        return cls.scalar(a, Fraction(1))

    @classmethod
    def scalar(cls, a: int, c) -> "WT":
        deg, _ = _field_data(a)
        vec = [Fraction(0)] * deg
        vec[0] = Fraction(c)
        return cls(a, {0: tuple(vec)})

    @classmethod
    def term(cls, a: int, sign: int, wexp: int, texp2: int) -> "WT":
        vec = _wvec_of_power(a, wexp)
        if sign < 0:
            vec = tuple(-x for x in vec)
        return cls(a, {texp2: vec})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "WT") -> "WT":
        out = dict(self.terms)
        for e, v in other.terms.items():
            if e in out:
                out[e] = tuple(x + y for x, y in zip(out[e], v))
            else:
                out[e] = v
        return WT(self.a, out)

    def __neg__(self) -> "WT":
        return WT(self.a, {e: tuple(-x for x in v) for e, v in self.terms.items()})

    def __sub__(self, other: "WT") -> "WT":
        return self + (-other)

    def __mul__(self, other: "WT") -> "WT":
        out: Dict[int, List[Fraction]] = {}
        deg, _ = _field_data(self.a)
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                prod = _wvec_mul(self.a, v1, v2)
                e = e1 + e2
                if e in out:
                    out[e] = [x + y for x, y in zip(out[e], prod)]
                else:
                    out[e] = list(prod)
        return WT(self.a, {e: tuple(v) for e, v in out.items()})

    def scaled(self, c) -> "WT":
        c = Fraction(c)
        return WT(self.a, {e: tuple(c * x for x in v) for e, v in self.terms.items()})

    def shifted(self, texp2: int) -> "WT":
        return WT(self.a, {e + texp2: v for e, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, WT) and self.a == other.a and self.terms == other.terms

    def __hash__(self):
        return hash((self.a, tuple(sorted(self.terms.items()))))

    def is_w_free(self) -> bool:
        return all(all(x == 0 for x in v[1:]) for v in self.terms.values())

    def min_texp2(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial")
        return min(self.terms)

    def __repr__(self) -> str:
        items = []
        for e in sorted(self.terms):
            items.append(f"t^({e}/2)*{list(self.terms[e])}")
        return " + ".join(items) if items else "0"


# ---------------------------------------------------------------------------
# Parameter monomials with formal diverging symbols
# ---------------------------------------------------------------------------

INFINITY = "INFINITY"


@dataclass(frozen=True)
class Mono:
    """+- w^wexp t^(texp2/2) times formal symbols.

    ``nexp`` counts powers of the diverging truncation monomial (the
    ``t^{-N}``-type parameter); ``syms`` maps formal diverging parameters to
    integer exponents.  A monomial with any nonzero symbol content is not a
    ring element; it only appears in intermediate rewrite bookkeeping.
    """

    sign: int = 1
    wexp: int = 0
    texp2: int = 0
    nexp: int = 0
    syms: Tuple[Tuple[int, int], ...] = ()

    def times(self, other: "Mono") -> "Mono":
        syms: Dict[int, int] = dict(self.syms)
        for s, e in other.syms:
            syms[s] = syms.get(s, 0) + e
            if syms[s] == 0:
                del syms[s]
        return Mono(
            self.sign * other.sign,
            self.wexp + other.wexp,
            self.texp2 + other.texp2,
            self.nexp + other.nexp,
            tuple(sorted(syms.items())),
        )

    def power(self, e: int) -> "Mono":
        sign = self.sign if e % 2 else 1
        return Mono(
            sign,
            self.wexp * e,
            self.texp2 * e,
            self.nexp * e,
            tuple((s, x * e) for s, x in self.syms),
        )

    def inverse(self) -> "Mono":
        return self.power(-1)

    @property
    def finite(self) -> bool:
        return self.nexp == 0 and not self.syms

    @property
    def divergence(self) -> int:
        """+1 if the monomial diverges, -1 if it tends to zero, 0 if finite."""
        exps = [self.nexp] + [e for _, e in self.syms]
        exps = [e for e in exps if e != 0]
        if not exps:
            return 0
        if all(e > 0 for e in exps):
            return 1
        if all(e < 0 for e in exps):
            return -1
        raise UnresolvedLimit(
            "parameter mixes diverging and vanishing symbols; no rewrite rule applies"
        )


_T = Mono(texp2=2)  # the base t


def _binfac(a: int, P: Mono, j: int) -> WT:
    """The factor 1 - P t^j as a ring element (P must be finite)."""
    shifted = P.times(Mono(texp2=2 * j))
    return WT.one(a) - WT.term(a, shifted.sign, shifted.wexp, shifted.texp2)


def _poch_finite(a: int, P: Mono, n: int) -> WT:
    out = WT.one(a)
    for j in range(n):
        out = out * _binfac(a, P, j)
    return out


# ---------------------------------------------------------------------------
# The very-well-poised series under limit rewrites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HypergeometricSpec:
    """A basic hypergeometric series shape with limit tokens resolved.

    ``upper``/``lower`` hold parameter monomials; diverging or vanishing
    entries carry formal symbols (rendered as INFINITY in ``describe``).
    ``base`` is the series base and ``argument`` the series argument, both
    monomials; ``truncation`` bounds the summation index.
    """

    modulus: int
    upper: Tuple[Mono, ...]
    lower: Tuple[Mono, ...]
    base: Mono
    argument: Mono
    truncation: int

    def __post_init__(self):
        if len(self.upper) != len(self.lower) + 1:
            raise ValidationError(
                "parameter counts must match a (r, r-1) series shape"
            )
        for entry in self.upper + self.lower + (self.argument,):
            entry.divergence  # raises UnresolvedLimit when no rule applies

    def describe(self) -> dict:
        def show(m: Mono):
            if m.finite:
                return {"sign": m.sign, "wexp": m.wexp, "texp2": m.texp2}
            return INFINITY if m.divergence > 0 else {"vanishing": True}

        return {
            "modulus": self.modulus,
            "upper": [show(m) for m in self.upper],
            "lower": [show(m) for m in self.lower],
            "argument": show(self.argument),
            "truncation": self.truncation,
        }


def _phi_value(spec: HypergeometricSpec) -> Tuple[WT, WT]:
    """Evaluate the series as (numerator, denominator) after limit rewrites.

    Rewrites: a diverging parameter contributes (P)_n -> (-1)^n P^n
    t^{n(n-1)/2}; a vanishing parameter contributes (P)_n -> 1. Identical
    finite upper/lower parameters cancel (they arise as coupled limits whose
    ratio tends to 1).  Every term's residual symbol content must vanish.
    """
    a = spec.modulus
    nmax = spec.truncation
    balance = 1 + len(spec.lower) - len(spec.upper)  # series sign/exponent factor

    uppers = list(spec.upper)
    lowers = list(spec.lower) + [spec.base]
    # cancel identical finite upper/lower pairs (coupled limits)
    for up in list(uppers):
        if up.finite and up in lowers:
            uppers.remove(up)
            lowers.remove(up)

    # vanishing parameters (divergence < 0) contribute factor 1 and drop out
    fin_up = [P for P in uppers if P.finite]
    div_up = [P for P in uppers if not P.finite and P.divergence > 0]
    fin_lo = [P for P in lowers if P.finite]
    div_lo = [P for P in lowers if not P.finite and P.divergence > 0]

    den = WT.one(a)
    for P in fin_lo:
        den = den * _poch_finite(a, P, nmax)

    total = WT.zero(a)
    for n in range(nmax + 1):
        mono = spec.argument.power(n)
        sign = 1
        texp2 = 0
        if balance:
            if n % 2:
                sign = -sign if balance % 2 else sign
            texp2 += balance * n * (n - 1)
        for P in div_up:
            if n % 2:
                sign = -sign
            mono = mono.times(P.power(n))
            texp2 += n * (n - 1)
        for P in div_lo:
            if n % 2:
                sign = -sign
            mono = mono.times(P.power(-n))
            texp2 -= n * (n - 1)
        if mono.syms or mono.nexp:
            raise UnresolvedLimit(
                "diverging symbols do not cancel in a series term"
            )
        num = WT.term(a, mono.sign * sign, mono.wexp, mono.texp2 + texp2)
        for P in fin_up:
            num = num * _poch_finite(a, P, n)
        for P in fin_lo:
            for j in range(n, nmax):
                num = num * _binfac(a, P, j)
        total = total + num
    return total, den


# ---------------------------------------------------------------------------
# The specialization used for the slope coefficient tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Slots:
    pairs: Tuple[Tuple[Mono, Mono], ...]  # (b_i, c_i) for i = 1..p
    alpha: Mono


def _watson_slots(k: int, a: int, b: int) -> _Slots:
    """Parameter slots for the (k, a, b) specialization.

    Finite entries are taken at their limit values (the leading parameter
    pinned to t^{-2k-1}, square-root-coupled entries at t^{-k}); diverging
    entries carry fresh formal symbols.
    """
    if a < 1 or b < 1 or k < 0:
        raise ValueError("need a >= 1, b >= 1, k >= 0")
    alpha = Mono(texp2=-2 * (2 * k + 1))
    tk = Mono(texp2=-2 * k)  # the square-root-coupled value
    sym_counter = [0]

    def fresh() -> Mono:
        sym_counter[0] += 1
        return Mono(syms=((sym_counter[0], 1),))

    assign: Dict[int, Tuple[Mono, Mono]] = {}
    if a % 2:
        c = (a - 1) // 2
        p = max(b, a + b - 2)
        for i in range(1, c + 1):
            assign[i] = (
                Mono(wexp=i).times(alpha),
                Mono(wexp=-i).times(alpha),
            )
        for i in range(c + 1, a - 1):
            assign[i] = (tk, tk)
    else:
        c = a // 2 - 1
        p = max(b, a + b - 2)
        if c == 0:
            # the two sign-carrying slots collapse into one merged pair,
            # which stands in for two slots of the generic scheme
            p = b + 1
            assign[1] = (
                Mono(sign=-1).times(alpha),
                Mono(sign=-1).times(tk),
            )
        else:
            for i in range(1, c):
                assign[i] = (
                    Mono(wexp=i).times(alpha),
                    Mono(wexp=-i).times(alpha),
                )
            assign[c] = (
                Mono(wexp=c).times(alpha),
                Mono(sign=-1).times(tk),
            )
            assign[c + 1] = (
                Mono(sign=-1).times(alpha),
                Mono(wexp=-c).times(alpha),
            )
            for i in range(c + 2, a - 1):
                assign[i] = (tk, tk)
    for i in range(1, p):
        if i not in assign:
            assign[i] = (fresh(), fresh())
    assign[p] = (tk, fresh())
    pairs = tuple(assign[i] for i in range(1, p + 1))
    return _Slots(pairs, alpha)


def watson_spec(k: int, a: int, b: int) -> HypergeometricSpec:
    """The specialized very-well-poised series shape for (k, a, b)."""
    slots = _watson_slots(k, a, b)
    alpha = slots.alpha
    p = len(slots.pairs)
    sqrt_alpha = Mono(texp2=-(2 * k + 1))
    big_n = Mono(nexp=1)  # the diverging t^{-N} parameter

    upper: List[Mono] = [
        alpha,
        sqrt_alpha.times(_T),
        Mono(sign=-1).times(sqrt_alpha).times(_T),
    ]
    lower: List[Mono] = [sqrt_alpha, Mono(sign=-1).times(sqrt_alpha)]
    argument = alpha.power(p).times(Mono(texp2=2 * p)).times(big_n.inverse())
    for bi, ci in slots.pairs:
        upper.extend([bi, ci])
        lower.extend([alpha.times(_T).times(bi.inverse()),
                      alpha.times(_T).times(ci.inverse())])
        argument = argument.times(bi.inverse()).times(ci.inverse())
    upper.append(big_n)
    lower.append(alpha.times(_T).times(big_n.inverse()))
    return HypergeometricSpec(
        modulus=a,
        upper=tuple(upper),
        lower=tuple(lower),
        base=_T,
        argument=argument,
        truncation=2 * k + 1,
    )


def _watson_rhs(k: int, a: int, slots: _Slots) -> Tuple[WT, WT]:
    """The nested-sum side under the same rewrites, as (numerator, denominator)."""
    alpha = slots.alpha
    pairs = slots.pairs
    p = len(pairs)
    alpha_t = alpha.times(_T)
    bp, cp = pairs[p - 1]

    # Truncation-ratio prefactor: the diverging-index limit of
    # (alpha t)_N / (alpha t / b_p)_N collapses to 2 (t^{-2k}; t)_k; the two
    # factors involving c_p tend to 1.
    pre = _poch_finite(a, Mono(texp2=-4 * k), k).scaled(2)

    # Group denominator for the nested sum: b_p c_p t^{-N} / alpha (diverging).
    group_den = bp.times(cp).times(Mono(nexp=1)).times(alpha.inverse())
    if group_den.divergence <= 0:
        raise UnresolvedLimit("nested-sum group denominator must diverge")

    smax = k  # (b_p)_S vanishes beyond S = k at the limit point
    den = WT.one(a)
    den_plan: List[Tuple[Mono, int]] = []  # (P, max index) per slot factor
    for i in range(p - 1):
        bi, ci = pairs[i]
        den_plan.append((_T, smax))  # (t)_{m_i}
        for P in (alpha_t.times(bi.inverse()), alpha_t.times(ci.inverse())):
            if P.divergence == 0:
                den_plan.append((P, smax))
    for P, top in den_plan:
        den = den * _poch_finite(a, P, top)

    total = WT.zero(a)
    for mvec in _bounded_tuples(p - 1, smax):
        ssum = sum(mvec)
        mono = Mono()
        sign = 1
        texp2 = 0
        num = WT.one(a)
        used: List[Tuple[Mono, int]] = []

        # group factors indexed by the full sum
        num = num * _poch_finite(a, bp, ssum)
        for P in (cp, Mono(nexp=1)):
            if ssum % 2:
                sign = -sign
            mono = mono.times(P.power(ssum))
            texp2 += ssum * (ssum - 1)
        if ssum % 2:
            sign = -sign
        mono = mono.times(group_den.power(-ssum))
        texp2 -= ssum * (ssum - 1)

        prefix = 0
        for i in range(p - 1):
            bi, ci = pairs[i]
            mi = mvec[i]
            upto = prefix + mi
            # numerator pieces
            mono = mono.times(Mono(texp2=2 * mi))
            mono = mono.times(alpha_t.power((p - i - 2) * mi))
            ratio = alpha_t.times(bi.inverse()).times(ci.inverse())
            d = ratio.divergence
            if d == 0:
                num = num * _poch_finite(a, ratio, mi)
            elif d < 0:
                pass  # vanishing parameter: factor 1
            else:
                if mi % 2:
                    sign = -sign
                mono = mono.times(ratio.power(mi))
                texp2 += mi * (mi - 1)
            for P in (bi, ci):
                d = P.divergence
                if d == 0:
                    num = num * _poch_finite(a, P, prefix)
                elif d > 0:
                    if prefix % 2:
                        sign = -sign
                    mono = mono.times(P.power(prefix))
                    texp2 += prefix * (prefix - 1)
                else:
                    pass
            # denominator pieces
            used.append((_T, mi))
            for P in (alpha_t.times(bi.inverse()), alpha_t.times(ci.inverse())):
                d = P.divergence
                if d == 0:
                    used.append((P, upto))
                elif d < 0:
                    pass
                else:
                    if upto % 2:
                        sign = -sign
                    mono = mono.times(P.power(-upto))
                    texp2 -= upto * (upto - 1)
            mono = mono.times(bi.times(ci).power(-prefix))
            prefix = upto

        if mono.syms or mono.nexp:
            raise UnresolvedLimit(
                "diverging symbols do not cancel in a nested-sum term"
            )
        num = num * WT.term(a, mono.sign * sign, mono.wexp, mono.texp2 + texp2)

        # top up to the common denominator
        for (P_plan, top), (P_used, idx) in zip(den_plan, used):
            if P_plan != P_used:
                raise AssertionError("denominator bookkeeping out of sync")
            for j in range(idx, top):
                num = num * _binfac(a, P_plan, j)
        total = total + num
    total = total * pre
    return total, den


def _bounded_tuples(length: int, total: int):
    """All tuples of the given length of nonnegative ints with sum <= total."""
    if length == 0:
        yield ()
        return
    for head in range(total + 1):
        for rest in _bounded_tuples(length - 1, total - head):
            yield (head,) + rest


@dataclass(frozen=True)
class WatsonReport:
    equal: bool
    unit_sign: int
    unit_texp2: int
    residual: Optional[WT]


def _monomial_unit(x: WT, y: WT) -> Optional[Tuple[int, int]]:
    """(sign, texp2) with x == sign * t^(texp2/2) * y, or None."""
    if x.is_zero() and y.is_zero():
        return (1, 0)
    if x.is_zero() or y.is_zero():
        return None
    shift = x.min_texp2() - y.min_texp2()
    for sign in (1, -1):
        if x == y.shifted(shift).scaled(sign):
            return (sign, shift)
    return None


def _grid_params(spec: HypergeometricSpec) -> Tuple[int, int, int]:
    """Recover (k, a, b) from a spec built by ``watson_spec``."""
    a = spec.modulus
    k = (spec.truncation - 1) // 2
    p = (len(spec.upper) - 4) // 2
    if a == 1:
        b = p
    elif a == 2:
        b = p - 1
    else:
        b = p - a + 2
    if spec != watson_spec(k, a, b):
        raise ValidationError("spec does not match any grid specialization")
    return k, a, b


def watson_check(spec: HypergeometricSpec) -> WatsonReport:
    """Verify the specialized transformation encoded by ``spec``.

    ``spec`` must come from ``watson_spec(k, a, b)``.  Both sides are
    assembled as exact finite sums over ``(Q[w]/Phi_a(w))[t^{+-1/2}]`` after
    limit rewrites, and compared by cross-multiplication.  Equality is
    accepted up to a monomial unit ``+- t^e``, which is reported explicitly.
    """
    k, a, b = _grid_params(spec)
    slots = _watson_slots(k, a, b)
    lnum, lden = _phi_value(spec)
    rnum, rden = _watson_rhs(k, a, slots)
    x = lnum * rden
    y = rnum * lden
    unit = _monomial_unit(x, y)
    if unit is None:
        return WatsonReport(False, 1, 0, x - y)
    return WatsonReport(True, unit[0], unit[1], None)


# ---------------------------------------------------------------------------
# The finite rewritten sum (independent target for the series side)
# ---------------------------------------------------------------------------


def watson_display_sum(k: int, a: int, b: int) -> Tuple[WT, WT]:
    """The finite j-sum the series side must reproduce, as (num, den).

    Sum over j = 0..2k+1 of
      prod_{i<a} (w^i t^{-2k-1})_j / prod_{i<a} (w^i t)_j
      * t^{b j^2 + (a-2b) k j + (a-b-1) j} * (1 - t^{2j-2k-1}).
    """
    jmax = 2 * k + 1
    den = WT.one(a)
    for i in range(a):
        den = den * _poch_finite(a, Mono(wexp=i, texp2=2), jmax)
    total = WT.zero(a)
    for j in range(jmax + 1):
        num = WT.one(a)
        for i in range(a):
            num = num * _poch_finite(
                a, Mono(wexp=i, texp2=-2 * (2 * k + 1)), j
            )
        e2 = 2 * (b * j * j + (a - 2 * b) * k * j + (a - b - 1) * j)
        num = num * WT.term(a, 1, 0, e2)
        num = num * (WT.one(a) - WT.term(a, 1, 0, 2 * (2 * j - 2 * k - 1)))
        for i in range(a):
            for jj in range(j, jmax):
                num = num * _binfac(a, Mono(wexp=i, texp2=2), jj)
        total = total + num
    return total, den


def watson_display_check(k: int, a: int, b: int) -> bool:
    """The j-sum equals (1 - t^{-2k-1}) times the series side, exactly."""
    spec = watson_spec(k, a, b)
    lnum, lden = _phi_value(spec)
    dnum, dden = watson_display_sum(k, a, b)
    factor = WT.one(a) - WT.term(a, 1, 0, -2 * (2 * k + 1))
    return dnum * lden == factor * lnum * dden


# ---------------------------------------------------------------------------
# The nested sum with the root-of-unity symbol cleared
# ---------------------------------------------------------------------------


def _conjugate(el: WT, j: int) -> WT:
    """Apply the coefficient automorphism w -> w^j (gcd(j, a) = 1)."""
    a = el.a
    deg, _ = _field_data(a)
    out: Dict[int, Tuple[Fraction, ...]] = {}
    for e2, vec in el.terms.items():
        acc = [Fraction(0)] * deg
        for i, c in enumerate(vec):
            if c == 0:
                continue
            pw = _wvec_of_power(a, (i * j) % a)
            for pos, x in enumerate(pw):
                acc[pos] += c * x
        out[e2] = tuple(acc)
    return WT(a, out)


def _as_q_laurent(el: WT) -> QLaurent:
    """Convert a w-free element with integral t-powers to a plain Laurent
    polynomial in q (t = q^{1/a})."""
    a = el.a
    terms = []
    for e2, vec in el.terms.items():
        if any(x != 0 for x in vec[1:]):
            raise ArtifactError("unexpected w-dependence survived norm clearing")
        if e2 % 2:
            raise ArtifactError("unexpected half-integral power of t")
        terms.append((Fraction(e2, 2 * a), vec[0]))
    return QLaurent.from_frac_terms(terms)


@lru_cache(maxsize=None)
def watson_nested_sum(k: int, a: int, b: int) -> Tuple[QLaurent, QLaurent]:
    """The nested ``(p-1)``-fold sum as a ratio free of the order-``a`` symbol.

    The raw nested sum is a ratio of two Laurent polynomials in ``t^{1/2}``
    with coefficients in ``Q[w]/Phi_a(w)``.  Multiplying numerator and
    denominator by every nontrivial conjugate ``w -> w^j`` of the denominator
    makes the denominator symbol-free; the numerator then loses its
    ``w``-dependence as well.  That cancellation is a theorem, not a
    tautology, so it is checked on the fly and :class:`ArtifactError` is
    raised if any symbol content survives.

    Returns the pair ``(numerator, denominator)`` as Laurent polynomials in
    ``q`` on the ``q^{1/a}`` grid.
    """
    slots = _watson_slots(k, a, b)
    num, den = _watson_rhs(k, a, slots)
    for j in range(2, a):
        if gcd(j, a) != 1:
            continue
        cj = _conjugate(den, j)
        num = num * cj
        den = den * cj
    return _as_q_laurent(num), _as_q_laurent(den)
