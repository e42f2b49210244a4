"""Colored Jones data for link families with closed formulas.

Covers the unknot and the twist-knot family, in two bases:

* the *colored* basis, indexed by a positive color ``n`` per component;
* the *cyclotomic* basis ``P'_k``, in which a zero-framed algebraically
  split link has coefficients lying in a known principal ideal.

The bridge between the two is the expansion

    J(n_1, ..., n_m) = sum over 0 <= k_i <= n_i - 1 of
        coeff(k_1, ..., k_m) * prod_i qbinom(n_i + k_i, 2 k_i + 1) {k_i}!

which is triangular in each color, so the cyclotomic coefficients of a
knot can be recovered from finitely many colored values.

Only families with closed formulas are provided; there is no
general-diagram colored Jones computation here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .errors import NonDivisible
from .qring import (
    ONE,
    QLaurent,
    ZERO,
    div_exact,
    gauss_binom,
    habiro_divisor,
    q_power,
    qbinom,
    qfact,
)

__all__ = [
    "HabiroCoefficients",
    "habiro_basis_elem",
    "habiro_expand",
    "habiro_coeffs_from_colored",
    "q_multinomial",
    "twist_knot_coeff",
    "twist_knot_coeffs",
    "unknot_coeffs",
]


@lru_cache(maxsize=None)
def habiro_basis_elem(n: int, k: int) -> QLaurent:
    """The colored value of the basis element ``P'_k`` at color ``n``.

    ``B(n, k) = qbinom(n + k, 2k + 1) * {k}!``; vanishes for ``k >= n``,
    and ``B(n, n - 1) = {n - 1}!`` (the leading entry of the triangular
    change of basis).
    """
    return qbinom(n + k, 2 * k + 1) * qfact(k)


@dataclass(frozen=True)
class HabiroCoefficients:
    """Cyclotomic-basis coefficients of a zero-framed algebraically split link.

    ``coeffs`` maps a multi-index ``(k_1, ..., k_m)`` to the coefficient of
    ``P'_{k_1} x ... x P'_{k_m}``.  Every key has length ``num_components``.

    Each coefficient of an honest such link is divisible by
    ``{2k+1}!/({k}! {1})`` where ``k = max k_i``; :meth:`validate` enforces
    this (it is a theorem, not a convention, so violation means bad data).
    """

    coeffs: Mapping[Tuple[int, ...], QLaurent]
    num_components: int

    @classmethod
    def of_knot(cls, table: Mapping[int, QLaurent] | Sequence[QLaurent]):
        """Build a one-component table from ``{k: coeff}`` or ``[c_0, c_1, ...]``."""
        if isinstance(table, Mapping):
            items = table.items()
        else:
            items = enumerate(table)
        coeffs = {(int(k),): v for k, v in items if not v.is_zero()}
        return cls(coeffs=coeffs, num_components=1)

    def __post_init__(self):
        for key in self.coeffs:
            if len(key) != self.num_components:
                raise ValueError(
                    f"multi-index {key} has length {len(key)}, "
                    f"expected {self.num_components}"
                )
            if any(k < 0 for k in key):
                raise ValueError(f"negative index in {key}")

    def coeff(self, key: Tuple[int, ...]) -> QLaurent:
        return self.coeffs.get(tuple(key), ZERO)

    def max_index(self) -> int:
        return max((max(key) for key in self.coeffs), default=0)

    def validate(self) -> None:
        """Check integrality and the ideal-membership property of every entry.

        Raises :class:`NonDivisible` if some coefficient is not an integer
        Laurent polynomial in ``q^(1/2)`` divisible by ``{2k+1}!/({k}! {1})``
        with ``k = max k_i``.
        """
        for key, value in sorted(self.coeffs.items()):
            if value.is_zero():
                continue
            if any(
                isinstance(c, Fraction) and c.denominator != 1
                for c in value.terms_dict().values()
            ):
                raise NonDivisible(f"coefficient at {key} is not integral")
            if any(e.denominator > 2 for e, _ in value.frac_items()):
                raise NonDivisible(
                    f"coefficient at {key} has exponents outside (1/2)Z"
                )
            k = max(key)
            try:
                div_exact(value, habiro_divisor(k))
            except NonDivisible as exc:
                raise NonDivisible(
                    f"coefficient at {key} fails divisibility by "
                    f"{{2k+1}}!/({{k}}! {{1}}) for k={k}"
                ) from exc

    def to_json(self) -> list:
        return [
            {"k": list(key), "coeff": value.to_json()}
            for key, value in sorted(self.coeffs.items())
        ]

    @classmethod
    def from_json(cls, data: Iterable[dict]) -> "HabiroCoefficients":
        coeffs: Dict[Tuple[int, ...], QLaurent] = {}
        m = None
        for entry in data:
            key = tuple(int(k) for k in entry["k"])
            if m is None:
                m = len(key)
            coeffs[key] = QLaurent.from_json(entry["coeff"])
        return cls(coeffs=coeffs, num_components=m if m is not None else 1)


def unknot_coeffs() -> HabiroCoefficients:
    """The zero-framed unknot: ``P'_0`` coefficient 1, nothing else."""
    return HabiroCoefficients.of_knot({0: ONE})


def habiro_expand(
    coeffs: HabiroCoefficients, colors: Sequence[int]
) -> QLaurent:
    """Colored value of a link given its cyclotomic-basis coefficients.

    ``J(n_1, ..., n_m) = sum coeffs(k) * prod_i B(n_i, k_i)``; the basis
    element vanishes for ``k_i >= n_i`` so the sum truncates itself.
    """
    colors = tuple(int(n) for n in colors)
    if len(colors) != coeffs.num_components:
        raise ValueError(
            f"{len(colors)} colors for {coeffs.num_components} components"
        )
    if any(n <= 0 for n in colors):
        raise ValueError("colors must be positive")
    total = ZERO
    for key, value in coeffs.coeffs.items():
        if any(k >= n for k, n in zip(key, colors)):
            continue
        term = value
        for k, n in zip(key, colors):
            term = term * habiro_basis_elem(n, k)
        total = total + term
    return total


def habiro_coeffs_from_colored(
    values: Sequence[QLaurent], N: int
) -> HabiroCoefficients:
    """Invert the triangular expansion for a knot from colored values.

    ``values[i]`` is the colored value at color ``i + 1`` for ``i < N``.
    Returns the unique coefficients ``c_0 .. c_{N-1}`` reproducing them.
    The back-substitution divides by ``{n-1}!`` at each step; if the
    division is not exact the inputs are not the colored values of a
    single knot, and :class:`NonDivisible` is raised.
    """
    if len(values) < N:
        raise ValueError(f"need {N} colored values, got {len(values)}")
    solved: List[QLaurent] = []
    for n in range(1, N + 1):
        residual = values[n - 1]
        for k in range(n - 1):
            residual = residual - solved[k] * habiro_basis_elem(n, k)
        try:
            solved.append(div_exact(residual, qfact(n - 1)))
        except NonDivisible as exc:
            raise NonDivisible(
                f"colored values inconsistent at color {n}: "
                f"back-substitution residual not divisible by {{n-1}}!"
            ) from exc
    return HabiroCoefficients.of_knot(solved)


def q_multinomial(n: int, parts: Sequence[int]) -> QLaurent:
    """Gaussian multinomial ``(q)_n / prod_j (q)_{parts_j}``.

    Computed as a chain of Gaussian binomials, so the result is manifestly
    a polynomial with nonnegative integer coefficients.  ``parts`` must be
    nonnegative and sum to ``n``.
    """
    if any(p < 0 for p in parts):
        raise ValueError("parts must be nonnegative")
    if sum(parts) != n:
        raise ValueError("parts must sum to n")
    result = ONE
    remaining = n
    for p in parts:
        result = result * gauss_binom(remaining, p)
        remaining -= p
    return result


def _compositions(n: int, p: int):
    """All ordered tuples of ``p`` nonnegative integers summing to ``n``."""
    if p == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, p - 1):
            yield (first,) + rest


def _twist_multisum(p: int, n: int) -> QLaurent:
    """``sum over i_1+...+i_p = n of q^(sum_{j<p}(s_j^2+s_j)) (q)_n/prod (q)_{i_j}``
    with ``s_j = i_1 + ... + i_j`` (the final full sum excluded)."""
    total = ZERO
    for comp in _compositions(n, p):
        expo = 0
        s = 0
        for part in comp[:-1]:
            s += part
            expo += s * s + s
        total = total + q_power(expo) * q_multinomial(n, comp)
    return total


@lru_cache(maxsize=None)
def twist_knot_coeff(p: int, k: int) -> QLaurent:
    """Cyclotomic-basis coefficient at index ``k`` of the twist knot ``K_p``.

    ``K_1`` is the right trefoil and ``K_{-1}`` the figure eight.  For
    ``p > 0``::

        c_k = (-1)^k q^(k(k+3)/2) M_p(q, k) * {2k+1}!/({k}! {1})

    where ``M_p`` is the multi-sum over compositions computed by
    :func:`_twist_multisum`.  For ``p < 0`` the rule is: use ``|p|``,
    substitute ``q -> q^(-1)`` inside ``M``, drop the monomial prefactor,
    and absorb the sign — leaving ``c_k = M_{|p|}(q^(-1), k) *
    {2k+1}!/({k}! {1})``.  Both branches are validated against
    independently computed colored values (trefoil and figure eight).
    """
    if p == 0:
        raise ValueError("p must be nonzero (p=0 is the unknot family edge)")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return ONE
    divisor = habiro_divisor(k)
    if p > 0:
        sign = -1 if k % 2 else 1
        prefactor = q_power(Fraction(k * (k + 3), 2)) * sign
        return prefactor * _twist_multisum(p, k) * divisor
    mirrored = _twist_multisum(-p, k).substitute_power(-1)
    return mirrored * divisor


def twist_knot_coeffs(p: int, k_max: int) -> HabiroCoefficients:
    """Validated coefficient table for ``K_p`` with indices ``0 .. k_max``."""
    table = HabiroCoefficients.of_knot(
        {k: twist_knot_coeff(p, k) for k in range(k_max + 1)}
    )
    table.validate()
    return table
