"""Pure-Python arithmetic kernels.

These are the inner loops of the package: sparse Laurent multiplication and
dense cyclotomic-field multiplication.  A compiled twin (`_kernels`, built
from ``_kernels.pyx``) provides the same three functions with typed loops;
``_backend`` picks whichever is available at import time.

Coefficients are exact Python numbers (int or Fraction), so the kernels only
reorganize the loops — they never do float arithmetic.
"""


def laurent_mul(a, b):
    """Multiply two sparse Laurent polynomials given as {exponent: coeff} dicts.

    >>> laurent_mul({0: 1, 1: 1}, {0: 1, -1: 2})
    {0: 3, 1: 1, -1: 2}
    """
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            prev = out.get(e)
            out[e] = ca * cb if prev is None else prev + ca * cb
    return {e: c for e, c in out.items() if c}


def dense_mul(a, b):
    """School multiplication of dense coefficient lists (index = exponent)."""
    la, lb = len(a), len(b)
    out = [0] * (la + lb - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = out[i + j] + ai * bj
    return out


def poly_mod_reduce(vec, rows, deg):
    """Reduce a dense coefficient vector modulo a monic polynomial.

    ``rows[i]`` holds the length-``deg`` coefficient vector of
    ``x**(deg + i)`` reduced modulo the modulus.  Returns a list of length
    ``deg``.
    """
    n = len(vec)
    if n <= deg:
        return list(vec) + [0] * (deg - n)
    out = list(vec[:deg])
    for e in range(deg, n):
        c = vec[e]
        if c:
            row = rows[e - deg]
            for idx in range(deg):
                rc = row[idx]
                if rc:
                    out[idx] = out[idx] + c * rc
    return out


def cyc_mul(a, b, rows, deg):
    """Multiply two degree-< ``deg`` field elements modulo the minimal polynomial."""
    return poly_mod_reduce(dense_mul(a, b), rows, deg)
