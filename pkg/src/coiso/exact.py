"""Exact rational arithmetic backend.

All contract-bearing numbers in this package are exact rationals.  gmpy2's
mpq is used when available (it is a drop-in for Fraction here and roughly an
order of magnitude faster); fractions.Fraction is the fallback.  Both expose
.numerator/.denominator and print as "p/q" or "p", which is the serialized
form everywhere.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as RAT
except ImportError:  # pragma: no cover - gmpy2 is normally present
    RAT = Fraction

ZERO = RAT(0)
ONE = RAT(1)


def rat(p, q=None):
    """Build an exact rational from ints, a rational, or a 'p/q' string."""
    if q is not None:
        return RAT(p, q)
    if isinstance(p, str):
        if "/" in p:
            num, den = p.split("/")
            return RAT(int(num), int(den))
        return RAT(int(p))
    if isinstance(p, float):
        raise TypeError("floats are not accepted as exact rationals: %r" % (p,))
    return RAT(p)


def rat_str(x) -> str:
    """Serialize an exact rational as 'p/q' (or 'p' when integral)."""
    return str(RAT(x))


def rat_floor(x) -> int:
    """Floor of an exact rational, as a python int."""
    x = RAT(x)
    return int(x.numerator // x.denominator)


def rat_frac(x):
    """Fractional part in [0, 1)."""
    x = RAT(x)
    return x - rat_floor(x)


def is_integral(x) -> bool:
    return RAT(x).denominator == 1
