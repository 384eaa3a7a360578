"""Exact argument reduction modulo 2*pi, shared by both kernel backends."""

from fractions import Fraction
from functools import lru_cache

# 2*pi to 60 decimal digits; exact rational arithmetic below makes the
# reduction error independent of the size of x.
_TWO_PI = Fraction(
    "6.283185307179586476925286766559005768394338798750211641949889185"
)


@lru_cache(maxsize=4096)
def reduce_mod_2pi(x: float) -> float:
    """Return x mod 2*pi with absolute error ~1 ulp regardless of |x|."""
    return float(Fraction(x) % _TWO_PI)
