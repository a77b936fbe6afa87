"""Exact rational arithmetic helpers.

The public API of every module speaks fractions.Fraction.  Inner loops
(simplex pivots, flow augmentation) may use gmpy2.mpq when available; the
two types interoperate (mixed arithmetic, ==, hash) so callers never see
the difference.  No floating point anywhere.
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as RAT

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover
    RAT = Fraction
    HAVE_GMPY2 = False

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(q):
    """Normalize any exact rational (mpq, int, Fraction) to Fraction.

    Fractions built from mpq parts can carry mpz internals, which leak
    into mixed arithmetic later; rebuild those on plain ints too.
    """
    if isinstance(q, Fraction):
        if isinstance(q.numerator, int) and isinstance(q.denominator, int):
            return q
        return Fraction(int(q.numerator), int(q.denominator))
    if isinstance(q, int):
        return Fraction(q)
    return Fraction(int(q.numerator), int(q.denominator))


def parse_rational(token):
    """Parse 'p/q' or integer text to Fraction.  Raises ValueError on junk."""
    return Fraction(token)


def format_rational(q):
    """Render exactly: integers without denominator, otherwise p/q."""
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
