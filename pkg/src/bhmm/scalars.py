"""Scalar arithmetic shared by every module.

Exact values are arbitrary-precision rationals: ``gmpy2.mpq`` when available
(much faster), ``fractions.Fraction`` otherwise.  Integers are normalized to
the rational type on entry so that division never silently produces a float.
Float mode works on IEEE doubles; every equality, zero, or range check then
uses a relative tolerance instead of exact comparison.

Square roots of nonnegative rationals that are not perfect squares are kept
exact as :class:`QuadExt` values ``x + y*sqrt(d)``.  Arithmetic closes over
the field Q(sqrt(d)), and any result whose surd part cancels collapses back
to a plain rational, so polynomial identities in ``d`` come out exactly
rational again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

try:
    import gmpy2
    from gmpy2 import mpq as _mpq

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    gmpy2 = None
    _mpq = None
    _HAVE_GMPY2 = False

DEFAULT_TOL = 1e-9
DEFAULT_GUARD_TOL = 1e-8

if _HAVE_GMPY2:
    RATIONAL_TYPES = (int, Fraction, type(_mpq()))
else:
    RATIONAL_TYPES = (int, Fraction)


def rational(num=0, den=1):
    """Exact rational scalar."""
    if _HAVE_GMPY2:
        return _mpq(num, den)
    return Fraction(num, den)


def is_rational(x) -> bool:
    return isinstance(x, RATIONAL_TYPES) and not isinstance(x, bool)


def is_exact(x) -> bool:
    """True for values carrying exact semantics (rationals and surds)."""
    return is_rational(x) or isinstance(x, QuadExt)


def to_float(x) -> float:
    return float(x)


def _intsqrt(k):
    if _HAVE_GMPY2:
        return gmpy2.isqrt(k)
    return math.isqrt(int(k))


def exact_sqrt(v):
    """Square root of a nonnegative scalar, kept exact for rationals.

    Returns a rational when ``v`` is a perfect square, a :class:`QuadExt`
    surd otherwise, and a float for float input.  Negative input raises
    ``ValueError``.
    """
    if isinstance(v, float):
        if v < 0:
            raise ValueError("square root of negative value")
        return math.sqrt(v)
    if not is_rational(v):
        raise TypeError(f"cannot take exact square root of {type(v).__name__}")
    if v < 0:
        raise ValueError("square root of negative value")
    if v == 0:
        return rational(0)
    num, den = v.numerator, v.denominator
    rn, rd = _intsqrt(num), _intsqrt(den)
    if rn * rn == num and rd * rd == den:
        return rational(rn, rd)
    return QuadExt(rational(0), rational(1), rational(v))


def _quad(x, y, d):
    """Build x + y*sqrt(d), collapsing to a rational when y vanishes."""
    if y == 0:
        return x
    return QuadExt(x, y, d)


@dataclass(frozen=True)
class QuadExt:
    """Exact value ``x + y*sqrt(d)`` with rational x, y and non-square d > 0."""

    x: object
    y: object
    d: object

    def _compatible(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise TypeError("cannot mix surds over different radicands")
            return other.x, other.y
        if is_rational(other):
            return rational(other), rational(0)
        return None

    def __add__(self, other):
        parts = self._compatible(other)
        if parts is None:
            return NotImplemented
        ox, oy = parts
        return _quad(self.x + ox, self.y + oy, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.x, -self.y, self.d)

    def __sub__(self, other):
        parts = self._compatible(other)
        if parts is None:
            return NotImplemented
        ox, oy = parts
        return _quad(self.x - ox, self.y - oy, self.d)

    def __rsub__(self, other):
        parts = self._compatible(other)
        if parts is None:
            return NotImplemented
        ox, oy = parts
        return _quad(ox - self.x, oy - self.y, self.d)

    def __mul__(self, other):
        parts = self._compatible(other)
        if parts is None:
            return NotImplemented
        ox, oy = parts
        return _quad(
            self.x * ox + self.y * oy * self.d,
            self.x * oy + self.y * ox,
            self.d,
        )

    __rmul__ = __mul__

    def _inverse(self):
        norm = self.x * self.x - self.y * self.y * self.d
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        return _quad(self.x / norm, -self.y / norm, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadExt):
            return self * other._inverse()
        if is_rational(other):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return _quad(self.x / other, self.y / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        parts = self._compatible(other)
        if parts is None:
            return NotImplemented
        ox, oy = parts
        return _quad(ox, oy, self.d) * self._inverse()

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        out = rational(1)
        for _ in range(exponent):
            out = self * out
        return out

    def _sign(self):
        sx = (self.x > 0) - (self.x < 0)
        sy = (self.y > 0) - (self.y < 0)
        if sy == 0:
            return sx
        if sx == 0 or sx == sy:
            return sy
        # Opposite signs: compare |x| against |y|*sqrt(d) exactly.
        lhs = self.x * self.x
        rhs = self.y * self.y * self.d
        if lhs == rhs:
            return 0
        return sx if lhs > rhs else sy

    def _diff_sign(self, other):
        diff = self - other
        if isinstance(diff, QuadExt):
            return diff._sign()
        return (diff > 0) - (diff < 0)

    def __lt__(self, other):
        return self._diff_sign(other) < 0

    def __le__(self, other):
        return self._diff_sign(other) <= 0

    def __gt__(self, other):
        return self._diff_sign(other) > 0

    def __ge__(self, other):
        return self._diff_sign(other) >= 0

    def __float__(self):
        return float(self.x) + float(self.y) * math.sqrt(float(self.d))

    def __str__(self):
        return f"{self.x}+({self.y})*sqrt({self.d})"


def unify_scalars(values):
    """Normalize a flat sequence to one arithmetic family.

    Any float makes the whole sequence float; otherwise ints are promoted to
    the exact rational type and surds pass through unchanged.
    """
    vals = list(values)
    if any(isinstance(v, float) for v in vals):
        return tuple(to_float(v) for v in vals)
    out = []
    for v in vals:
        if isinstance(v, QuadExt):
            out.append(v)
        elif is_rational(v):
            out.append(rational(v))
        else:
            raise TypeError(f"unsupported scalar type {type(v).__name__}")
    return tuple(out)


def scalar_eq(x, y, tol: float = DEFAULT_TOL) -> bool:
    """Equality test: exact for exact scalars, relative tolerance for floats."""
    if isinstance(x, float) or isinstance(y, float):
        fx, fy = to_float(x), to_float(y)
        return abs(fx - fy) <= tol * max(1.0, abs(fx), abs(fy))
    return x == y


def vector_eq(xs, ys, tol: float = DEFAULT_TOL) -> bool:
    xs, ys = tuple(xs), tuple(ys)
    if len(xs) != len(ys):
        return False
    return all(scalar_eq(x, y, tol) for x, y in zip(xs, ys))


def is_zero(x, tol: float = DEFAULT_TOL) -> bool:
    return scalar_eq(x, 0, tol)


def guard_ok(numerator, denominator, tol: float = DEFAULT_GUARD_TOL) -> bool:
    """Whether a recovery denominator is safely nonzero.

    Exact scalars only need ``denominator != 0``; floats require
    ``|den| > tol * (1 + |num|)`` so that near-singular divisions are routed
    to a degenerate-stratum fallback instead of amplifying noise.
    """
    if isinstance(numerator, float) or isinstance(denominator, float):
        return abs(to_float(denominator)) > tol * (1.0 + abs(to_float(numerator)))
    return denominator != 0


def in_unit_interval(x, tol: float = DEFAULT_TOL) -> bool:
    """Range check for stochastic entries; floats get a tolerance collar."""
    if isinstance(x, float):
        return -tol <= x <= 1.0 + tol
    return 0 <= x <= 1


def parse_scalar(value, exact: bool = True):
    """Read a JSON-level scalar (string like ``"3/4"``, int, or number).

    In exact mode decimal text and floats are read as decimal literals, so
    ``0.1`` means 1/10 rather than its binary approximation.
    """
    if isinstance(value, bool):
        raise ValueError("boolean is not a scalar")
    if exact:
        if isinstance(value, str):
            return rational(Fraction(value))
        if isinstance(value, int):
            return rational(value)
        if isinstance(value, float):
            return rational(Fraction(str(value)))
        raise ValueError(f"cannot parse scalar from {type(value).__name__}")
    if isinstance(value, str):
        return float(Fraction(value))
    if isinstance(value, (int, float)):
        return float(value)
    raise ValueError(f"cannot parse scalar from {type(value).__name__}")


def format_scalar(x):
    """Render a scalar for JSON: exact values as strings, floats as floats."""
    if isinstance(x, float):
        return x
    if isinstance(x, QuadExt):
        return str(x)
    return str(rational(x))
