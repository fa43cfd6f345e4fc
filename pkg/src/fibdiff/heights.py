"""Absolute logarithmic heights of rationals and of elements of Q(sqrt 5)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .errors import DomainError
from .realnum import (LOG_ALPHA, SQRT5, CertifiedReal, Expr, Ordering,
                      compare, evaluate, log)
from .sequences import fib, lucas


@dataclass(frozen=True)
class QuadraticNumber:
    """The number a + b*sqrt(5) with rational a, b."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def alpha_power(cls, k: int) -> "QuadraticNumber":
        """alpha**k = (L_k + F_k sqrt 5) / 2, valid for negative k too."""
        return cls(Fraction(lucas(k), 2), Fraction(fib(k), 2))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def expr(self) -> Expr:
        return self.a + self.b * SQRT5

    def minimal_polynomial(self) -> tuple[int, ...]:
        """Primitive integer coefficients, leading coefficient positive."""
        if self.is_rational:
            coeffs = [Fraction(1), -self.a]
        else:
            coeffs = [Fraction(1), -2 * self.a, self.norm()]
        den = math.lcm(*(c.denominator for c in coeffs))
        ints = [int(c * den) for c in coeffs]
        g = math.gcd(*ints)
        return tuple(c // g for c in ints)

    def __add__(self, other):
        other = _lift(other)
        return QuadraticNumber(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        return QuadraticNumber(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        return QuadraticNumber(self.a * other.a + 5 * self.b * other.b,
                               self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 5)")
        num = self * other.conjugate()
        return QuadraticNumber(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        return _lift(other) / self


def _lift(x) -> QuadraticNumber:
    if isinstance(x, QuadraticNumber):
        return x
    return QuadraticNumber(Fraction(x))


SQRT5_Q = QuadraticNumber(0, 1)
ALPHA_Q = QuadraticNumber(Fraction(1, 2), Fraction(1, 2))


@dataclass(frozen=True)
class HeightBound:
    value: CertifiedReal
    kind: Literal["exact", "upper-bound"]

    def __float__(self) -> float:
        return float(self.value)


def height_rational(r) -> HeightBound:
    """h(p/q) = log max(|p|, q) for p/q in lowest terms."""
    r = Fraction(r)
    top = max(abs(r.numerator), r.denominator)
    return HeightBound(evaluate(log(top)), "exact")


def _log_max_one(x: Expr) -> Expr | int:
    """log max(|x|, 1) for a value whose modulus is provably not 1."""
    mag = abs(x)
    order = compare(mag, 1)
    if order is Ordering.UNRESOLVED:
        raise DomainError(f"cannot decide whether |{x.render()}| exceeds 1")
    return log(mag) if order is Ordering.GREATER else 0


def height_quadratic(x: QuadraticNumber) -> HeightBound:
    """Exact height of an irrational element of Q(sqrt 5) via its minimal polynomial."""
    if x.is_rational:
        raise DomainError("rational argument: use height_rational")
    a0 = x.minimal_polynomial()[0]
    total = log(a0) + _log_max_one(x.expr()) + _log_max_one(x.conjugate().expr())
    return HeightBound(evaluate(total / 2), "exact")


def height_eta3_bound(d: int) -> HeightBound:
    """Upper bound (log 20 + d log alpha) / 2 on h(sqrt5 / (1 - alpha^-d))."""
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    return HeightBound(evaluate((log(20) + d * LOG_ALPHA) / 2), "upper-bound")


def eta3_log_abs_bound(d: int) -> CertifiedReal:
    """Companion bound |log eta_3| < log 5 + d log alpha."""
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    return evaluate(log(5) + d * LOG_ALPHA)


def eta3(d: int) -> QuadraticNumber:
    """sqrt5 * (1 - alpha^-d)^-1 as an exact element of Q(sqrt 5)."""
    return SQRT5_Q / (1 - QuadraticNumber.alpha_power(-d))
