"""Certified real arithmetic.

Values are closed intervals with exact dyadic-rational endpoints.  Every
operation rounds outward, so the true value of an expression always lies
inside the interval computed for it.  Expressions are kept as trees so a
consumer can ask for a tighter enclosure later by re-evaluating at a higher
working precision.

    >>> x = evaluate(ALPHA, Fraction(1, 10**10))
    >>> float(x)
    1.618033988749895
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import DomainError, PrecisionExhausted

START_PRECISION = 128
MAX_PRECISION = 16384

Number = Union[int, Fraction]

_PRECISION = contextvars.ContextVar("precision", default=(START_PRECISION, MAX_PRECISION))


@contextlib.contextmanager
def precision_limits(start: int, maximum: int):
    """Override the default precision ladder within a block."""
    if not 16 <= start <= maximum:
        raise ValueError(f"bad precision ladder {start}..{maximum}")
    token = _PRECISION.set((start, maximum))
    try:
        yield
    finally:
        _PRECISION.reset(token)


def default_precision() -> tuple[int, int]:
    return _PRECISION.get()


class _Unresolved(Exception):
    """Internal signal: the interval is too wide at this precision."""


# ---------------------------------------------------------------------------
# directed rounding


def round_down(x: Fraction, prec: int) -> Fraction:
    """Largest dyadic with about `prec` significant bits that is <= x."""
    if x == 0:
        return Fraction(0)
    n, d = x.numerator, x.denominator
    shift = prec - (abs(n).bit_length() - d.bit_length())
    if shift >= 0:
        return Fraction((n << shift) // d, 1 << shift)
    return Fraction((n // (d << -shift)) << -shift)


def round_up(x: Fraction, prec: int) -> Fraction:
    return -round_down(-x, prec)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Number) -> bool:
        return self.lo <= x <= self.hi

    def round(self, prec: int) -> "Interval":
        return Interval(round_down(self.lo, prec), round_up(self.hi, prec))

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        products = (self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(Fraction(0), max(-self.lo, self.hi))

    def __pow__(self, k: int) -> "Interval":
        if k < 0:
            return Interval.point(1) / self ** (-k)
        if k == 0:
            return Interval.point(1)
        a, b = self.lo ** k, self.hi ** k
        if k % 2 == 0:
            if self.lo >= 0:
                return Interval(a, b)
            if self.hi <= 0:
                return Interval(b, a)
            return Interval(Fraction(0), max(a, b))
        return Interval(a, b)


# ---------------------------------------------------------------------------
# elementary functions on rationals, fixed point with explicit error bounds


def _atanh_fixed(z: Fraction, w: int) -> tuple[int, int]:
    """atanh(z) * 2**w as (value, error) with |z| <= 1/3."""
    sign = -1 if z < 0 else 1
    a, b = abs(z.numerator), z.denominator
    a2, b2 = a * a, b * b
    term = (a << w) // b
    total = 0
    j = 0
    while term:
        total += term // (2 * j + 1)
        term = term * a2 // b2
        j += 1
    # each truncated power is off by < 2 ulp, each division adds < 1 ulp,
    # and the dropped tail is < 3 ulp because the next power is < 2 ulp.
    return sign * total, 3 * j + 4


@lru_cache(maxsize=64)
def _ln2_fixed(w: int) -> tuple[int, int]:
    value, err = _atanh_fixed(Fraction(1, 3), w)
    return 2 * value, 2 * err


def log_bounds(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Rigorous enclosure of log(x) for rational x > 0."""
    if x <= 0:
        raise DomainError(f"log of non-positive value {x}")
    if x == 1:
        return Fraction(0), Fraction(0)
    k = x.numerator.bit_length() - x.denominator.bit_length()
    y = x / Fraction(2) ** k
    if y > Fraction(4, 3):
        y /= 2
        k += 1
    elif y < Fraction(2, 3):
        y *= 2
        k -= 1
    w = prec + 32 + abs(k).bit_length()
    at, at_err = _atanh_fixed((y - 1) / (y + 1), w)
    ln2, ln2_err = _ln2_fixed(w)
    value = 2 * at + k * ln2
    err = 2 * at_err + abs(k) * ln2_err
    scale = 1 << w
    return (round_down(Fraction(value - err, scale), prec),
            round_up(Fraction(value + err, scale), prec))


def exp_bounds(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Rigorous enclosure of exp(x) for rational x."""
    if x == 0:
        return Fraction(1), Fraction(1)
    s = max(0, abs(x.numerator).bit_length() - x.denominator.bit_length() + 2)
    if abs(x) > 2 ** 40:
        raise DomainError("exp argument too large")
    r = x / (1 << s)
    w = prec + s + 40
    rn, rd = r.numerator, r.denominator
    term = 1 << w
    total = term
    j = 1
    while term:
        term = term * rn // (rd * j)
        total += term
        j += 1
    err = 2 * j + 6
    scale = 1 << w
    iv = Interval(Fraction(total - err, scale), Fraction(total + err, scale))
    iv = iv.round(w)
    for _ in range(s):
        iv = (iv * iv).round(w)
    return round_down(iv.lo, prec), round_up(iv.hi, prec)


def _sqrt_down(x: Fraction, prec: int) -> Fraction:
    if x <= 0:
        return Fraction(0)
    s = prec - (x.numerator.bit_length() - x.denominator.bit_length()) // 2
    if s >= 0:
        scaled = (x.numerator << (2 * s)) // x.denominator
        return Fraction(math.isqrt(scaled), 1 << s)
    scaled = x.numerator // (x.denominator << (-2 * s))
    return Fraction(math.isqrt(scaled) << -s)


def _sqrt_up(x: Fraction, prec: int) -> Fraction:
    if x <= 0:
        return Fraction(0)
    s = prec - (x.numerator.bit_length() - x.denominator.bit_length()) // 2
    if s >= 0:
        num, den = x.numerator << (2 * s), x.denominator
        unit = Fraction(1, 1 << s)
    else:
        num, den = x.numerator, x.denominator << (-2 * s)
        unit = Fraction(1 << -s)
    scaled = -(-num // den)
    root = math.isqrt(scaled)
    if root * root < scaled:
        root += 1
    return root * unit


# ---------------------------------------------------------------------------
# expression trees


class Expr:
    """Node of a real-valued expression tree.

    Nodes are immutable and hashable; evaluation results are memoised per
    (node, precision).
    """

    __slots__ = ("_key", "_hash")

    def __init__(self, key: tuple):
        self._key = key
        self._hash = hash(key)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr) or self._hash != other._hash:
            return False
        return self._key == other._key

    def __repr__(self) -> str:
        return self.render()

    def render(self) -> str:
        raise NotImplementedError

    def _interval(self, prec: int) -> Interval:
        raise NotImplementedError

    def __add__(self, other):
        return Binary("+", self, as_expr(other))

    def __radd__(self, other):
        return Binary("+", as_expr(other), self)

    def __sub__(self, other):
        return Binary("-", self, as_expr(other))

    def __rsub__(self, other):
        return Binary("-", as_expr(other), self)

    def __mul__(self, other):
        return Binary("*", self, as_expr(other))

    def __rmul__(self, other):
        return Binary("*", as_expr(other), self)

    def __truediv__(self, other):
        return Binary("/", self, as_expr(other))

    def __rtruediv__(self, other):
        return Binary("/", as_expr(other), self)

    def __neg__(self):
        return Unary("neg", self)

    def __abs__(self):
        return Unary("abs", self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        return Power(self, k)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number | str):
        self.value = Fraction(value)
        super().__init__(("const", self.value))

    def render(self) -> str:
        return str(self.value)

    def _interval(self, prec: int) -> Interval:
        return Interval.point(self.value)


class Unary(Expr):
    __slots__ = ("op", "arg")
    OPS = ("neg", "abs", "sqrt", "log", "exp")

    def __init__(self, op: str, arg: Expr):
        if op not in self.OPS:
            raise ValueError(op)
        self.op, self.arg = op, arg
        super().__init__((op, arg))

    def render(self) -> str:
        if self.op == "neg":
            return f"-({self.arg.render()})"
        return f"{self.op}({self.arg.render()})"

    def _interval(self, prec: int) -> Interval:
        x = _eval(self.arg, prec)
        if self.op == "neg":
            return -x
        if self.op == "abs":
            return abs(x)
        if self.op == "sqrt":
            if x.hi < 0:
                raise DomainError(f"sqrt of negative value {self.arg.render()}")
            if x.lo < 0:
                raise _Unresolved
            return Interval(_sqrt_down(x.lo, prec), _sqrt_up(x.hi, prec))
        if self.op == "log":
            if x.hi <= 0:
                raise DomainError(f"log of non-positive value {self.arg.render()}")
            if x.lo <= 0:
                raise _Unresolved
            return Interval(log_bounds(x.lo, prec)[0], log_bounds(x.hi, prec)[1])
        return Interval(exp_bounds(x.lo, prec)[0], exp_bounds(x.hi, prec)[1])


class Binary(Expr):
    __slots__ = ("op", "left", "right")

    def __init__(self, op: str, left: Expr, right: Expr):
        if op not in "+-*/":
            raise ValueError(op)
        self.op, self.left, self.right = op, left, right
        super().__init__((op, left, right))

    def render(self) -> str:
        return f"({self.left.render()} {self.op} {self.right.render()})"

    def _interval(self, prec: int) -> Interval:
        a = _eval(self.left, prec)
        b = _eval(self.right, prec)
        if self.op == "+":
            return (a + b).round(prec)
        if self.op == "-":
            return (a - b).round(prec)
        if self.op == "*":
            return (a * b).round(prec)
        if b.lo <= 0 <= b.hi:
            if b.lo == b.hi == 0:
                raise DomainError(f"division by zero in {self.render()}")
            raise _Unresolved
        return (a / b).round(prec)


class Power(Expr):
    __slots__ = ("base", "k")

    def __init__(self, base: Expr, k: int):
        self.base, self.k = base, k
        super().__init__(("pow", base, k))

    def render(self) -> str:
        return f"({self.base.render()})^{self.k}"

    def _interval(self, prec: int) -> Interval:
        x = _eval(self.base, prec)
        if self.k < 0 and x.lo <= 0 <= x.hi:
            if x.lo == x.hi == 0:
                raise DomainError("negative power of zero")
            raise _Unresolved
        # a few guard bits per squaring keep the relative error in check
        guard = prec + 2 * abs(self.k).bit_length() + 8
        return (x.round(guard) ** self.k).round(prec)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, CertifiedReal):
        return x.expr
    if isinstance(x, (int, Fraction, str)):
        return Const(x)
    raise TypeError(f"cannot build an expression from {type(x).__name__}")


def sqrt(x) -> Expr:
    return Unary("sqrt", as_expr(x))


def log(x) -> Expr:
    return Unary("log", as_expr(x))


def exp(x) -> Expr:
    return Unary("exp", as_expr(x))


@lru_cache(maxsize=1 << 16)
def _eval(node: Expr, prec: int) -> Interval:
    return node._interval(prec)


# ---------------------------------------------------------------------------
# certified values


@dataclass(frozen=True)
class CertifiedReal:
    """An enclosure [lo, hi] of the value of `expr`, computed at `precision` bits."""

    lo: Fraction
    hi: Fraction
    expr: Expr
    precision: int

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x: Number) -> bool:
        return self.lo <= x <= self.hi

    def refine(self, target_width: Number, max_precision: int | None = None) -> "CertifiedReal":
        if self.width <= target_width:
            return self
        return evaluate(self.expr, target_width, start_precision=self.precision * 2,
                        max_precision=max_precision)

    def at_precision(self, prec: int) -> "CertifiedReal":
        return evaluate(self.expr, start_precision=prec)

    def decimal(self, digits: int = 12) -> str:
        return decimal_string(self.mid, digits)

    def _combine(self, other, fn) -> "CertifiedReal":
        prec = max(self.precision, getattr(other, "precision", 0))
        return evaluate(fn(self.expr, as_expr(other)), start_precision=prec)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._combine(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._combine(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._combine(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._combine(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._combine(other, lambda a, b: b / a)

    def __neg__(self):
        return CertifiedReal(-self.hi, -self.lo, -self.expr, self.precision)

    def __repr__(self) -> str:
        return f"CertifiedReal({self.decimal()} ± {float(self.width / 2):.3g})"


def evaluate(expr, target_width: Number | None = None, *,
             start_precision: int | None = None,
             max_precision: int | None = None) -> CertifiedReal:
    """Enclose `expr`, doubling the working precision until the width fits.

    Without a target width the first precision at which every operation is
    well defined is accepted.
    """
    expr = as_expr(expr)
    default_start, default_max = _PRECISION.get()
    start_precision = default_start if start_precision is None else start_precision
    max_precision = default_max if max_precision is None else max(max_precision, start_precision)
    prec = max(start_precision, 16)
    while True:
        try:
            iv = _eval(expr, prec)
        except _Unresolved:
            pass
        else:
            if target_width is None or iv.width <= target_width:
                return CertifiedReal(iv.lo, iv.hi, expr, prec)
        if prec >= max_precision:
            raise PrecisionExhausted(
                f"could not enclose {expr.render()} at {max_precision} bits")
        prec = min(prec * 2, max_precision)


def certified(x) -> CertifiedReal:
    if isinstance(x, CertifiedReal):
        return x
    return evaluate(as_expr(x))


SQRT5 = sqrt(5)
ALPHA = (1 + SQRT5) / 2
BETA = (1 - SQRT5) / 2
LOG_ALPHA = log(ALPHA)


class Ordering(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    UNRESOLVED = "unresolved"


def compare(x, y, max_precision: int | None = None) -> Ordering:
    """Certified ordering of two reals; UNRESOLVED when they cannot be separated.

    Identical expressions are reported UNRESOLVED at once since no amount of
    precision separates a value from itself.
    """
    ex, ey = as_expr(x), as_expr(y)
    if ex == ey:
        return Ordering.UNRESOLVED
    diff = ex - ey
    start, cap = _PRECISION.get()
    max_precision = cap if max_precision is None else max_precision
    prec = max(getattr(x, "precision", start), getattr(y, "precision", start))
    while True:
        try:
            iv = _eval(diff, prec)
        except _Unresolved:
            iv = None
        if iv is not None:
            if iv.hi < 0:
                return Ordering.LESS
            if iv.lo > 0:
                return Ordering.GREATER
        if prec >= max_precision:
            return Ordering.UNRESOLVED
        prec = min(prec * 2, max_precision)


def certify_less(x, y, max_precision: int | None = None) -> bool:
    return compare(x, y, max_precision) is Ordering.LESS


def certify_leq(x, y, max_precision: int | None = None) -> bool:
    """True when x <= y is certified; exact equality of rationals or of
    identical expressions counts."""
    ex, ey = as_expr(x), as_expr(y)
    if ex == ey:
        return True
    if isinstance(ex, Const) and isinstance(ey, Const):
        return ex.value <= ey.value
    return compare(ex, ey, max_precision) is Ordering.LESS


@dataclass(frozen=True)
class SignedDistance:
    """Distance ||x|| from x to the nearest integer, with that integer."""

    value: CertifiedReal
    nearest: int
    sign: int  # sign of x - nearest; 0 when it could not be decided


def nearest_int_distance(x, max_precision: int | None = None) -> SignedDistance:
    x = certified(x)
    max_precision = _PRECISION.get()[1] if max_precision is None else max_precision
    half = Fraction(1, 2)
    prec = x.precision
    while True:
        n_lo = math.floor(x.lo + half)
        if x.lo > n_lo - half and x.hi < n_lo + half:
            break
        if prec >= max_precision:
            raise PrecisionExhausted(
                f"nearest integer of {x.expr.render()} undecided at {max_precision} bits")
        prec = min(prec * 2, max_precision)
        x = x.at_precision(prec)
    shifted = x.expr - n_lo
    value = evaluate(abs(shifted), start_precision=x.precision)
    sign = 1 if x.lo > n_lo else -1 if x.hi < n_lo else 0
    return SignedDistance(value, n_lo, sign)


def decimal_string(x: Fraction, digits: int = 12) -> str:
    """Round-to-nearest scientific rendering with `digits` significant digits."""
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    e = len(str(x.numerator)) - len(str(x.denominator))
    if Fraction(10) ** e > x:
        e -= 1
    if Fraction(10) ** (e + 1) <= x:
        e += 1
    scaled = x / Fraction(10) ** (e - digits + 1)
    m = math.floor(scaled + Fraction(1, 2))
    if m >= 10 ** digits:
        m //= 10
        e += 1
    s = str(m)
    body = s[0] + ("." + s[1:] if len(s) > 1 else "")
    return f"{sign}{body}e{e:+d}"
