"""Exact Fibonacci and Lucas numbers and the identities the proof relies on."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

from .errors import CapacityError, DomainError

INDEX_CAP = 10 ** 6


def _check_index(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"sequence index must be an int, got {type(n).__name__}")
    if abs(n) > INDEX_CAP:
        raise CapacityError(f"|{n}| exceeds the index cap {INDEX_CAP}")
    return n


@lru_cache(maxsize=4096)
def _fib_pair(n: int) -> tuple[int, int]:
    """(F_n, F_{n+1}) by fast doubling, n >= 0."""
    if n == 0:
        return 0, 1
    a, b = _fib_pair(n >> 1)
    c = a * (2 * b - a)
    d = a * a + b * b
    return (d, c + d) if n & 1 else (c, d)


def fib(n: int) -> int:
    """F_n for any integer n, using F_{-n} = (-1)^(n+1) F_n."""
    _check_index(n)
    if n < 0:
        value = _fib_pair(-n)[0]
        return value if (-n) % 2 == 1 else -value
    return _fib_pair(n)[0]


def lucas(n: int) -> int:
    """L_n for any integer n, using L_{-n} = (-1)^n L_n."""
    _check_index(n)
    k = abs(n)
    f, f1 = _fib_pair(k)
    value = 2 * f1 - f
    if n < 0 and k % 2 == 1:
        return -value
    return value


class Factorization(NamedTuple):
    fib_index: int
    lucas_index: int
    rule: str  # "A": n = m (mod 4), "B": n = m + 2 (mod 4)


def diff_factorization(n: int, m: int) -> Factorization:
    """Indices (i, j) with F_n - F_m = F_i * L_j, for n = m (mod 2).

    >>> diff_factorization(9, 1)
    Factorization(fib_index=4, lucas_index=5, rule='A')
    """
    _check_index(n)
    _check_index(m)
    if not n > m >= 0:
        raise DomainError(f"need n > m >= 0, got n={n}, m={m}")
    if (n - m) % 2:
        raise DomainError(f"n={n} and m={m} have different parity")
    if (n - m) % 4 == 0:
        return Factorization((n - m) // 2, (n + m) // 2, "A")
    return Factorization((n + m) // 2, (n - m) // 2, "B")


def prime_power_exponent(x: int, p: int) -> Optional[int]:
    """Return a with x == p**a, or None.  `p` is trusted to be prime."""
    if x < 1:
        raise DomainError(f"prime_power_exponent needs x >= 1, got {x}")
    if p < 2:
        raise DomainError(f"not a prime: {p}")
    a = 0
    while x % p == 0:
        x //= p
        a += 1
    return a if x == 1 else None


@dataclass(frozen=True)
class SolutionTriple:
    """A triple (n, m, a) standing for F_n - F_m = p^a."""

    n: int
    m: int
    a: int

    def __post_init__(self):
        _check_index(self.n)
        _check_index(self.m)
        if not self.n > self.m >= 0:
            raise DomainError(f"need n > m >= 0, got {self}")
        if self.a < 0:
            raise DomainError(f"negative exponent in {self}")

    def holds(self, p: int) -> bool:
        return fib(self.n) - fib(self.m) == p ** self.a

    def as_list(self) -> list[int]:
        return [self.n, self.m, self.a]

    def __lt__(self, other: "SolutionTriple") -> bool:
        return (self.n, self.m, self.a) < (other.n, other.m, other.a)


@dataclass(frozen=True)
class PerfectPowerFacts:
    """Indices and values of every perfect power in the two sequences.

    This is a known theorem (Bugeaud, Mignotte and Siksek, 2006) taken here
    as an axiom, not something this package proves.
    """

    fibonacci: tuple[tuple[int, int], ...] = ((0, 0), (1, 1), (2, 1), (6, 8), (12, 144))
    lucas: tuple[tuple[int, int], ...] = ((1, 1), (3, 4))

    @property
    def fibonacci_values(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.fibonacci)

    @property
    def lucas_values(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.lucas)

    @property
    def fibonacci_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.fibonacci)

    @property
    def lucas_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.lucas)

    def is_fibonacci_power(self, x: int) -> bool:
        return x in self.fibonacci_values

    def is_lucas_power(self, x: int) -> bool:
        return x in self.lucas_values


_FACTS = PerfectPowerFacts()


def perfect_power_facts() -> PerfectPowerFacts:
    return _FACTS
