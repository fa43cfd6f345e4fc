import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fibdiff.errors import CapacityError, DomainError
from fibdiff.realnum import ALPHA, BETA, SQRT5, certify_leq, evaluate
from fibdiff.sequences import (INDEX_CAP, SolutionTriple, diff_factorization, fib, lucas,
                               perfect_power_facts, prime_power_exponent)


def naive(n, a, b):
    for _ in range(n):
        a, b = b, a + b
    return a


@pytest.mark.parametrize("n, expected", [(0, 0), (1, 1), (12, 144), (-4, -3), (-5, 5)])
def test_fib_values(n, expected):
    assert fib(n) == expected


@pytest.mark.parametrize("n, expected", [(0, 2), (1, 1), (3, 4), (-3, -4), (-4, 7)])
def test_lucas_values(n, expected):
    assert lucas(n) == expected


def test_against_plain_recurrence():
    for n in range(0, 501):
        assert fib(n) == naive(n, 0, 1)
        assert lucas(n) == naive(n, 2, 1)


def test_recurrence_up_to_500():
    for n in range(2, 501):
        assert fib(n) == fib(n - 1) + fib(n - 2)
        assert lucas(n) == lucas(n - 1) + lucas(n - 2)


def test_negative_sign_rules():
    for n in range(1, 60):
        assert fib(-n) == (-1) ** (n + 1) * fib(n)
        assert lucas(-n) == (-1) ** n * lucas(n)


def test_index_cap():
    assert fib(INDEX_CAP) > 0
    with pytest.raises(CapacityError):
        fib(INDEX_CAP + 1)
    with pytest.raises(CapacityError):
        lucas(-INDEX_CAP - 1)


def test_fib_lucas_identity():
    for l in range(1, 301):
        assert fib(l + 1) + fib(l - 1) == lucas(l)


def test_binet_bracket():
    for n in range(1, 301):
        x = evaluate((ALPHA ** n - BETA ** n) / SQRT5, target_width=Fraction(1, 4))
        assert x.width < 0.5
        assert x.lo <= fib(n) <= x.hi


def test_growth_bound():
    for n in range(3, 301):
        assert certify_leq(ALPHA ** (n - 2), fib(n))
        assert certify_leq(fib(n), ALPHA ** (n - 1))
    # n = 1, 2 hit equality on one side
    assert certify_leq(ALPHA ** -1, 1) and certify_leq(1, ALPHA)


@pytest.mark.parametrize("n, m, product", [(9, 1, 33), (10, 4, 52), (2, 0, 1)])
def test_diff_factorization_examples(n, m, product):
    i, j, _ = diff_factorization(n, m)
    assert fib(i) * lucas(j) == product == fib(n) - fib(m)


def test_diff_factorization_random_pairs():
    rng = random.Random(20240601)
    for _ in range(200):
        m = rng.randrange(0, 399)
        n = rng.randrange(m + 1, 401)
        if (n - m) % 2:
            n = n + 1 if n < 400 else n - 1
            if n <= m:
                n = m + 2
        i, j, rule = diff_factorization(n, m)
        assert fib(n) - fib(m) == fib(i) * lucas(j)
        assert rule == ("A" if (n - m) % 4 == 0 else "B")


def test_diff_factorization_parity():
    with pytest.raises(DomainError):
        diff_factorization(10, 3)
    with pytest.raises(DomainError):
        diff_factorization(3, 3)


@pytest.mark.parametrize("x, p, a", [(1, 7, 0), (169, 13, 2), (7881196, 13, None),
                                     (343, 7, 3), (344, 7, None), (14, 7, None)])
def test_prime_power_exponent(x, p, a):
    assert prime_power_exponent(x, p) == a


def test_prime_power_exponent_zero():
    with pytest.raises(DomainError):
        prime_power_exponent(0, 7)


@given(st.integers(0, 60), st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_prime_power_roundtrip(a, p):
    assert prime_power_exponent(p ** a, p) == a
    assert prime_power_exponent(p ** a * (p + 1), p) is None


def test_perfect_power_table():
    facts = perfect_power_facts()
    assert sorted(facts.fibonacci_values) == [0, 1, 1, 8, 144]
    assert sorted(facts.lucas_values) == [1, 4]
    assert not facts.is_fibonacci_power(343)
    for i, v in facts.fibonacci:
        assert fib(i) == v
    for i, v in facts.lucas:
        assert lucas(i) == v


def test_solution_triple():
    t = SolutionTriple(6, 1, 1)
    assert t.holds(7) and not t.holds(13)
    assert t.as_list() == [6, 1, 1]
    with pytest.raises(DomainError):
        SolutionTriple(3, 3, 0)
    with pytest.raises(DomainError):
        SolutionTriple(3, 1, -1)
