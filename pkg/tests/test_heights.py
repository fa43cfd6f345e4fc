import random
from fractions import Fraction

import pytest

from fibdiff.errors import DomainError
from fibdiff.heights import (ALPHA_Q, SQRT5_Q, QuadraticNumber, eta3, eta3_log_abs_bound,
                             height_eta3_bound, height_quadratic, height_rational)
from fibdiff.matveev import bound_after_reduction, eta3_coefficient
from fibdiff.realnum import LOG_ALPHA, certify_leq, evaluate, log

TOL = Fraction(1, 10 ** 5)


def close(h, value):
    return abs(h.value.mid - Fraction(value)) < TOL


@pytest.mark.parametrize("r, value", [(7, "1.94591"), (13, "2.56494"), (1, 0),
                                      (Fraction(-3, 8), "2.07944")])
def test_height_rational(r, value):
    h = height_rational(r)
    assert h.kind == "exact" and close(h, value)


def test_height_quadratic_examples():
    assert close(height_quadratic(ALPHA_Q), "0.24061")
    assert close(height_quadratic(SQRT5_Q), "0.80472")
    two_alpha = QuadraticNumber(1, 1)
    assert two_alpha.minimal_polynomial() == (1, -2, -4)
    h = height_quadratic(two_alpha)
    assert certify_leq(h.value.expr, height_rational(2).value.expr + height_quadratic(ALPHA_Q).value.expr)


def test_height_quadratic_rejects_rationals():
    with pytest.raises(DomainError):
        height_quadratic(QuadraticNumber(3))


def test_quadratic_arithmetic():
    for k in range(-20, 21):
        ak = QuadraticNumber.alpha_power(k)
        assert ak * QuadraticNumber.alpha_power(-k) == QuadraticNumber(1)
        assert ak.norm() == (-1) ** (k % 2)
    assert ALPHA_Q * ALPHA_Q == ALPHA_Q + 1
    assert SQRT5_Q * SQRT5_Q == QuadraticNumber(5)


def _rationals(rng, count):
    for _ in range(count):
        yield (Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 6)),
               Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 6)))


def naive_height(x: Fraction) -> int:
    return max(abs(x.numerator), x.denominator)


def test_naive_height_matches():
    rng = random.Random(3)
    for x, _ in _rationals(rng, 20):
        assert height_rational(x).value.contains(
            evaluate(log(naive_height(x)), Fraction(1, 2 ** 120)).mid)


# h = log H, so the inequalities below are exact statements about H


def test_sum_and_difference_inequality():
    rng = random.Random(4)
    for x, y in _rationals(rng, 100):
        for z in (x + y, x - y):
            assert naive_height(z) <= 2 * naive_height(x) * naive_height(y)


def test_product_and_quotient_inequality():
    rng = random.Random(5)
    for x, y in _rationals(rng, 100):
        for z in [x * y] + ([x / y] if y else []):
            assert naive_height(z) <= naive_height(x) * naive_height(y)


def test_power_law():
    rng = random.Random(6)
    for x, _ in _rationals(rng, 100):
        if x == 0:
            continue
        k = rng.randint(-10, 10)
        assert naive_height(x ** k) == naive_height(x) ** abs(k)
        lhs = height_rational(x ** k).value
        rhs = evaluate(abs(k) * height_rational(x).value.expr)
        assert lhs.lo <= rhs.hi and rhs.lo <= lhs.hi


def test_eta3_exact_height_below_bound():
    for d in range(1, 201):
        e = eta3(d)
        exact = height_quadratic(e)
        bound = height_eta3_bound(d)
        assert bound.kind == "upper-bound"
        assert certify_leq(exact.value.expr, bound.value.expr)
        # companion bound on |log eta_3|
        assert certify_leq(abs(log(abs(e.expr()))), eta3_log_abs_bound(d).expr)


def test_eta3_bound_formula():
    for d in (1, 3):
        assert height_eta3_bound(d).value.contains(
            evaluate((log(20) + d * LOG_ALPHA) / 2, Fraction(1, 2 ** 100)).mid)
    with pytest.raises(DomainError):
        height_eta3_bound(0)


def test_eta3_bound_feeds_reduced_chain():
    K, _ = bound_after_reduction(eta3_coefficient(7), 161)
    assert abs(K.mid / Fraction("3.16222e14") - 1) < Fraction(1, 10 ** 5)
