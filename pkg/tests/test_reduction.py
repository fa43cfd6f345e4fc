import math
import random
from fractions import Fraction

import mpmath
import pytest

from fibdiff.errors import DomainError, NotIrrational, ReductionFailed
from fibdiff.realnum import ALPHA, LOG_ALPHA, SQRT5, certify_less, evaluate, log, sqrt
from fibdiff.reduction import (cf_expand, convergents, dujella_petho_step, gamma_expr, mu_expr,
                               reduce_with_convergents, sweep_at, sweep_mu_family)
from fibdiff.sequences import fib

mpmath.mp.dps = 80


def test_golden_ratio_expansion():
    cf = cf_expand(ALPHA, 100)
    assert set(cf.terms) == {1}
    k = cf.first_index_above(100)
    assert cf.convergents[k][1] == 144
    for i, (p, q) in enumerate(cf.convergents):
        assert (p, q) == (fib(i + 2), fib(i + 1))


def test_rational_rejected():
    with pytest.raises(NotIrrational):
        cf_expand(Fraction(22, 7), 10)


@pytest.mark.parametrize("x", [gamma_expr(7), gamma_expr(13), sqrt(2), log(3) / log(2)])
def test_convergent_laws(x):
    cf = cf_expand(x, 10 ** 40)
    conv = cf.convergents
    qs = cf.denominators()
    assert all(a < b for a, b in zip(qs[1:], qs[2:]))
    for k in range(1, len(conv)):
        (p0, q0), (p1, q1) = conv[k - 1], conv[k]
        assert p1 * q0 - p0 * q1 == (-1) ** (k + 1)
    for k in range(len(conv) - 1):
        p, q = conv[k]
        q_next = conv[k + 1][1]
        # |x - p/q| < 1/(q q_next) <= 1/q^2
        assert certify_less(abs(x - Fraction(p, q)), Fraction(1, q * q_next))
        assert q * q_next >= q * q


def test_convergents_recurrence():
    assert convergents([3, 7, 15, 1]) == [(3, 1), (22, 7), (333, 106), (355, 113)]


def test_gamma_terms_match_mpmath():
    cf = cf_expand(gamma_expr(7), 10 ** 35)
    x = mpmath.log(7) / mpmath.log(mpmath.phi)
    for a in cf.terms:
        assert int(mpmath.floor(x)) == a
        x = 1 / (x - a)


def test_step_requires_q_above_6M():
    with pytest.raises(DomainError):
        dujella_petho_step(gamma_expr(7), mu_expr(5), 13, ALPHA, 100, 600)
    with pytest.raises(DomainError):
        dujella_petho_step(gamma_expr(7), mu_expr(5), 0, ALPHA, 100, 601)
    with pytest.raises(DomainError):
        dujella_petho_step(gamma_expr(7), mu_expr(5), 1, Fraction(1, 2), 100, 601)


def test_negative_epsilon_signals_retry():
    # mu = 0 gives ||mu q|| = 0, so eps = -M ||gamma q|| < 0
    inst = dujella_petho_step(sqrt(2), 0, 1, 2, 5, 70)
    assert not inst.capped and inst.epsilon.hi < 0
    with pytest.raises(ReductionFailed):
        reduce_with_convergents(sqrt(2), 0, 1, 2, 5, max_attempts=3)


def _exhaustive_check(gamma, mu, A, B, M, omega_cap):
    """No 0 < |m gamma - n + mu| < A B^-w with m <= M and w >= omega_cap."""
    g, u = mpmath.mpf(gamma), mpmath.mpf(mu)
    A = Fraction(A)
    bound = mpmath.mpf(A.numerator) / A.denominator * mpmath.mpf(B) ** (-omega_cap)
    for m in range(0, M + 1):
        v = m * g + u
        for n in (mpmath.floor(v), mpmath.ceil(v)):
            d = abs(v - n)
            assert d == 0 or d >= bound, (m, n)


def test_dujella_petho_soundness_synthetic():
    rng = random.Random(99)
    checked = 0
    while checked < 12:
        a, b = rng.choice([2, 3, 5, 6, 7, 10, 11]), rng.choice([2, 3, 5, 7])
        gamma_e = sqrt(a) / b
        c, e = rng.choice([13, 17, 19, 23]), rng.randint(2, 9)
        mu_e = sqrt(c) / e
        M = rng.randint(10, 1000)
        A = Fraction(rng.randint(1, 30))
        B = rng.choice([2, 3])
        try:
            inst, _ = reduce_with_convergents(gamma_e, mu_e, A, B, M)
        except ReductionFailed:
            continue
        gamma = mpmath.sqrt(a) / b
        mu = mpmath.sqrt(c) / e
        assert inst.q > 6 * M
        assert inst.epsilon.lo > 0
        _exhaustive_check(gamma, mu, A, B, M, inst.omega_cap)
        checked += 1


def test_dujella_petho_soundness_pipeline_gamma():
    # the real gamma with a small M and the mu family
    for d in (3, 5, 10, 33):
        inst, _ = reduce_with_convergents(gamma_expr(7), mu_expr(d), 13, ALPHA, 500)
        gamma = mpmath.log(7) / mpmath.log(mpmath.phi)
        mu = mpmath.log(mpmath.sqrt(5) / (1 - mpmath.phi ** (-d))) / mpmath.log(mpmath.phi)
        _exhaustive_check(gamma, mu, 13, mpmath.phi, 500, inst.omega_cap)


def test_round_one_p7():
    M = 690211851323243698175908703025
    inst, attempts = reduce_with_convergents(gamma_expr(7), log(SQRT5) / LOG_ALPHA,
                                             Fraction("166.3"), ALPHA, M)
    assert len(attempts) == 1 and inst.q > 6 * M
    assert abs(inst.epsilon.mid - Fraction("0.403101")) < Fraction(1, 10 ** 5)
    assert abs(inst.threshold.mid - Fraction("161.64334")) < Fraction(1, 10 ** 4)
    assert inst.max_surviving_omega == 161


def test_sweep_exception_path():
    # d = 4 is an exception for p = 7 at this q
    res = sweep_at(7, (3, 6), 12024590902888103, 13, ALPHA, 6209792098821077358)
    assert res.exceptions == (4,)
    assert {r.d for r in res.rows} == {3, 4, 5, 6}
    assert not next(r for r in res.rows if r.d == 4).positive


def test_sweep_determinism():
    a = sweep_mu_family(7, (3, 40), 10 ** 9, 13, ALPHA)
    b = sweep_mu_family(7, (3, 40), 10 ** 9, 13, ALPHA)
    assert a.exceptions == b.exceptions and a.omega_cap == b.omega_cap and a.q == b.q
    assert [r.epsilon.lo for r in a.rows] == [r.epsilon.lo for r in b.rows]


def test_sweep_range_checked():
    with pytest.raises(DomainError):
        sweep_at(7, (0, 5), 10, 13, ALPHA, 10 ** 5)
    with pytest.raises(DomainError):
        sweep_at(7, (3, 10 ** 4 + 1), 10, 13, ALPHA, 10 ** 5)


def test_mu_expr_value():
    x = evaluate(mu_expr(4), Fraction(1, 10 ** 20))
    ref = mpmath.log(mpmath.sqrt(5) / (1 - mpmath.phi ** -4)) / mpmath.log(mpmath.phi)
    assert abs(float(x) - float(ref)) < 1e-15
    assert math.isfinite(float(x))
