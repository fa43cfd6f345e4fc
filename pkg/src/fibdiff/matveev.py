"""Evaluate Matveev's lower bound and turn the resulting inequalities into caps.

The bound itself is taken as given: for a nonzero linear form
Gamma = eta_1^b_1 ... eta_t^b_t - 1 in a real field of degree D,

    log |Gamma| > -1.4 * 30^(t+3) * t^4.5 * D^2 * (1 + log D) * (1 + log B) * A_1 ... A_t.

Everything here only evaluates the right-hand side for concrete parameters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError, PrecisionExhausted
from .realnum import (LOG_ALPHA, SQRT5, CertifiedReal, Expr, as_expr,
                      certify_leq, evaluate, log, sqrt)

MIN_A = Fraction(16, 100)


class GammaWitness(str, enum.Enum):
    """Why the linear form is nonzero."""

    ALPHA_POWER_IRRATIONAL = "alpha-power-irrational"  # Gamma = 0 forces alpha^(2n) in Q
    BETA_POWER_COLLISION = "beta-power-collision"  # Gamma = 0 forces beta^n = beta^m


class Stage(str, enum.Enum):
    NM_BOUND = "nm_bound"
    N_ABSOLUTE = "n_absolute"
    N_AFTER_REDUCTION = "n_after_reduction"


@dataclass(frozen=True)
class MatveevInstance:
    """Parameters of one application of the bound.

    `heights` and `log_abs`, when given, hold certified h(eta_i) and
    |log eta_i| so that the admissibility of each A_i can be checked.
    """

    t: int
    D: int
    A: tuple
    gamma_nonzero_witness: GammaWitness
    B: Optional[int] = None
    heights: tuple = ()
    log_abs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(as_expr(_coerce(a)) for a in self.A))
        if self.t < 2:
            raise DomainError(f"need t >= 2, got {self.t}")
        if self.D < 1:
            raise DomainError(f"need D >= 1, got {self.D}")
        if len(self.A) != self.t:
            raise DomainError(f"expected {self.t} constants A_i, got {len(self.A)}")
        if self.B is not None and self.B < 3:
            raise DomainError(f"need B >= 3, got {self.B}")
        for i, a in enumerate(self.A):
            if not certify_leq(MIN_A, a):
                raise DomainError(f"A_{i + 1} = {a.render()} is below 0.16")
        for i, (a, h) in enumerate(zip(self.A, self.heights)):
            if not certify_leq(self.D * as_expr(h), a):
                raise DomainError(f"A_{i + 1} = {a.render()} is below D*h(eta_{i + 1})")
        for i, (a, la) in enumerate(zip(self.A, self.log_abs)):
            if not certify_leq(as_expr(la), a):
                raise DomainError(f"A_{i + 1} = {a.render()} is below |log eta_{i + 1}|")


def _coerce(a):
    if isinstance(a, float):
        return Fraction(str(a))
    return a


def matveev_constant(t: int, D: int) -> Expr:
    """1.4 * 30^(t+3) * t^4.5 * D^2 * (1 + log D)."""
    t_pow = Fraction(t) ** 4 * sqrt(t)
    return Fraction(7, 5) * Fraction(30) ** (t + 3) * t_pow * (D * D) * (1 + log(D))


def matveev_coefficient(inst: MatveevInstance) -> CertifiedReal:
    """The bound divided by (1 + log B): the coefficient of (1 + log B)."""
    expr = matveev_constant(inst.t, inst.D)
    for a in inst.A:
        expr = expr * a
    return evaluate(expr)


def matveev_log_bound(inst: MatveevInstance) -> CertifiedReal:
    """Certified value of the negated exponent of the lower bound."""
    if inst.B is None:
        raise DomainError("B is required to evaluate the full bound")
    return evaluate(matveev_coefficient(inst).expr * (1 + log(inst.B)))


def rounded_A1(p: int) -> Fraction:
    """2 log p rounded up to the next multiple of 0.05 (3.9 for 7, 5.15 for 13)."""
    two_log = evaluate(2 * log(p))
    steps = -(-two_log.hi * 20 // 1)
    return Fraction(int(steps), 20)


A2_DEFAULT = Fraction(1, 2)
A3_DEFAULT = Fraction(165, 100)


@dataclass(frozen=True)
class BoundChain:
    """One link of the chain of upper bounds.

    `coefficient` is the certified constant of the stage's inequality;
    `resulting_cap` is the certified integer cap it yields, if any.
    """

    stage: Stage
    coefficient: CertifiedReal
    resulting_cap: Optional[int] = None
    details: dict = field(default_factory=dict)


def first_instance(p: int, A1=None, A2=A2_DEFAULT, A3=A3_DEFAULT) -> MatveevInstance:
    """eta = (p, alpha, sqrt 5), b = (a, -n, 1), in Q(sqrt 5)."""
    A1 = rounded_A1(p) if A1 is None else A1
    return MatveevInstance(
        t=3, D=2, A=(A1, A2, A3),
        gamma_nonzero_witness=GammaWitness.ALPHA_POWER_IRRATIONAL,
        heights=(log(p), LOG_ALPHA / 2, log(SQRT5)),
        log_abs=(log(p), LOG_ALPHA, log(SQRT5)),
    )


def derive_nm_inequality(p: int, A1=None, A2=A2_DEFAULT, A3=A3_DEFAULT) -> BoundChain:
    """K with (n - m) log(alpha) - log 4 < K (1 + log n)."""
    inst = first_instance(p, A1, A2, A3)
    K = matveev_coefficient(inst)
    return BoundChain(Stage.NM_BOUND, K, None, {
        "instance": inst,
        "lhs": "(n-m)*log(alpha) - log(4)",
        "rhs": "K*(1+log(n))",
    })


def eta3_coefficient(p: int, A1=None, A2=A2_DEFAULT) -> CertifiedReal:
    """K' with log(alpha^n / 3) < K' (1 + log n) (log 20 + (n - m) log alpha).

    This is the second application (eta_3 = sqrt5 (1 - alpha^(m-n))^-1)
    with A_3 = log 20 + (n - m) log alpha factored out.
    """
    A1 = rounded_A1(p) if A1 is None else A1
    for a in (A1, A2):
        if not certify_leq(MIN_A, as_expr(_coerce(a))):
            raise DomainError("A_i below 0.16")
    if not certify_leq(2 * log(p), as_expr(_coerce(A1))):
        raise DomainError(f"A_1 = {A1} is below 2 log {p}")
    if not certify_leq(LOG_ALPHA, as_expr(_coerce(A2))):
        raise DomainError(f"A_2 = {A2} is below log alpha")
    return evaluate(matveev_constant(3, 2) * _coerce(A1) * _coerce(A2))


@dataclass(frozen=True)
class QuadraticLogBound:
    """n < c2 (1 + log n)^2 + c1 (1 + log n) + c0."""

    c2: CertifiedReal
    c1: CertifiedReal
    c0: CertifiedReal

    def expanded(self) -> tuple[CertifiedReal, CertifiedReal, CertifiedReal]:
        """Coefficients of 1, log n and (log n)^2."""
        c2, c1, c0 = self.c2.expr, self.c1.expr, self.c0.expr
        return (evaluate(c2 + c1 + c0), evaluate(2 * c2 + c1), evaluate(c2))


def combine_chain(nm: BoundChain, eta3_coef: CertifiedReal) -> QuadraticLogBound:
    """Substitute the (n - m) bound into the eta_3 inequality.

    From n log alpha - log 3 < K' (1 + L) (log 20 + log 4 + K (1 + L)),
    with L = log n.
    """
    K, Kp = nm.coefficient.expr, eta3_coef.expr
    return QuadraticLogBound(
        c2=evaluate(Kp * K / LOG_ALPHA),
        c1=evaluate(Kp * log(80) / LOG_ALPHA),
        c0=evaluate(log(3) / LOG_ALPHA),
    )


def relaxation_is_valid(K_rel, bound: QuadraticLogBound, n_min: int) -> bool:
    """Certify K_rel (log n)^2 >= the quadratic bound for every n >= n_min.

    With u = 1 / log n the condition reads
    K_rel >= c2 (1 + u)^2 + c1 (u + u^2) + c0 u^2, whose right side
    decreases in n, so checking at n_min suffices.
    """
    u = 1 / log(n_min)
    rhs = bound.c2.expr * (1 + u) ** 2 + bound.c1.expr * (u + u ** 2) + bound.c0.expr * u ** 2
    return certify_leq(rhs, as_expr(_coerce(K_rel)))


def tight_relaxation(bound: QuadraticLogBound, n_min: int, digits: int = 6) -> Fraction:
    """Smallest valid K_rel at n_min, rounded up to `digits` significant digits."""
    u = 1 / log(n_min)
    rhs = evaluate(bound.c2.expr * (1 + u) ** 2 + bound.c1.expr * (u + u ** 2)
                   + bound.c0.expr * u ** 2)
    return _round_up_digits(rhs.hi, digits)


def _round_up_digits(x: Fraction, digits: int) -> Fraction:
    e = len(str(int(x))) - digits
    unit = Fraction(10) ** e
    return -(-x // unit) * unit


class CapKind(str, enum.Enum):
    LOG_SQUARED = "log_squared"  # n < K (log n)^2 + offset
    ONE_PLUS_LOG = "one_plus_log"  # n < K (1 + log n) + offset


def _fails(n: int, K: Fraction, kind: CapKind, offset: Fraction, max_precision: int) -> bool:
    """Certified: n >= K f(log n) + offset, i.e. the inequality fails at n."""
    L = log(n)
    f = L * L if kind is CapKind.LOG_SQUARED else 1 + L
    rhs = K * f + offset
    prec = 64
    while True:
        iv = evaluate(n - rhs, start_precision=prec, max_precision=prec)
        if iv.lo >= 0:
            return True
        if iv.hi < 0:
            return False
        if prec >= max_precision:
            return False
        prec *= 2


def solve_self_referential(kind: CapKind, K, offset=0, *,
                           max_precision: int = 4096) -> int:
    """Least integer N such that n < K f(log n) + offset fails for all n >= N.

    K and offset may be certified reals; their upper endpoints are used so
    the cap over-approximates.  The gap function n - K f(log n) is convex
    for n >= 3, so the set where the inequality fails is a ray and integer
    bisection finds its start.
    """
    kind = CapKind(kind)
    K_hi = _upper(K)
    off_hi = _upper(offset)
    if K_hi <= 0:
        raise DomainError("K must be positive")
    lo = 3
    if _fails(lo, K_hi, kind, off_hi, max_precision):
        return lo
    hi = lo * 2
    while not _fails(hi, K_hi, kind, off_hi, max_precision):
        hi *= 2
        if hi.bit_length() > 400:
            raise PrecisionExhausted("cap search did not terminate")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _fails(mid, K_hi, kind, off_hi, max_precision):
            hi = mid
        else:
            lo = mid
    return hi


def _upper(x) -> Fraction:
    if isinstance(x, CertifiedReal):
        return x.hi
    if isinstance(x, Expr):
        return evaluate(x).hi
    return Fraction(_coerce(x))


def bound_after_reduction(eta3_coef: CertifiedReal, d_max: int) -> tuple[CertifiedReal, CertifiedReal]:
    """(K, offset) with n < K (1 + log n) + offset once n - m <= d_max."""
    K = evaluate(eta3_coef.expr * (log(20) + d_max * LOG_ALPHA) / LOG_ALPHA)
    return K, evaluate(log(3) / LOG_ALPHA)
