"""Certified continued fractions and the Baker-Davenport reduction step.

The reduction is the Dujella-Petho variant: given a convergent p/q of an
irrational gamma with q > 6M, put eps = ||mu q|| - M ||gamma q||.  If
eps > 0 then 0 < |m gamma - n + mu| < A B^-w has no solution with
m <= M and w >= log(A q / eps) / log B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import DomainError, NotIrrational, PrecisionExhausted, ReductionFailed
from .realnum import (ALPHA, LOG_ALPHA, SQRT5, CertifiedReal,
                      Const, Expr, certified, certify_less, default_precision, evaluate,
                      log, nearest_int_distance)

EPSILON_WIDTH = Fraction(1, 2 ** 48)


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients of a certified real and their convergents.

    Every stored term is proven: the whole enclosing interval of the source
    shares it.  `certified_through` is the index of the last such term.
    """

    terms: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    source: Optional[CertifiedReal] = None

    @property
    def certified_through(self) -> int:
        return len(self.terms) - 1

    def denominators(self) -> list[int]:
        return [q for _, q in self.convergents]

    def first_index_above(self, bound) -> int:
        for k, (_, q) in enumerate(self.convergents):
            if q > bound:
                return k
        raise IndexError(f"no convergent denominator exceeds {bound}")


def _certified_terms(lo: Fraction, hi: Fraction) -> list[int]:
    terms = []
    while True:
        a = math.floor(lo)
        if math.floor(hi) != a:
            return terms
        terms.append(a)
        if lo == a:
            # the next complete quotient is unbounded above
            return terms
        lo, hi = 1 / (hi - a), 1 / (lo - a)


def convergents(terms: Sequence[int]) -> list[tuple[int, int]]:
    out = []
    p0, q0, p1, q1 = 1, 0, 0, 1
    for a in terms:
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        out.append((p0, q0))
    return out


def cf_expand(x, q_min: int, *, extra_terms: int = 1,
              max_precision: int | None = None) -> ContinuedFraction:
    """Certified expansion of x until some convergent denominator exceeds q_min.

    `extra_terms` further terms are certified past that point so that the
    next few convergents are available for retries.  The caller asserts x
    is irrational; an exactly rational input is rejected.
    """
    x = certified(x)
    if max_precision is None:
        max_precision = default_precision()[1]
    if isinstance(x.expr, Const) or x.lo == x.hi:
        raise NotIrrational(f"{x.expr.render()} is rational")
    prec = x.precision
    while True:
        terms = _certified_terms(x.lo, x.hi)
        conv = convergents(terms)
        hits = [k for k, (_, q) in enumerate(conv) if q > q_min]
        if hits and len(terms) - 1 >= hits[0] + extra_terms:
            return ContinuedFraction(tuple(terms), tuple(conv), x)
        if prec >= max_precision:
            raise PrecisionExhausted(
                f"continued fraction of {x.expr.render()} not certified past q > {q_min}")
        prec = min(prec * 2, max_precision)
        x = x.at_precision(prec)


@dataclass(frozen=True)
class ReductionInstance:
    """One application of the reduction lemma and its outcome."""

    gamma: CertifiedReal
    mu: CertifiedReal
    A: Fraction
    B: CertifiedReal
    M: int
    q: int
    epsilon: Optional[CertifiedReal] = None
    threshold: Optional[CertifiedReal] = None
    omega_cap: Optional[int] = None

    @property
    def capped(self) -> bool:
        return self.omega_cap is not None

    @property
    def max_surviving_omega(self) -> Optional[int]:
        """Largest w the lemma leaves open."""
        return None if self.omega_cap is None else self.omega_cap - 1


def _threshold(A: Fraction, q: int, eps_lower: Fraction, B: CertifiedReal) -> tuple[CertifiedReal, int]:
    t = evaluate(log(Const(A * q / eps_lower)) / log(B.expr))
    return t, math.ceil(t.hi)


def _epsilon(dist_mu_q, M: int, dist_gamma_q) -> CertifiedReal:
    return evaluate(dist_mu_q.value.expr - M * dist_gamma_q.value.expr,
                    EPSILON_WIDTH)


def _check_lemma_inputs(A, B: CertifiedReal, M: int, q: int) -> None:
    if M < 1:
        raise DomainError(f"M must be a positive integer, got {M}")
    if q <= 6 * M:
        raise DomainError(f"need q > 6M, got q={q}, M={M}")
    if A <= 0:
        raise DomainError(f"need A > 0, got {A}")
    if not certify_less(1, B):
        raise DomainError("need B > 1")


def dujella_petho_step(gamma, mu, A, B, M: int, q: int) -> ReductionInstance:
    """Apply the lemma with denominator q.

    Returns an instance with `omega_cap` set when eps is provably positive;
    otherwise `omega_cap` is None and the caller should try the next
    convergent.
    """
    gamma, mu, B = certified(gamma), certified(mu), certified(B)
    A = Fraction(A)
    _check_lemma_inputs(A, B, M, q)
    eps = _epsilon(nearest_int_distance(mu.expr * q), M,
                   nearest_int_distance(gamma.expr * q))
    if eps.lo <= 0:
        return ReductionInstance(gamma, mu, A, B, M, q, eps)
    threshold, cap = _threshold(A, q, eps.lo, B)
    return ReductionInstance(gamma, mu, A, B, M, q, eps, threshold, cap)


def reduce_with_convergents(gamma, mu, A, B, M: int, *, cf: ContinuedFraction | None = None,
                            max_attempts: int = 10) -> tuple[ReductionInstance, list[ReductionInstance]]:
    """First successful step over successive convergents with q > 6M.

    Returns the successful instance and every attempt made, in order.
    """
    gamma = certified(gamma)
    if cf is None:
        cf = cf_expand(gamma, 6 * M, extra_terms=max_attempts)
    start = cf.first_index_above(6 * M)
    attempts = []
    for k in range(start, min(start + max_attempts, len(cf.convergents))):
        inst = dujella_petho_step(gamma, mu, A, B, M, cf.convergents[k][1])
        attempts.append(inst)
        if inst.capped:
            return inst, attempts
    raise ReductionFailed(f"eps <= 0 for {len(attempts)} convergents past 6M = {6 * M}")


def mu_expr(d: int) -> Expr:
    """log(sqrt5 (1 - alpha^-d)^-1) / log alpha."""
    return log(SQRT5 / (1 - ALPHA ** (-d))) / LOG_ALPHA


def gamma_expr(p: int) -> Expr:
    return log(p) / LOG_ALPHA


@dataclass(frozen=True)
class SweepRow:
    d: int
    epsilon: CertifiedReal

    @property
    def positive(self) -> bool:
        return self.epsilon.lo > 0


@dataclass(frozen=True)
class SweepResult:
    """Outcome of the reduction over the family mu_d for d in a range."""

    p: int
    d_range: tuple[int, int]
    M: int
    A: Fraction
    q: int
    rows: tuple[SweepRow, ...]
    exceptions: tuple[int, ...]
    eps_min: Optional[CertifiedReal]
    eps_max: Optional[CertifiedReal]
    threshold: Optional[CertifiedReal]
    omega_cap: Optional[int]
    attempts: tuple[dict, ...] = field(default=())


def sweep_at(p: int, d_range: tuple[int, int], M: int, A, B, q: int,
             gamma=None) -> SweepResult:
    """Evaluate eps(mu_d) for every d in d_range against one fixed q."""
    lo_d, hi_d = d_range
    if not 1 <= lo_d <= hi_d <= 10 ** 4:
        raise DomainError(f"d range {d_range} outside [1, 10^4]")
    gamma = certified(gamma_expr(p) if gamma is None else gamma)
    B = certified(B)
    A = Fraction(A)
    _check_lemma_inputs(A, B, M, q)
    dist_gamma = nearest_int_distance(gamma.expr * q)
    rows = []
    for d in range(lo_d, hi_d + 1):
        eps = _epsilon(nearest_int_distance(mu_expr(d) * q), M, dist_gamma)
        rows.append(SweepRow(d, eps))
    good = [r for r in rows if r.positive]
    exceptions = tuple(r.d for r in rows if not r.positive)
    if not good:
        return SweepResult(p, d_range, M, A, q, tuple(rows), exceptions,
                           None, None, None, None)
    eps_min = min(good, key=lambda r: r.epsilon.lo).epsilon
    eps_max = max(good, key=lambda r: r.epsilon.hi).epsilon
    threshold, cap = _threshold(A, q, eps_min.lo, B)
    return SweepResult(p, d_range, M, A, q, tuple(rows), exceptions,
                       eps_min, eps_max, threshold, cap)


def sweep_mu_family(p: int, d_range: tuple[int, int], M: int, A, B, *,
                    q: int | None = None,
                    accept: Callable[[SweepResult], bool] | None = None,
                    min_epsilon: Fraction = Fraction(1, 256),
                    max_attempts: int = 10) -> SweepResult:
    """Reduce n for every n - m in d_range at once.

    With `q` given the sweep runs against that denominator only.  Otherwise
    convergents with q > 6M are tried in order and the first one is kept
    whose smallest positive eps is at least `min_epsilon` and which passes
    `accept` (typically: every exception can be eliminated some other way).
    """
    if q is not None:
        return sweep_at(p, d_range, M, A, B, q)
    gamma = certified(gamma_expr(p))
    cf = cf_expand(gamma, 6 * M, extra_terms=max_attempts)
    start = cf.first_index_above(6 * M)
    attempts = []
    for k in range(start, min(start + max_attempts, len(cf.convergents))):
        q_k = cf.convergents[k][1]
        result = sweep_at(p, d_range, M, A, B, q_k, gamma)
        ok = (result.eps_min is not None
              and result.eps_min.lo >= min_epsilon
              and (accept is None or accept(result)))
        attempts.append({
            "q": q_k,
            "exceptions": list(result.exceptions),
            "eps_min_lower": result.eps_min.lo if result.eps_min else None,
            "accepted": ok,
        })
        if ok:
            return replace(result, attempts=tuple(attempts))
    raise ReductionFailed(
        f"no convergent among {len(attempts)} past 6M gave an acceptable sweep")
