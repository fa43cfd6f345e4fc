"""End-to-end proof that F_n - F_m = p^a has only small solutions.

The run is split into stages, each consuming the previous stage's cap:

1. exhaustive search over n <= search_cap;
2. the cases n - m = 1, n - m = 2 and m = 0, which reduce to F_k = p^a;
3. numeric side conditions used by the inequalities below;
4. two applications of Matveev's bound, giving an absolute cap on n;
5. a first reduction round capping n - m;
6. a second reduction round over the family mu_(n-m), capping n;
7. elimination of the values of n - m the second round leaves open.

Every stage's numbers go into a `ProofCertificate`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (DomainError, FibDiffError, StageFailure,
                     UnhandledResidual)
from .matveev import (A2_DEFAULT, A3_DEFAULT, BoundChain, CapKind, GammaWitness,
                      Stage, bound_after_reduction, combine_chain, derive_nm_inequality,
                      eta3_coefficient, rounded_A1, relaxation_is_valid,
                      solve_self_referential, tight_relaxation)
from .realnum import (ALPHA, BETA, LOG_ALPHA, SQRT5, Const,
                      certify_leq, certify_less, evaluate, log, precision_limits)
from .reduction import (ReductionInstance, SweepResult, gamma_expr,
                        reduce_with_convergents, sweep_mu_family)
from .sequences import (SolutionTriple, diff_factorization, fib, lucas,
                        perfect_power_facts, prime_power_exponent)

log_ = logging.getLogger(__name__)

# Constants chosen by hand in the published argument, reused verbatim by default.
PUBLISHED_CONSTANTS = {
    7: {"A1": Fraction("3.9"), "log_squared": Fraction("1.46212e26")},
    13: {"A1": Fraction("5.15"), "log_squared": Fraction("1.55331e26")},
}
ROUND1_A = Fraction("166.3")
ROUND2_A = Fraction(13)


def is_prime(p: int) -> bool:
    from sympy import isprime
    return bool(isprime(p))


@dataclass(frozen=True)
class PipelineConfig:
    prime: int
    search_cap: int = 200
    start_precision_bits: int = 128
    max_precision_bits: int = 16384
    emit_path: Optional[str] = None
    tight_constants: bool = False
    min_sweep_epsilon: Fraction = Fraction(1, 256)
    max_convergent_attempts: int = 10

    def __post_init__(self):
        if self.prime < 2 or not is_prime(self.prime):
            raise DomainError(f"{self.prime} is not prime")
        if self.search_cap < 10:
            raise DomainError(f"search_cap must be >= 10, got {self.search_cap}")
        if not 16 <= self.start_precision_bits <= self.max_precision_bits:
            raise DomainError("need 16 <= start precision <= max precision")


# ---------------------------------------------------------------------------
# small solutions


def brute_force_search(p: int, cap: int) -> list[SolutionTriple]:
    """All (n, m, a) with 0 <= m < n <= cap, n >= 2 and F_n - F_m = p^a."""
    if cap < 10:
        raise DomainError(f"cap must be >= 10, got {cap}")
    fibs = [fib(k) for k in range(cap + 1)]
    found = []
    for n in range(2, cap + 1):
        for m in range(n):
            x = fibs[n] - fibs[m]
            if x < 1:
                continue
            a = prime_power_exponent(x, p)
            if a is not None:
                found.append(SolutionTriple(n, m, a))
    return found


def _fib_prime_powers(p: int) -> list[tuple[int, int]]:
    """Every (k, a) with k >= 0 and F_k = p^a.

    For a >= 2, F_k is a perfect power, so k is in the perfect-power table
    (values <= 144).  For a <= 1, F_k <= p.  Scanning until F_k exceeds
    max(p, 144) therefore finds all of them.
    """
    limit = max(p, max(perfect_power_facts().fibonacci_values))
    out = []
    k = 0
    while True:
        f = fib(k)
        if f > limit and k > 2:
            return out
        if f >= 1:
            a = prime_power_exponent(f, p)
            if a is not None:
                out.append((k, a))
        k += 1


@dataclass(frozen=True)
class TaggedSolution:
    triple: SolutionTriple
    rule: str


def small_case_split(p: int) -> list[TaggedSolution]:
    """Solutions with n - m = 1, n - m = 2 or m = 0, for every n.

    n - m = 1 gives F_{m-1} = p^a, n - m = 2 gives F_{m+1} = p^a and m = 0
    gives F_n = p^a.
    """
    out = []
    hits = _fib_prime_powers(p)
    for k, a in hits:
        m = k + 1  # F_{m-1}, m >= 1
        out.append(TaggedSolution(SolutionTriple(m + 1, m, a), "n-m=1"))
    for k, a in hits:
        if k >= 1:  # F_{m+1}, m >= 0
            out.append(TaggedSolution(SolutionTriple(k + 1, k - 1, a), "n-m=2"))
    for k, a in hits:
        if k >= 2:
            out.append(TaggedSolution(SolutionTriple(k, 0, a), "m=0"))
    return out


# ---------------------------------------------------------------------------
# residual cases


@dataclass(frozen=True)
class ResidualCase:
    d: int
    rule: str
    witnesses: dict


def eliminate_residual(p: int, d: int, search_cap: int = 200) -> ResidualCase:
    """Rule out n - m = d for n > search_cap by a factorization argument."""
    facts = perfect_power_facts()
    if d == 4:
        # F_{m+4} - F_m = L_{m+2}; a >= 2 makes it a perfect power
        max_n = max(i for i in facts.lucas_indices) + 2
        if max_n > search_cap:
            raise UnhandledResidual(f"d=4 needs search_cap >= {max_n}")
        return ResidualCase(4, "lucas-perfect-power", {
            "identity": "F_(m+4) - F_m = L_(m+2)",
            "lucas_perfect_power_indices": list(facts.lucas_indices),
            "largest_possible_n": max_n,
            "search_cap": search_cap,
        })
    if d % 2:
        raise UnhandledResidual(f"p={p}: odd residual n-m={d} has no elimination rule")
    # n = m (mod 4) iff d = 0 (mod 4); the fixed factor depends only on d
    sample = diff_factorization(d + 1, 1)
    if sample.rule == "A":
        name, value, rule = f"F_{d // 2}", fib(d // 2), "fixed-fibonacci-factor"
        shape = f"F_n - F_m = F_{d // 2} * L_(m+{d // 2})"
    else:
        name, value, rule = f"L_{d // 2}", lucas(d // 2), "fixed-lucas-factor"
        shape = f"F_n - F_m = F_(m+{d // 2}) * L_{d // 2}"
    exponent = prime_power_exponent(value, p)
    if exponent is not None:
        raise UnhandledResidual(
            f"p={p}, n-m={d}: fixed factor {name} = {value} is {p}^{exponent}")
    return ResidualCase(d, rule, {
        "factorization": shape,
        "fixed_factor": name,
        "fixed_factor_value": value,
        "is_power_of_p": False,
        "lemma": "a product of positive integers equal to p^a has every factor a power of p",
    })


def can_eliminate(p: int, d: int, search_cap: int) -> bool:
    try:
        eliminate_residual(p, d, search_cap)
    except UnhandledResidual:
        return False
    return True


# ---------------------------------------------------------------------------
# side conditions


@dataclass(frozen=True)
class SideCondition:
    name: str
    statement: str
    holds: bool
    values: dict = field(default_factory=dict)
    note: str = ""


def side_conditions(p: int, search_cap: int) -> list[SideCondition]:
    """Numeric facts the inequality chain uses, each certified."""
    out = []

    def add(name, statement, lhs, rhs, strict=True, note=""):
        ok = certify_less(lhs, rhs) if strict else certify_leq(lhs, rhs)
        out.append(SideCondition(name, statement, ok, {
            "lhs": evaluate(lhs), "rhs": evaluate(rhs)}, note))

    add("exponent-below-index", "alpha < p, so p^a < alpha^n gives a < n", ALPHA, p)
    add("first-form-constant", "4 / alpha^3 < 19/20 (n - m >= 3)",
        4 / ALPHA ** 3, Fraction(19, 20))
    add("first-form-error", "sqrt5 (1 + 1/(2 alpha)) < 4 (m >= 1)",
        SQRT5 * (1 + 1 / (2 * ALPHA)), 4)
    add("round1-A", "80 / log(alpha) <= 166.3", 80 / LOG_ALPHA, ROUND1_A, strict=False)
    add("round2-A", "6 / log(alpha) <= 13", 6 / LOG_ALPHA, ROUND2_A, strict=False)
    add("beta-tail", f"|beta| + |beta|^{search_cap + 1} < 2/3 (n > {search_cap}, m >= 1)",
        abs(BETA) + abs(BETA) ** (search_cap + 1), Fraction(2, 3))
    add("eta3-denominator", "1/alpha < 2/3, so (1 - alpha^(m-n))^-1 < 3",
        1 / ALPHA, Fraction(2, 3))
    add("second-form-half", f"3 / alpha^{search_cap + 1} < 1/2",
        3 / ALPHA ** (search_cap + 1), Fraction(1, 2))
    add("second-form-slack", "sqrt5 < 3", SQRT5, 3,
        note="loose step kept as displayed; sqrt5/alpha^n alone would suffice")
    big = fib(search_cap - 1)
    out.append(SideCondition(
        "exponent-at-least-two", f"F_{search_cap - 1} > {p}, so n > {search_cap} forces a >= 2",
        big > p, {"F": big}))
    return out


# ---------------------------------------------------------------------------
# certificate


@dataclass
class StageRecord:
    name: str
    status: str = "ok"
    error_kind: Optional[str] = None
    error: Optional[str] = None
    summary: dict = field(default_factory=dict)


@dataclass
class ProofCertificate:
    prime: int
    config: PipelineConfig
    stages: list[StageRecord] = field(default_factory=list)
    search_solutions: list[SolutionTriple] = field(default_factory=list)
    small_case_solutions: list[TaggedSolution] = field(default_factory=list)
    side_conditions: list[SideCondition] = field(default_factory=list)
    bound_chain: list[BoundChain] = field(default_factory=list)
    reductions: list[ReductionInstance] = field(default_factory=list)
    reduction_attempts: list[ReductionInstance] = field(default_factory=list)
    sweep: Optional[SweepResult] = None
    residual_cases: list[ResidualCase] = field(default_factory=list)
    verdict: Optional[list[SolutionTriple]] = None

    @property
    def failed_stage(self) -> Optional[StageRecord]:
        for s in self.stages:
            if s.status != "ok":
                return s
        return None

    @property
    def certified(self) -> bool:
        return self.verdict is not None

    def chain(self, stage: Stage) -> BoundChain:
        for link in self.bound_chain:
            if link.stage == stage:
                return link
        raise KeyError(stage)


class _Run:
    """Mutable state of one proof run."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.p = config.prime
        self.cert = ProofCertificate(config.prime, config)
        self.constants = {} if config.tight_constants else PUBLISHED_CONSTANTS.get(self.p, {})

    def stage(self, name, fn):
        log_.info("stage %s", name)
        record = StageRecord(name)
        self.cert.stages.append(record)
        try:
            record.summary = fn() or {}
        except FibDiffError as exc:
            record.status = "failed"
            record.error_kind = exc.kind
            record.error = str(exc)
            log_.error("stage %s failed: %s", name, exc)
            raise
        log_.info("stage %s: %s", name, record.summary)

    # -- stages --------------------------------------------------------------

    def search(self):
        sols = brute_force_search(self.p, self.config.search_cap)
        self.cert.search_solutions = sols
        return {"count": len(sols), "nontrivial": [s.as_list() for s in sols if s.a >= 1]}

    def small_cases(self):
        tagged = small_case_split(self.p)
        self.cert.small_case_solutions = tagged
        return {"count": len(tagged)}

    def conditions(self):
        conds = side_conditions(self.p, self.config.search_cap)
        self.cert.side_conditions = conds
        bad = [c.name for c in conds if not c.holds]
        if bad:
            raise StageFailure(f"side conditions not certified: {bad}")
        return {"certified": len(conds)}

    def A_values(self):
        if self.config.tight_constants:
            # D h(eta_i) rounded up to 1e-6, so admissibility stays decidable
            return tuple(_ceil_micro(x) for x in (2 * log(self.p), LOG_ALPHA, log(5)))
        return self.constants.get("A1", rounded_A1(self.p)), A2_DEFAULT, A3_DEFAULT

    def matveev_nm(self):
        A1, A2, A3 = self.A_values()
        self.nm = derive_nm_inequality(self.p, A1, A2, A3)
        self.cert.bound_chain.append(self.nm)
        return {"K": self.nm.coefficient.decimal(8)}

    def matveev_n(self):
        A1, A2, _ = self.A_values()
        self.eta3_coef = eta3_coefficient(self.p, A1, A2)
        quad = combine_chain(self.nm, self.eta3_coef)
        n_min = self.config.search_cap + 1
        if "log_squared" in self.constants:
            K_rel = self.constants["log_squared"]
            source = "published"
        else:
            K_rel = tight_relaxation(quad, n_min)
            source = "derived"
        if not relaxation_is_valid(K_rel, quad, n_min):
            raise StageFailure(f"(log n)^2 coefficient {K_rel} does not dominate the chain")
        cap = solve_self_referential(CapKind.LOG_SQUARED, K_rel)
        self.cap1 = cap
        const, lin, sq = quad.expanded()
        link = BoundChain(Stage.N_ABSOLUTE, evaluate(Const(K_rel)), cap, {
            "eta3_coefficient": self.eta3_coef,
            "quadratic": {"constant": const, "log": lin, "log_squared": sq},
            "log_squared_source": source,
            "valid_from_n": n_min,
            "gamma_nonzero_witness": GammaWitness.BETA_POWER_COLLISION.value,
        })
        self.cert.bound_chain.append(link)
        return {"K": str(K_rel), "cap": cap}

    def reduction_1(self):
        M = self.cap1
        inst, attempts = reduce_with_convergents(
            gamma_expr(self.p), log(SQRT5) / LOG_ALPHA, ROUND1_A, ALPHA, M,
            max_attempts=self.config.max_convergent_attempts)
        self.cert.reductions.append(inst)
        self.cert.reduction_attempts.extend(attempts)
        self.d_max = inst.max_surviving_omega
        if self.d_max < 3:
            self.d_max = 3
        return {"q": inst.q, "epsilon": inst.epsilon.decimal(8),
                "threshold": inst.threshold.decimal(10), "d_max": self.d_max}

    def bound_after_reduction(self):
        K, offset = bound_after_reduction(self.eta3_coef, self.d_max)
        cap = solve_self_referential(CapKind.ONE_PLUS_LOG, K, offset)
        if cap > self.cap1:
            raise StageFailure(f"reduced cap {cap} exceeds absolute cap {self.cap1}")
        self.cap2 = cap
        self.cert.bound_chain.append(BoundChain(Stage.N_AFTER_REDUCTION, K, cap, {
            "offset": offset, "d_max": self.d_max}))
        return {"K": K.decimal(8), "cap": cap}

    def reduction_2(self):
        cap = self.config.search_cap

        def accept(result: SweepResult) -> bool:
            return (result.omega_cap is not None
                    and result.omega_cap <= cap + 1
                    and all(can_eliminate(self.p, d, cap) for d in result.exceptions))

        sweep = sweep_mu_family(
            self.p, (3, self.d_max), self.cap2, ROUND2_A, ALPHA, accept=accept,
            min_epsilon=self.config.min_sweep_epsilon,
            max_attempts=self.config.max_convergent_attempts)
        self.cert.sweep = sweep
        if not sweep.omega_cap <= self.cap2:
            raise StageFailure("sweep cap exceeds the cap it started from")
        for row in sweep.rows:
            log_.debug("d=%d eps=%s", row.d, row.epsilon.decimal(8))
        return {"q": sweep.q, "exceptions": list(sweep.exceptions),
                "eps_min": sweep.eps_min.decimal(6), "eps_max": sweep.eps_max.decimal(6),
                "threshold": sweep.threshold.decimal(10)}

    def residuals(self):
        cases = [eliminate_residual(self.p, d, self.config.search_cap)
                 for d in self.cert.sweep.exceptions]
        self.cert.residual_cases = cases
        return {d.d: d.rule for d in cases}

    def verdict(self):
        triples = {s for s in self.cert.search_solutions}
        triples.update(t.triple for t in self.cert.small_case_solutions)
        for t in triples:
            if not t.holds(self.p):
                raise StageFailure(f"{t} does not satisfy the equation")
            if t.a >= t.n:
                raise StageFailure(f"{t} violates a < n")
        self.cert.verdict = sorted(triples)
        return {"solutions": [t.as_list() for t in self.cert.verdict]}


def _ceil_micro(x) -> Fraction:
    return Fraction(-(-evaluate(x).hi * 10 ** 6 // 1), 10 ** 6)


def run_full_proof(config: PipelineConfig) -> ProofCertificate:
    """Run every stage; on failure the certificate names the stage and has no verdict."""
    run = _Run(config)
    stages = [
        ("brute_force_search", run.search),
        ("small_case_split", run.small_cases),
        ("side_conditions", run.conditions),
        ("matveev_nm_bound", run.matveev_nm),
        ("matveev_n_absolute", run.matveev_n),
        ("reduction_round_1", run.reduction_1),
        ("n_after_reduction", run.bound_after_reduction),
        ("reduction_round_2", run.reduction_2),
        ("residual_elimination", run.residuals),
        ("verdict", run.verdict),
    ]
    with precision_limits(config.start_precision_bits, config.max_precision_bits):
        for name, fn in stages:
            try:
                run.stage(name, fn)
            except FibDiffError:
                break
    return run.cert
