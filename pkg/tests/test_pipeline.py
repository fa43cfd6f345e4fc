import pytest

from fibdiff.errors import DomainError, UnhandledResidual
from fibdiff.matveev import Stage
from fibdiff.pipeline import (PipelineConfig, brute_force_search, can_eliminate,
                              eliminate_residual, run_full_proof, side_conditions,
                              small_case_split)
from fibdiff.sequences import SolutionTriple, fib


def enumerate_oracle(p, cap):
    """Plain recurrence and repeated multiplication, sharing nothing with the package."""
    F = [0, 1]
    while len(F) <= cap:
        F.append(F[-1] + F[-2])
    powers = {}
    x, a = 1, 0
    while x <= F[cap]:
        powers[x] = a
        x, a = x * p, a + 1
    return {(n, m, powers[F[n] - F[m]]) for n in range(2, cap + 1) for m in range(n)
            if F[n] - F[m] in powers}


def triples(xs):
    return {(t.n, t.m, t.a) for t in xs}


def test_search_p7():
    found = brute_force_search(7, 200)
    assert triples(found) == enumerate_oracle(7, 200)
    nontrivial = {t for t in triples(found) if t[2] >= 1}
    assert {(6, 1, 1), (6, 2, 1)} <= nontrivial
    assert {(2, 0, 0), (3, 1, 0), (3, 2, 0), (4, 3, 0)} <= triples(found)


def test_search_finds_a_cube_for_p7():
    # 377 - 34 = 343 = 7^3, so the search is not limited to a <= 1
    assert fib(14) - fib(9) == 7 ** 3
    assert (14, 9, 3) in triples(brute_force_search(7, 200))


def test_search_p13():
    found = brute_force_search(13, 200)
    assert triples(found) == enumerate_oracle(13, 200)
    assert {t for t in triples(found) if t[2] >= 1} == {(7, 0, 1), (8, 6, 1), (9, 8, 1)}


def test_search_p2_smoke():
    found = triples(brute_force_search(2, 30))
    assert (3, 0, 1) in found
    assert found == enumerate_oracle(2, 30)


def test_search_cap_checked():
    with pytest.raises(DomainError):
        brute_force_search(7, 9)


def _by_rule(p, rule):
    return {(t.triple.n, t.triple.m, t.triple.a) for t in small_case_split(p) if t.rule == rule}


def test_small_cases():
    assert _by_rule(7, "n-m=1") == {(3, 2, 0), (4, 3, 0)}
    assert _by_rule(7, "n-m=2") == {(2, 0, 0), (3, 1, 0)}
    assert _by_rule(7, "m=0") == {(2, 0, 0)}
    assert _by_rule(13, "n-m=2") == {(2, 0, 0), (3, 1, 0), (8, 6, 1)}
    assert _by_rule(13, "m=0") == {(2, 0, 0), (7, 0, 1)}
    assert _by_rule(13, "n-m=1") == {(3, 2, 0), (4, 3, 0), (9, 8, 1)}


def test_small_cases_agree_with_search():
    for p in (2, 3, 5, 7, 11, 13, 89, 233):
        found = enumerate_oracle(p, 60)
        for t in small_case_split(p):
            assert (t.triple.n, t.triple.m, t.triple.a) in found
        for n, m, a in found:
            if n - m in (1, 2) or m == 0:
                assert any((t.triple.n, t.triple.m) == (n, m) for t in small_case_split(p))


def test_residual_examples():
    r = eliminate_residual(13, 66)
    assert r.rule == "fixed-lucas-factor" and r.witnesses["fixed_factor_value"] == 7881196
    r = eliminate_residual(13, 88)
    assert r.rule == "fixed-fibonacci-factor" and r.witnesses["fixed_factor_value"] == 701408733
    for p in (7, 13):
        r = eliminate_residual(p, 4)
        assert r.rule == "lucas-perfect-power" and r.witnesses["largest_possible_n"] <= 200


def test_residual_failures():
    with pytest.raises(UnhandledResidual):
        eliminate_residual(13, 5)
    # F_4 = 3, so n - m = 8 cannot be ruled out for p = 3
    with pytest.raises(UnhandledResidual):
        eliminate_residual(3, 8)
    # L_1 = 1 is p^0
    with pytest.raises(UnhandledResidual):
        eliminate_residual(7, 2)
    with pytest.raises(UnhandledResidual):
        eliminate_residual(7, 4, search_cap=4)
    assert can_eliminate(13, 66, 200) and not can_eliminate(13, 67, 200)


def test_side_conditions_certify():
    for p in (7, 13):
        conds = side_conditions(p, 200)
        assert all(c.holds for c in conds)
        assert any(c.note for c in conds)


def test_config_validation():
    with pytest.raises(DomainError):
        PipelineConfig(15)
    with pytest.raises(DomainError):
        PipelineConfig(7, search_cap=9)
    with pytest.raises(DomainError):
        PipelineConfig(7, start_precision_bits=256, max_precision_bits=128)


@pytest.mark.parametrize("p", [7, 13])
def test_full_proof_invariants(proof, p):
    cert = proof(p)
    assert cert.certified
    for t in cert.verdict:
        assert t.holds(p) and t.a < t.n
    union = set(cert.search_solutions) | {t.triple for t in cert.small_case_solutions}
    assert set(cert.verdict) == union
    caps = [cert.chain(Stage.N_ABSOLUTE).resulting_cap, cert.chain(Stage.N_AFTER_REDUCTION).resulting_cap]
    assert caps[1] <= caps[0]
    assert cert.sweep.omega_cap <= caps[1]
    assert {r.d for r in cert.residual_cases} == set(cert.sweep.exceptions)


def test_p13_verdict(proof):
    assert triples(proof(13).verdict) == {(2, 0, 0), (3, 1, 0), (3, 2, 0), (4, 3, 0),
                                          (7, 0, 1), (8, 6, 1), (9, 8, 1)}


def test_p7_verdict_contains_cube(proof):
    assert triples(proof(7).verdict) == {(2, 0, 0), (3, 1, 0), (3, 2, 0), (4, 3, 0),
                                         (6, 1, 1), (6, 2, 1), (14, 9, 3)}


def test_p11_runs_generic():
    cert = run_full_proof(PipelineConfig(11))
    if cert.certified:
        assert triples(cert.verdict) == enumerate_oracle(11, 200)
    else:
        assert cert.failed_stage.error_kind


def test_failure_is_named():
    cert = run_full_proof(PipelineConfig(7, max_precision_bits=128))
    assert not cert.certified
    assert cert.failed_stage.name == "reduction_round_1"
    assert cert.failed_stage.error_kind == "precision-exhaustion"
    cert = run_full_proof(PipelineConfig(3))
    assert not cert.certified and cert.failed_stage.name == "reduction_round_2"


def test_tight_constants_still_certify():
    cert = run_full_proof(PipelineConfig(7, tight_constants=True))
    assert cert.certified
    assert cert.chain(Stage.N_ABSOLUTE).details["log_squared_source"] == "derived"
    assert SolutionTriple(14, 9, 3) in cert.verdict
