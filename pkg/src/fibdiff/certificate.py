"""Serialize a ProofCertificate to a deterministic JSON document and read it back."""

from __future__ import annotations

import enum
import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .matveev import MatveevInstance
from .pipeline import ProofCertificate, TaggedSolution
from .realnum import CertifiedReal, Expr, decimal_string
from .sequences import SolutionTriple

FORMAT = "fibdiff-certificate/1"


def _fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _real(x: CertifiedReal) -> dict:
    radius = x.width / 2
    return {
        "decimal": x.decimal(15),
        "radius": decimal_string(radius, 3) if radius else "0",
        "lo": _fraction(x.lo),
        "hi": _fraction(x.hi),
        "expr": x.expr.render(),
        "precision_bits": x.precision,
    }


def to_plain(obj):
    """Recursively convert certificate parts to JSON-ready values."""
    if isinstance(obj, CertifiedReal):
        return _real(obj)
    if isinstance(obj, Expr):
        return obj.render()
    if isinstance(obj, SolutionTriple):
        return obj.as_list()
    if isinstance(obj, TaggedSolution):
        return {"solution": obj.triple.as_list(), "rule": obj.rule}
    if isinstance(obj, MatveevInstance):
        return {"t": obj.t, "D": obj.D, "A": [a.render() for a in obj.A],
                "gamma_nonzero_witness": obj.gamma_nonzero_witness.value}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return _fraction(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if is_dataclass(obj):
        return {f.name: to_plain(getattr(obj, f.name)) for f in fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def certificate_to_dict(cert: ProofCertificate) -> dict:
    cfg = cert.config
    doc = {
        "format": FORMAT,
        "tool_version": __version__,
        "prime": cert.prime,
        "config": {
            "search_cap": cfg.search_cap,
            "precision_start_bits": cfg.start_precision_bits,
            "precision_max_bits": cfg.max_precision_bits,
            "tight_constants": cfg.tight_constants,
        },
        "stages": [to_plain(s) for s in cert.stages],
        "search_solutions": to_plain(cert.search_solutions),
        "small_case_solutions": to_plain(cert.small_case_solutions),
        "side_conditions": to_plain(cert.side_conditions),
        "bound_chain": to_plain(cert.bound_chain),
        "reductions": to_plain(cert.reductions),
        "reduction_attempts": to_plain(cert.reduction_attempts),
        "sweep": _sweep(cert),
        "residual_cases": to_plain(cert.residual_cases),
    }
    failed = cert.failed_stage
    if failed is not None:
        doc["failed_stage"] = {"name": failed.name, "error_kind": failed.error_kind,
                               "error": failed.error}
    if cert.verdict is not None:
        doc["verdict"] = [t.as_list() for t in cert.verdict]
        doc["solution_partition"] = {
            "trivial_a0": [t.as_list() for t in cert.verdict if t.a == 0],
            "a1_inside_search_cap": [t.as_list() for t in cert.verdict if t.a == 1],
            "a_at_least_2": [t.as_list() for t in cert.verdict if t.a >= 2],
        }
    return doc


def _sweep(cert: ProofCertificate):
    s = cert.sweep
    if s is None:
        return None
    return {
        "p": s.p, "d_range": list(s.d_range), "M": s.M, "A": _fraction(s.A), "q": s.q,
        "exceptions": list(s.exceptions),
        "eps_min": to_plain(s.eps_min), "eps_max": to_plain(s.eps_max),
        "threshold": to_plain(s.threshold), "omega_cap": s.omega_cap,
        "attempts": to_plain(s.attempts),
        "rows": [{"d": r.d, "epsilon": r.epsilon.decimal(12),
                  "lo": _fraction(r.epsilon.lo), "hi": _fraction(r.epsilon.hi)}
                 for r in s.rows],
    }


def dumps_certificate(cert: ProofCertificate) -> str:
    return json.dumps(certificate_to_dict(cert), sort_keys=True, indent=1) + "\n"


def emit_certificate(cert: ProofCertificate, path) -> None:
    Path(path).write_text(dumps_certificate(cert), encoding="utf-8")


def load_certificate(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def verdict_of(doc: dict) -> list[SolutionTriple] | None:
    """The verdict of a parsed document, re-checked as SolutionTriples."""
    if "verdict" not in doc:
        return None
    return [SolutionTriple(*t) for t in doc["verdict"]]
