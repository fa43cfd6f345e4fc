"""Certified solution of F_n - F_m = p^a via linear forms in logarithms and reduction."""

__version__ = "0.1.0"

from .errors import (CapacityError, DomainError, FibDiffError, NotIrrational,  # noqa: E402
                     PrecisionExhausted, ReductionFailed, StageFailure, UnhandledResidual)
from .pipeline import PipelineConfig, ProofCertificate, run_full_proof  # noqa: E402
from .realnum import CertifiedReal, evaluate  # noqa: E402
from .sequences import SolutionTriple, fib, lucas  # noqa: E402

__all__ = [
    "CapacityError", "CertifiedReal", "DomainError", "FibDiffError", "NotIrrational",
    "PipelineConfig", "PrecisionExhausted", "ProofCertificate", "ReductionFailed",
    "SolutionTriple", "StageFailure", "UnhandledResidual", "__version__", "evaluate",
    "fib", "lucas", "run_full_proof",
]
