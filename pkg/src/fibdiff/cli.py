"""Command-line front end: run the proof for one prime and optionally write the certificate."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .certificate import dumps_certificate
from .errors import DomainError
from .pipeline import PipelineConfig, ProofCertificate, is_prime, run_full_proof

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STAGE_FAILURE = 3
EXIT_PRECISION = 4


@dataclass(frozen=True)
class CliInvocation:
    prime: int
    search_cap: int = 200
    precision_start_bits: int = 128
    precision_max_bits: int = 16384
    output_path: Optional[str] = None
    verbosity: int = 1

    def config(self) -> PipelineConfig:
        return PipelineConfig(self.prime, self.search_cap, self.precision_start_bits,
                              self.precision_max_bits, self.output_path)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _prime(text: str) -> int:
    v = _positive(text)
    if not is_prime(v):
        raise argparse.ArgumentTypeError(f"{v} is not prime")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fibdiff", description="Certify all solutions of F_n - F_m = p^a.")
    ap.add_argument("--prime", type=_prime, required=True)
    ap.add_argument("--search-cap", type=_positive, default=200)
    ap.add_argument("--precision-start", type=_positive, default=128, metavar="BITS")
    ap.add_argument("--precision-max", type=_positive, default=16384, metavar="BITS")
    ap.add_argument("--emit", metavar="PATH", help="write the certificate here")
    ap.add_argument("--verbose", type=int, choices=(0, 1, 2), default=1,
                    help="0 silent, 1 stage summaries, 2 full trace")
    return ap


def parse_args(argv: Sequence[str] | None = None) -> CliInvocation:
    """Parse and validate; usage errors exit with status 2."""
    ap = build_parser()
    ns = ap.parse_args(argv)
    if ns.search_cap < 10:
        ap.error("--search-cap must be at least 10")
    if ns.precision_start > ns.precision_max:
        ap.error("--precision-start exceeds --precision-max")
    if ns.precision_start < 16:
        ap.error("--precision-start must be at least 16")
    return CliInvocation(ns.prime, ns.search_cap, ns.precision_start, ns.precision_max,
                         ns.emit, ns.verbose)


def exit_code(cert: ProofCertificate) -> int:
    if cert.certified:
        return EXIT_OK
    failed = cert.failed_stage
    if failed is not None and failed.error_kind == "precision-exhaustion":
        return EXIT_PRECISION
    return EXIT_STAGE_FAILURE


def _report(cert: ProofCertificate, out) -> None:
    for s in cert.stages:
        line = f"{s.name}: {s.status}"
        if s.error:
            line += f" [{s.error_kind}] {s.error}"
        print(line, file=out)
    if cert.verdict is not None:
        triples = ", ".join(f"({t.n},{t.m},{t.a})" for t in cert.verdict)
        print(f"verdict p={cert.prime}: {{{triples}}}", file=out)
    else:
        print(f"no verdict for p={cert.prime}", file=out)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        inv = parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    level = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}[inv.verbosity]
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr)
    if inv.verbosity < 2:
        logging.getLogger("fibdiff").setLevel(logging.WARNING)
    try:
        cfg = inv.config()
    except DomainError as exc:
        print(f"fibdiff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cert = run_full_proof(cfg)
    if inv.verbosity >= 1:
        _report(cert, sys.stdout)
    if inv.output_path:
        with open(inv.output_path, "w", encoding="utf-8") as fh:
            fh.write(dumps_certificate(cert))
    return exit_code(cert)


if __name__ == "__main__":
    sys.exit(main())
