#!/usr/bin/env python
"""
graphrfd command line.

Subcommands analyze, decompose, synthesize, certify and verify read a graph
JSON file and write a JSON report; selftest runs the randomized smoke checks.
Exit codes follow graphrfd.config.ExitCode.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, Optional

from graphrfd import __version__, config
from graphrfd.config import DEFAULT_TOLERANCES, DEFAULT_TRUNCATION, ExitCode, ToleranceConfig, default_zcount
from graphrfd.core.certificate import certificate_to_json, decide_rfd, verify_certificate
from graphrfd.core.error_handler import ErrorCode, GraphRFDError, enhance_error
from graphrfd.core.graph import Graph, parse_graph
from graphrfd.core.validation import validate_family_parameters, validate_tolerances
from graphrfd.reports import analyze_report, decompose_report, dumps, synthesize_report

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("analyze", "decompose", "synthesize", "certify", "verify", "selftest")


def _configure_logging() -> None:
    config.load_environment_config()
    level = getattr(logging, config.LOG_LEVEL, logging.WARNING)
    logging.basicConfig(level=level, format=config.LOG_FORMAT, stream=sys.stderr)


@dataclass
class CliConfig:
    subcommand: str
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    certificate_path: Optional[Path] = None
    truncation: int = DEFAULT_TRUNCATION
    zcount: Optional[int] = None
    tolerances: ToleranceConfig = field(default_factory=lambda: DEFAULT_TOLERANCES)
    tolerance_overrides: Dict[str, float] = field(default_factory=dict)
    seed: Optional[int] = None
    search_min_z: bool = False

    @property
    def effective_zcount(self) -> int:
        return default_zcount(self.truncation) if self.zcount is None else self.zcount

    def validate(self) -> None:
        """m >= 2L+1 and positive tolerances; raises InvalidParameter."""
        ok, message = validate_family_parameters(self.truncation, self.effective_zcount)
        if not ok:
            raise enhance_error(ErrorCode.INVALID_PARAMETER, message)
        ok, message = validate_tolerances(self.tolerances)
        if not ok:
            raise enhance_error(ErrorCode.INVALID_PARAMETER, message)
        if self.subcommand != "selftest" and self.input_path is None:
            raise enhance_error(ErrorCode.INVALID_PARAMETER, f"'{self.subcommand}' needs --input")
        if self.subcommand == "verify" and self.certificate_path is None:
            raise enhance_error(ErrorCode.INVALID_PARAMETER, "'verify' needs --certificate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphrfd", description="RFD decisions and certificates for graph C*-algebras")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--input", type=Path, help="Graph JSON file")
    parser.add_argument("--output", type=Path, help="Write the report here instead of standard output")
    parser.add_argument("--certificate", type=Path, help="Certificate JSON file (verify)")
    parser.add_argument("--trunc", type=int, default=DEFAULT_TRUNCATION, help="Monomial length bound L")
    parser.add_argument("--zcount", type=int, help="Number m of roots of unity (default 2L+1)")
    parser.add_argument(
        "--tol-ck", type=float, help=f"CK residual tolerance (default {DEFAULT_TOLERANCES.construction})",
    )
    parser.add_argument(
        "--tol-rank", type=float, help=f"Relative rank threshold (default {DEFAULT_TOLERANCES.rank_relative})",
    )
    parser.add_argument("--seed", type=int, help="Seed for the randomized checks of selftest")
    parser.add_argument("--search-min-z", action="store_true", help="Report the smallest separating m (certify)")
    return parser


def parse_config(argv: Optional[list] = None) -> CliConfig:
    args = build_parser().parse_args(argv)
    overrides = {
        name: value for name, value in (("construction", args.tol_ck), ("rank_relative", args.tol_rank))
        if value is not None
    }
    return CliConfig(
        subcommand=args.subcommand,
        input_path=args.input,
        output_path=args.output,
        certificate_path=args.certificate,
        truncation=args.trunc,
        zcount=args.zcount,
        tolerances=replace(DEFAULT_TOLERANCES, **overrides),
        tolerance_overrides=overrides,
        seed=args.seed,
        search_min_z=args.search_min_z,
    )


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise enhance_error(ErrorCode.IO_FAILURE, f"Cannot read {path}: {e}") from e


def _write_text(cfg: CliConfig, text: str) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text)
        return
    try:
        cfg.output_path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise enhance_error(ErrorCode.IO_FAILURE, f"Cannot write {cfg.output_path}: {e}") from e


def _load_graph(cfg: CliConfig) -> Graph:
    return parse_graph(_read_text(cfg.input_path))


# ====================================================================
# SUBCOMMANDS
# ====================================================================

def run_analyze(cfg: CliConfig) -> ExitCode:
    _write_text(cfg, dumps(analyze_report(_load_graph(cfg))))
    return ExitCode.OK


def run_decompose(cfg: CliConfig) -> ExitCode:
    _write_text(cfg, dumps(decompose_report(_load_graph(cfg))))
    return ExitCode.OK


def run_synthesize(cfg: CliConfig) -> ExitCode:
    report = synthesize_report(_load_graph(cfg), cfg.effective_zcount, cfg.tolerances)
    _write_text(cfg, dumps(report))
    return ExitCode.OK


def run_certify(cfg: CliConfig) -> ExitCode:
    """Write the certificate; exit 0 for RFD and 10 for NotRFD."""
    cert = decide_rfd(
        _load_graph(cfg), cfg.truncation, cfg.effective_zcount, cfg.tolerances, search_min_z=cfg.search_min_z,
    )
    _write_text(cfg, certificate_to_json(cert))
    return cert.exit_code


def run_verify(cfg: CliConfig) -> ExitCode:
    g = _load_graph(cfg)
    try:
        doc = json.loads(_read_text(cfg.certificate_path))
    except json.JSONDecodeError as e:
        raise enhance_error(ErrorCode.INVALID_CERTIFICATE, f"Certificate is not JSON: {e}") from e
    tolerances = None
    if cfg.tolerance_overrides and isinstance(doc, dict):
        recorded = ToleranceConfig.from_dict(doc.get("params", {}).get("tolerances", {}))
        tolerances = replace(recorded, **cfg.tolerance_overrides)
    report = verify_certificate(doc, g, tolerances)
    _write_text(cfg, dumps(report.to_dict()))
    return report.exit_code


def run_selftest(cfg: CliConfig) -> ExitCode:
    from graphrfd.selftest import run_selftest as selftest

    return ExitCode.OK if selftest(seed=cfg.seed) else ExitCode.VERIFY_FAILED


_RUNNERS: Dict[str, Callable[[CliConfig], ExitCode]] = {
    "analyze": run_analyze,
    "decompose": run_decompose,
    "synthesize": run_synthesize,
    "certify": run_certify,
    "verify": run_verify,
    "selftest": run_selftest,
}


def _report_error(error: GraphRFDError) -> None:
    sys.stderr.write(json.dumps(error.to_dict(), sort_keys=True, indent=2) + "\n")


def main(argv: Optional[list] = None) -> int:
    _configure_logging()
    try:
        cfg = parse_config(argv)
        cfg.validate()
        code = _RUNNERS[cfg.subcommand](cfg)
    except GraphRFDError as e:
        logger.debug(f"Command failed: {e.message}")
        _report_error(e)
        return e.exit_code.value
    return code.value


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
